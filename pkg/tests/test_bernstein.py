import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expfunc import (
    Atoms,
    BernsteinSpec,
    ConfigError,
    Density,
    DomainError,
    GammaSub,
    InconclusiveDiagnostic,
    NoJumps,
    Stable,
    phi,
    phi_deriv,
    positive_increase_report,
    validate_inequalities,
)
from expfunc.bernstein import default_lambda_grid, levy_tail, phi_all

from .conftest import fixture_spec, gamma_as_density, rel, stable_as_density

half_plane = st.builds(
    complex,
    st.floats(1e-3, 1e3),
    st.floats(-1e3, 1e3),
)


def test_closed_forms(stable_half, atoms_one, gamma_one):
    assert phi(stable_half, 4) == pytest.approx(2.0)
    assert phi(BernsteinSpec(q=2.0), 1 + 5j) == pytest.approx(2.0)
    assert phi(gamma_one, math.e - 1) == pytest.approx(1.0)
    assert phi_deriv(stable_half, 4) == pytest.approx(0.25)
    assert phi_deriv(BernsteinSpec(q=3.0), 2 + 1j) == 0
    assert phi_deriv(atoms_one, 0.5, 2) == pytest.approx(-math.exp(-0.5), rel=1e-14)


def test_levy_tail(atoms_one):
    assert levy_tail(atoms_one, 0.5) == 1.0
    assert levy_tail(atoms_one, 2.0) == 0.0
    expo = BernsteinSpec(measure=Density(lambda y: np.exp(-y), lambda y: np.exp(-y)))
    assert levy_tail(expo, 1.0) == pytest.approx(math.exp(-1))


def test_invalid_specs():
    with pytest.raises(ConfigError):
        BernsteinSpec()
    with pytest.raises(ConfigError):
        BernsteinSpec(q=-1.0)
    with pytest.raises((ConfigError, ValueError)):
        Stable(1.0, 1.5)
    with pytest.raises(DomainError):
        phi(BernsteinSpec(q=1.0), 0j)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_density_variant_matches_stable(alpha):
    exact = BernsteinSpec(measure=Stable(1.0, alpha))
    dens = stable_as_density(alpha)
    rng = np.random.default_rng(1)
    z = 10.0 ** rng.uniform(-2, 2, 100) + 1j * rng.uniform(-50, 50, 100)
    assert np.max(np.abs(phi(dens, z) / phi(exact, z) - 1)) < 1e-8


def test_density_variant_matches_gamma():
    exact = BernsteinSpec(measure=GammaSub(1.0, 1.0))
    dens = gamma_as_density()
    rng = np.random.default_rng(2)
    z = 10.0 ** rng.uniform(-2, 2, 100) + 1j * rng.uniform(-50, 50, 100)
    for order in (0, 1, 2):
        a = np.asarray(phi_deriv(dens, z, order) if order else phi(dens, z))
        b = np.asarray(phi_deriv(exact, z, order) if order else phi(exact, z))
        assert np.max(np.abs(a / b - 1)) < 1e-8


def test_index_one_fixture_against_integrated_tail():
    # φ(z)/z -> ∫ μ̄ = 1 as z -> 0 for the index-1 fixture (its mean is 1)
    spec = fixture_spec("rv_index1")
    assert phi(spec, 1e-6).real / 1e-6 == pytest.approx(1.0, rel=1e-4)


@settings(max_examples=60, deadline=None)
@given(half_plane)
def test_conjugation_and_positivity(z):
    for spec in (BernsteinSpec(measure=Stable(1.0, 0.5)), BernsteinSpec(measure=GammaSub(2.0, 3.0)), BernsteinSpec(measure=Atoms((1.0, 2.0), (1.0, 0.5)))):
        f = phi(spec, z)
        assert f.real > 0
        assert abs(phi(spec, z.conjugate()) - f.conjugate()) <= 1e-14 * abs(f)
        assert abs(np.angle(f)) <= abs(np.angle(z)) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.001, 10.0))
def test_monotone_on_reals(x, factor):
    spec = BernsteinSpec(measure=GammaSub(1.0, 1.0), q=0.5)
    y = x * factor
    assert phi(spec, y).real >= phi(spec, x).real
    d1x, d1y = phi_deriv(spec, x).real, phi_deriv(spec, y).real
    assert 0 <= d1y <= d1x


def test_phi_all_matches_separate(stable_half):
    z = np.array([0.3 + 2j, 5 - 1j])
    f0, f1, f2 = phi_all(stable_half, z)
    assert np.allclose(f0, phi(stable_half, z), rtol=1e-15)
    assert np.allclose(f1, phi_deriv(stable_half, z, 1), rtol=1e-15)
    assert np.allclose(f2, phi_deriv(stable_half, z, 2), rtol=1e-15)


def test_positive_increase_verdicts(stable_half, atoms_one):
    rep = positive_increase_report(stable_half, default_lambda_grid())
    assert rep.verdict is True
    assert rep.sup_ratio == pytest.approx(0.5)
    rep = positive_increase_report(atoms_one, default_lambda_grid())
    assert rep.criterion_values["ii_liminf_estimate"] == pytest.approx(2.0)
    assert rep.verdict is True


def test_positive_increase_index_one_is_inconclusive():
    with pytest.raises(InconclusiveDiagnostic) as info:
        positive_increase_report(fixture_spec("rv_index1"), default_lambda_grid())
    assert info.value.report.sup_ratio > 0.95


def test_positive_increase_grid_checks(stable_half):
    with pytest.raises(DomainError):
        positive_increase_report(stable_half, [1.0, 10.0])
    with pytest.raises(DomainError):
        positive_increase_report(stable_half, [1.0, 1e5, 10.0])


@pytest.mark.parametrize(
    "spec",
    [
        BernsteinSpec(measure=Stable(1.0, 0.5)),
        BernsteinSpec(q=1.0),
        BernsteinSpec(measure=GammaSub(2.0, 3.0)),
        BernsteinSpec(measure=Atoms((1.0,), (1.0,)), q=0.3),
    ],
    ids=["stable", "pure_kill", "gamma", "atoms_killed"],
)
def test_inequality_suite_has_no_violations(spec):
    rep = validate_inequalities(spec, 10_000, 42)
    assert rep.passed, [r for r in rep.records if r.violations]


def test_inequality_suite_is_deterministic(stable_half):
    a = validate_inequalities(stable_half, 200, 3).to_dict()
    b = validate_inequalities(stable_half, 200, 3).to_dict()
    assert a == b


def test_laplace_integral_slow_decay_many_cycles():
    # y^2 times the index-1 tail tends to 1, so only e^{-xy} damps the oscillation
    from scipy import integrate

    from expfunc.measures import laplace_integral

    m = fixture_spec("rv_index1").measure
    z = 0.0013155083978616078 + 0.22825713085929716j

    def g(y):
        return y**2 * float(m.tail_fn(y))

    val, err = laplace_integral(g, z, m.Y_MIN)
    edges = np.linspace(0.0, 1.0 + 40.0 / z.real, 2001)
    ref = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        re = integrate.quad(lambda y: math.exp(-z.real * y) * math.cos(z.imag * y) * g(y), lo, hi, epsabs=1e-13)[0]
        im = integrate.quad(lambda y: -math.exp(-z.real * y) * math.sin(z.imag * y) * g(y), lo, hi, epsabs=1e-13)[0]
        ref += re + 1j * im
    assert abs(val - ref) <= 1e-9 * abs(ref)
    assert err < 1e-6
