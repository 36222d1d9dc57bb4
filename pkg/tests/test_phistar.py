import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expfunc import Atoms, BernsteinSpec, DomainError, GammaSub, Stable, phi_star, varphi_star, varphi_star_deriv
from expfunc.phistar import context, in_domain, saddle_window

from .conftest import POSITIVE_INCREASE_FIXTURES, fixture_spec


def test_phi_star_values(stable_half):
    assert phi_star(stable_half, 4) == pytest.approx(2.0)
    assert phi_star(BernsteinSpec(q=2.0), 3) == pytest.approx(1.5)
    assert phi_star(BernsteinSpec(d=1.0), 2 + 7j) == pytest.approx(1.0)


def test_varphi_star_values(stable_half, atoms_one):
    assert varphi_star(stable_half, 3) == pytest.approx(9.0, rel=1e-12)
    assert varphi_star(BernsteinSpec(q=2.0), 5) == pytest.approx(10.0, rel=1e-12)
    # bisection oracle on v -> v / (1 - e^{-v})
    from scipy.optimize import brentq

    ref = brentq(lambda v: v / (1 - math.exp(-v)) - 2.0, 1e-6, 10, xtol=1e-15)
    assert varphi_star(atoms_one, 2.0) == pytest.approx(ref, rel=1e-12)


def test_varphi_star_deriv(stable_half, gamma_one):
    assert varphi_star_deriv(stable_half, 3) == pytest.approx(6.0, rel=1e-10)
    assert varphi_star_deriv(BernsteinSpec(q=2.0), 0.7) == pytest.approx(2.0, rel=1e-12)
    h = 1e-4
    fd = (varphi_star(gamma_one, 10 + h) - varphi_star(gamma_one, 10 - h)) / (2 * h)
    assert varphi_star_deriv(gamma_one, 10) == pytest.approx(fd, rel=1e-6)


def test_saddle_window(stable_half):
    H, g = saddle_window(context(stable_half), 4)
    assert H == pytest.approx(1 / 20)
    assert g == pytest.approx(16 ** (7 / 12))
    H, _ = saddle_window(context(BernsteinSpec(q=3.0)), 2.5)
    assert H == pytest.approx(0.1)


def test_domain(gamma_one):
    ctx = context(gamma_one)
    # left endpoint 1/φ'(0+) = 1 for log(1 + z)
    assert ctx.domain_left == pytest.approx(1.0, rel=1e-6)
    assert not in_domain(ctx, 0.5)
    with pytest.raises(DomainError):
        varphi_star(gamma_one, 0.5)
    assert context(BernsteinSpec(q=1.0)).domain_left == 0.0


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 6), st.sampled_from(POSITIVE_INCREASE_FIXTURES))
def test_round_trip(log10_x, name):
    spec = fixture_spec(name)
    ctx = context(spec)
    x = 10.0**log10_x
    if not in_domain(ctx, x):
        return
    v = varphi_star(ctx, x)
    assert phi_star(spec, v).real == pytest.approx(x, rel=1e-10)
    assert varphi_star_deriv(ctx, x) > 0


@pytest.mark.parametrize("name", ["stable_a03", "stable_a05", "stable_a07", "gamma_sub", "pure_kill_q1", "exp_jump_cpp"])
def test_window_bounds(name):
    spec = fixture_spec(name)
    ctx = context(spec)
    xs = np.geomspace(10, 1e6, 13)
    vs = [varphi_star(ctx, x) for x in xs]
    assert np.all(np.diff(vs) > 0)
    Hs = np.array([saddle_window(ctx, x)[0] for x in xs])
    assert np.all(Hs > 0.005) and np.all(Hs <= 0.1 + 1e-12)


@pytest.mark.parametrize("name", ["stable_a05", "gamma_sub", "pure_kill_q1", "cpp_atoms"])
def test_g_dominates_gaussian_width(name):
    ctx = context(fixture_spec(name))

    def ratio(x):
        return saddle_window(ctx, x)[1] / math.sqrt(x * varphi_star_deriv(ctx, x))

    assert ratio(1e6) > ratio(1e2)
