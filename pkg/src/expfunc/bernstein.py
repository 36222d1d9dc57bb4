"""Bernstein functions: evaluation, derivatives and inequality diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, InconclusiveDiagnostic
from .measures import Measure, NoJumps

# finite-grid margin for the positive-increase verdict
DELTA_PI = 0.05


@dataclass(frozen=True)
class BernsteinSpec:
    """φ(z) = q + d z + ∫ (1 - e^{-zy}) μ(dy).

    Immutable; safe to share between threads.
    """

    q: float = 0.0
    d: float = 0.0
    measure: Measure = field(default_factory=NoJumps)

    def __post_init__(self):
        if not (self.q >= 0 and self.d >= 0):
            raise ConfigError("q and d must be nonnegative")
        if self.q == 0 and self.d == 0 and isinstance(self.measure, NoJumps):
            raise ConfigError("q, d and the Lévy measure cannot all vanish")

    @property
    def is_compound_poisson(self) -> bool:
        return math.isfinite(self.measure.mass)

    @property
    def phi_inf(self) -> float:
        """φ(∞) = q + μ̄(0+) when d = 0, else ∞."""
        if self.d > 0:
            return math.inf
        return self.q + self.measure.mass

    def deriv_at_zero(self) -> float:
        """φ'(0+) = d + ∫ y μ(dy) ∈ (0, ∞]."""
        return self.d + self.measure.mean


def _check_half_plane(z):
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.real > 0)):
        raise DomainError("evaluation requires Re(z) > 0")
    return z


def _scalar_or_array(z_in, out):
    if np.ndim(z_in) == 0:
        return complex(out)
    return out


def phi(spec: BernsteinSpec, z):
    """Evaluate φ(z) for Re z > 0 (scalar or array)."""
    zz = _check_half_plane(z)
    return _scalar_or_array(z, spec.q + spec.d * zz + spec.measure.laplace(zz))


def phi_deriv(spec: BernsteinSpec, z, order: int = 1):
    """φ'(z) or φ''(z) for Re z > 0."""
    zz = _check_half_plane(z)
    if order == 1:
        out = spec.d + spec.measure.d1(zz)
    elif order == 2:
        out = spec.measure.d2(zz)
    else:
        raise ValueError("order must be 1 or 2")
    out = np.asarray(out, dtype=complex) + 0j * zz
    return _scalar_or_array(z, out)


def phi_all(spec: BernsteinSpec, z):
    """(φ, φ', φ'') in one call; arrays in, arrays out, no domain check."""
    z = np.asarray(z, dtype=complex)
    l0, l1, l2 = spec.measure.all_derivs(z)
    f0 = spec.q + spec.d * z + l0
    f1 = spec.d + l1 + 0j * z
    f2 = l2 + 0j * z
    return f0, f1, f2


def levy_tail(spec: BernsteinSpec, y):
    """μ̄(y) for y > 0."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(~(y_arr > 0)):
        raise DomainError("Lévy tail requires y > 0")
    out = spec.measure.tail(y_arr)
    return float(out) if np.ndim(y) == 0 else np.asarray(out, dtype=float)


# ---------------------------------------------------------------------------
# positive increase


@dataclass
class PositiveIncreaseReport:
    sup_ratio: float
    criterion_values: dict
    verdict: bool | None
    window: tuple

    def to_dict(self):
        return {
            "sup_ratio": self.sup_ratio,
            "verdict": self.verdict,
            "window": list(self.window),
            "criterion_values": self.criterion_values,
        }


def positive_increase_report(spec: BernsteinSpec, lambda_grid, delta: float = DELTA_PI) -> PositiveIncreaseReport:
    """Finite-grid proxy for positive increase of the Lévy measure.

    Tabulates the four equivalent criteria: x μ̄(x)/I(x) and I(2x)/I(x) on the
    dual grid x = 1/λ, φ(2λ)/φ(λ) and λφ'(λ)/φ(λ) on the grid itself, where
    I(x) = ∫_0^x μ̄. The verdict is read off λφ'/φ over the top two decades of
    the grid. Raises InconclusiveDiagnostic (report attached) when that window
    comes within ``delta`` of 1.
    """
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.ndim != 1 or lam.size < 2 or np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
        raise DomainError("lambda_grid must be positive and strictly increasing")
    if lam[-1] / lam[0] < 1e4 * (1 - 1e-12):
        raise DomainError("lambda_grid must span at least four decades")

    f0 = np.array([phi(spec, complex(v)).real for v in lam])
    f0_2 = np.array([phi(spec, complex(2 * v)).real for v in lam])
    f1 = np.array([phi_deriv(spec, complex(v), 1).real for v in lam])
    crit_iv = lam * f1 / f0
    crit_iii = f0_2 / f0

    window = lam >= lam[-1] / 100.0
    sup_ratio = float(np.max(crit_iv[window]))

    table = {
        "lambda": lam.tolist(),
        "iv_lambda_dphi_over_phi": crit_iv.tolist(),
        "iii_phi2_over_phi": crit_iii.tolist(),
    }
    xs = 1.0 / lam
    if not isinstance(spec.measure, NoJumps):
        I = np.array([spec.measure.integrated_tail(v) for v in xs])
        I2 = np.array([spec.measure.integrated_tail(2 * v) for v in xs])
        tails = np.asarray(spec.measure.tail(xs), dtype=float)
        table["x"] = xs.tolist()
        table["ii_I2x_over_Ix"] = (I2 / I).tolist()
        table["i_x_tail_over_I"] = (xs * tails / I).tolist()
        # window near 0 on the dual grid matches the large-λ window
        table["ii_liminf_estimate"] = float(np.min((I2 / I)[window]))
        table["i_liminf_estimate"] = float(np.min((xs * tails / I)[window]))
    table["iii_limsup_estimate"] = float(np.max(crit_iii[window]))
    table["iv_limsup_estimate"] = sup_ratio

    report = PositiveIncreaseReport(sup_ratio, table, None, (float(lam[window][0]), float(lam[-1])))
    if spec.d > 0:
        raise InconclusiveDiagnostic("positive increase is only meaningful for d = 0", report)
    if sup_ratio >= 1 - delta:
        raise InconclusiveDiagnostic(
            f"λφ'/φ reaches {sup_ratio:.4f} within {delta} of 1 on the top window", report
        )
    report.verdict = True
    return report


def default_lambda_grid(lo: float = 1e-2, hi: float = 1e6, per_decade: int = 8):
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


# ---------------------------------------------------------------------------
# inequality suite


INEQUALITY_IDS = (
    "ineq_xdphi_over_phi_le_1",
    "ratio_phi_re_over_phi_le_1",
    "re_phi_positive",
    "dphi_modulus_le_real",
    "d2phi_modulus_le_real",
    "dphi_over_phi_le_2_over_re",
    "d2phi_over_phi_le_4_over_re2",
    "shift_im_bound",
    "arg_phi_le_arg_z",
)


@dataclass
class InequalityRecord:
    inequality_id: str
    sample_count: int
    violations: int
    worst_margin: float


@dataclass
class ValidationReport:
    records: list
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(r.violations == 0 for r in self.records)

    def to_dict(self):
        return {
            "passed": self.passed,
            "records": [vars(r) for r in self.records],
        }


def sample_half_plane(rng: np.random.Generator, n: int):
    """Re z log-uniform on [1e-3, 1e3]; Im z with log-uniform modulus, random sign."""
    re = 10.0 ** rng.uniform(-3, 3, n)
    im = 10.0 ** rng.uniform(-3, 3, n) * rng.choice([-1.0, 1.0], n)
    return re + 1j * im


def validate_inequalities(spec: BernsteinSpec, sample_count: int, rng_seed: int, rel_tol: float = 1e-9) -> ValidationReport:
    """Check the elementary Bernstein-function inequalities at random points.

    Each inequality is written lhs <= rhs and counted as violated when
    lhs - rhs exceeds ``rel_tol`` times the size of the terms (plus the
    quadrature tolerance for density measures). Samples are drawn from
    sub-streams keyed by sample index so the result does not depend on
    evaluation order.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    ss = np.random.SeedSequence(rng_seed)
    z = np.concatenate([sample_half_plane(np.random.default_rng(s), 1) for s in ss.spawn(sample_count)])
    x = z.real
    b = z.imag

    fz, f1z, f2z = phi_all(spec, z)
    fx, f1x, f2x = phi_all(spec, x + 0j)
    fx, f1x, f2x = fx.real, f1x.real, f2x.real

    with np.errstate(divide="ignore", invalid="ignore"):
        checks = {
            "ineq_xdphi_over_phi_le_1": (x * f1x / fx, np.ones_like(x)),
            "ratio_phi_re_over_phi_le_1": (np.abs(fx / fz), np.ones_like(x)),
            "re_phi_positive": (np.zeros_like(x), fz.real),
            "dphi_modulus_le_real": (np.abs(f1z), np.abs(f1x)),
            "d2phi_modulus_le_real": (np.abs(f2z), np.abs(f2x)),
            "dphi_over_phi_le_2_over_re": (np.abs(f1z / fz), 2.0 / x),
            "d2phi_over_phi_le_4_over_re2": (np.abs(f2z / fz), 4.0 / x**2),
            "shift_im_bound": (np.abs(fz - fx) / fx, np.abs(b) / x),
            "arg_phi_le_arg_z": (np.abs(np.angle(fz)), np.abs(np.angle(z))),
        }
    from .measures import QUAD_EPSABS, Density  # local: avoid a cycle in type checks

    quadrature = isinstance(spec.measure, Density)
    quad_slack = 1e-9 if quadrature else 0.0
    # φ' = L0 - zL1 and φ'' = zL2 - 2L1 carry the absolute error of each Laplace
    # integral (six QUADPACK pieces) times |z| + 2
    quad_abs = 6 * QUAD_EPSABS * (np.abs(z) + 2.0) if quadrature else 0.0
    records = []
    for key in INEQUALITY_IDS:
        lhs, rhs = checks[key]
        margin = rhs - lhs
        if key == "re_phi_positive":
            bad = ~(rhs > 0)
        else:
            scale = np.maximum(np.abs(lhs), np.abs(rhs))
            slack = (rel_tol + quad_slack) * np.maximum(scale, 1e-300) + 1e-300
            if key in ("dphi_modulus_le_real", "d2phi_modulus_le_real"):
                slack = slack + 2 * quad_abs
            bad = ~(margin >= -slack)
        records.append(InequalityRecord(key, int(z.size), int(np.count_nonzero(bad)), float(np.min(margin))))
    return ValidationReport(records)
