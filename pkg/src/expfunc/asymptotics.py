"""Large-x asymptotics of f_{I_φ}^{(n)} and density/asymptotic ratio tables."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .bernstein import BernsteinSpec, default_lambda_grid, phi, phi_deriv, positive_increase_report
from .bgamma import T_phis
from .errors import DomainError, InconclusiveDiagnostic, NonconvergentQuadrature, PositiveIncreaseUnverified
from .inversion import density_deriv
from .measures import Atoms
from .phistar import context, elasticity, in_domain, phi_star_real, varphi_star, varphi_star_deriv

QUAD_EPSREL = 1e-12


@dataclass(frozen=True)
class AsymptoticConstant:
    C_abs: float
    sign: int
    n: int
    T: float

    @property
    def value(self) -> float:
        return self.sign * self.C_abs


def asymptotic_constant(spec: BernsteinSpec, n: int = 0) -> AsymptoticConstant:
    """C = (-1)^n e^{-T_{φ*}}/√(2π φ*(1))."""
    T = T_phis(spec)
    C_abs = math.exp(-T) / math.sqrt(2 * math.pi * phi_star_real(spec, 1.0))
    return AsymptoticConstant(C_abs, -1 if n % 2 else 1, int(n), T)


def _check(spec: BernsteinSpec, x: float):
    if spec.d != 0:
        raise DomainError("asymptotics are implemented for driftless specs only (d = 0)")
    if not in_domain(context(spec), x):
        raise DomainError(f"x={x!r} is outside Dom(varphi_star)")


def _quad(f, a, b):
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=400)
    if not math.isfinite(val) or err > 1e-8 * max(abs(val), 1.0):
        raise NonconvergentQuadrature(f"exponent integral error {err:.3g}")
    return val


def exponent_integral(spec: BernsteinSpec, x: float, form: str = "substituted") -> float:
    """∫_{φ*(1)}^x varphi_star(y)/y dy.

    ``form="substituted"`` integrates 1 - vφ'(v)/φ(v) over v from 1 to
    varphi_star(x) (in log v); ``form="raw"`` integrates varphi_star(e^t) over
    t from log φ*(1) to log x. For x < φ*(1) both return the signed integral.
    """
    x = float(x)
    _check(spec, x)
    if form == "substituted":
        v = varphi_star(spec, x)
        return _quad(lambda t: (1.0 - elasticity(spec, math.exp(t))) * math.exp(t), 0.0, math.log(v))
    if form == "raw":
        y1 = phi_star_real(spec, 1.0)
        return _quad(lambda t: varphi_star(spec, math.exp(t)), math.log(y1), math.log(x))
    raise ValueError("form must be 'substituted' or 'raw'")


@lru_cache(maxsize=128)
def _pi_verdict(spec: BernsteinSpec):
    try:
        positive_increase_report(spec, default_lambda_grid())
    except InconclusiveDiagnostic as exc:
        return str(exc)
    except DomainError as exc:
        return str(exc)
    return None


def asymptotic_density_deriv(spec: BernsteinSpec, x: float, n: int = 0, *, check_positive_increase: bool = True) -> float:
    """C varphi_star(x)^n √(varphi_star'(x)) x^{-n} exp(-∫_{φ*(1)}^x varphi_star(y)/y dy).

    Emits PositiveIncreaseUnverified when the grid diagnostic cannot confirm
    positive increase; the value is returned regardless.
    """
    x = float(x)
    _check(spec, x)
    if check_positive_increase:
        reason = _pi_verdict(spec)
        if reason is not None:
            warnings.warn(f"positive increase unverified: {reason}", PositiveIncreaseUnverified, stacklevel=2)
    const = asymptotic_constant(spec, n)
    v = varphi_star(spec, x)
    dv = varphi_star_deriv(spec, x)
    log_val = math.log(const.C_abs) + n * math.log(v / x) + 0.5 * math.log(dv) - exponent_integral(spec, x)
    return const.sign * math.exp(log_val)


# ---------------------------------------------------------------------------
# compound Poisson asymptotics


@dataclass(frozen=True)
class CppAsymptotic:
    value: float
    regime: str
    caveat: bool
    constant: float


def _inner(spec: BernsteinSpec, v: float) -> float:
    """∫_{φ*(1)}^∞ e^{-v varphi_star(y)} dy = ∫_1^∞ e^{-vs} (φ*)'(s) ds."""

    def g(s):
        f = phi(spec, complex(s)).real
        f1 = phi_deriv(spec, complex(s), 1).real
        return math.exp(-v * (s - 1.0)) * (f - s * f1) / (f * f)

    val, err = integrate.quad(g, 1.0, math.inf, epsabs=0.0, epsrel=1e-10, limit=400)
    if err > 1e-8 * max(abs(val), 1e-300):
        raise NonconvergentQuadrature(f"compound Poisson inner integral error {err:.3g}")
    return math.exp(-v) * val


def cpp_correction(spec: BernsteinSpec) -> float:
    """∫_0^∞ ∫_{φ*(1)}^∞ e^{-varphi_star(y) v} dy μ(dv) for integrable small jumps."""
    m = spec.measure
    if isinstance(m, Atoms):
        return math.fsum(w * _inner(spec, loc) for loc, w in zip(m.locations, m.masses))
    val, err = integrate.quad(lambda v: float(m.density(v)) * _inner(spec, v), 0.0, math.inf, epsabs=0.0, epsrel=1e-8, limit=200)
    if err > 1e-6 * max(abs(val), 1e-300):
        raise NonconvergentQuadrature(f"compound Poisson outer integral error {err:.3g}")
    return val


def cpp_asymptotic(spec: BernsteinSpec, x: float, n: int = 0) -> CppAsymptotic:
    """C e^{-φ(∞)x} for a (killed) compound Poisson subordinator.

    With ∫_0^1 μ(dv)/v = ∞ the exponent carries an unquantified o(x) term;
    only the leading constant is used and ``caveat`` is set.
    """
    if spec.d != 0 or not spec.is_compound_poisson:
        raise DomainError("cpp_asymptotic requires d = 0 and a finite Lévy measure")
    B = spec.phi_inf
    ps1 = phi_star_real(spec, 1.0)
    integrable = bool(spec.measure.small_jumps_integrable())
    log_c = (n + 0.5) * math.log(B) + B * ps1 - T_phis(spec) - 0.5 * math.log(2 * math.pi * ps1)
    if integrable:
        log_c += cpp_correction(spec)
    sign = -1.0 if n % 2 else 1.0
    C = sign * math.exp(log_c)
    return CppAsymptotic(
        value=sign * math.exp(log_c - B * float(x)),
        regime="IntegrableSmallJumps" if integrable else "NonIntegrableSmallJumps",
        caveat=not integrable,
        constant=C,
    )


# ---------------------------------------------------------------------------
# ratio tables


@dataclass(frozen=True)
class RatioRow:
    x: float
    density: float
    density_err: float
    asymptotic: float
    ratio: float
    warning: str = ""


def ratio_table(spec: BernsteinSpec, xs, n: int = 0, tol: float = 1e-10, corollary: bool = False) -> list[RatioRow]:
    """Rows (x, f^{(n)}(x), asymptotic, ratio) for increasing xs."""
    xs = [float(v) for v in xs]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("xs must be strictly increasing")
    rows = []
    for x in xs:
        res = density_deriv(spec, x, n, tol)
        flag = ""
        if corollary:
            out = cpp_asymptotic(spec, x, n)
            asym = out.value
            flag = "o(x) exponent term omitted" if out.caveat else ""
        else:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", PositiveIncreaseUnverified)
                asym = asymptotic_density_deriv(spec, x, n)
            if caught:
                flag = "PositiveIncreaseUnverified"
        rows.append(RatioRow(x, res.value, res.abs_err, asym, res.value / asym if asym != 0 else math.nan, flag))
    return rows


def ratio_array(rows) -> np.ndarray:
    return np.array([r.ratio for r in rows])
