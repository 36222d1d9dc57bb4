"""φ*(z) = z/φ(z) and its inverse on the positive half-line."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bernstein import BernsteinSpec, phi, phi_deriv
from .errors import DomainError, NonconvergentRootFind

# φ'(0+) above this is treated as infinite
PHI_PRIME_INF = 1e12
# distance from a finite left endpoint inside which the inverse is refused
ENDPOINT_GUARD = 1e-6
MAX_ITER = 200


@dataclass(frozen=True)
class PhiStarContext:
    spec: BernsteinSpec
    domain_left: float

    @classmethod
    def from_spec(cls, spec: BernsteinSpec) -> "PhiStarContext":
        if spec.q > 0:
            left = 0.0
        else:
            slope = spec.deriv_at_zero()
            left = 0.0 if (not math.isfinite(slope) or slope > PHI_PRIME_INF) else 1.0 / slope
        return cls(spec, left)


@lru_cache(maxsize=256)
def context(spec: BernsteinSpec) -> PhiStarContext:
    return PhiStarContext.from_spec(spec)


def _ctx(obj) -> PhiStarContext:
    return obj if isinstance(obj, PhiStarContext) else context(obj)


def phi_star(ctx, z):
    """z/φ(z) on Re z > 0."""
    ctx = _ctx(ctx)
    zz = np.asarray(z, dtype=complex)
    out = zz / np.asarray(phi(ctx.spec, zz))
    return complex(out) if np.ndim(z) == 0 else out


def phi_star_real(spec: BernsteinSpec, v: float) -> float:
    return v / phi(spec, complex(v)).real


def elasticity(spec: BernsteinSpec, v: float) -> float:
    """v φ'(v)/φ(v) at a positive real point; lies in [0, 1]."""
    return v * phi_deriv(spec, complex(v), 1).real / phi(spec, complex(v)).real


def in_domain(ctx, x: float) -> bool:
    ctx = _ctx(ctx)
    if ctx.spec.d > 0 or not x > 0:
        return False
    if ctx.domain_left > 0:
        return x > ctx.domain_left + ENDPOINT_GUARD
    return True


def _check(ctx: PhiStarContext, x: float):
    if ctx.spec.d > 0:
        raise DomainError("the inverse of φ* is only used for driftless specs (d = 0)")
    if not in_domain(ctx, x):
        raise DomainError(f"x={x!r} is not inside Dom(φ*⁻¹) = ({ctx.domain_left}, ∞)")


def varphi_star(ctx, x: float) -> float:
    """Unique v > 0 with v/φ(v) = x.

    Newton's method on t = log v for F(t) = t - log φ(e^t) - log x, whose slope
    1 - vφ'(v)/φ(v) lies in [0, 1]; every iterate that leaves the current
    sign bracket is replaced by a bisection step.
    """
    ctx = _ctx(ctx)
    x = float(x)
    _check(ctx, x)
    spec = ctx.spec
    lx = math.log(x)

    def F(t):
        v = math.exp(t)
        return t - math.log(phi(spec, complex(v)).real) - lx

    t0 = math.log(x * phi(spec, 1.0 + 0j).real)
    f0 = F(t0)
    if f0 == 0.0:
        return math.exp(t0)
    # bracket by doubling / halving v
    step = math.log(2.0)
    if f0 < 0:
        lo, flo = t0, f0
        hi = t0 + step
        fhi = F(hi)
        for _ in range(MAX_ITER):
            if fhi >= 0:
                break
            lo, flo = hi, fhi
            step *= 2.0
            hi = lo + step
            fhi = F(hi)
        else:
            raise NonconvergentRootFind(f"could not bracket φ*(v) = {x}")
    else:
        hi, fhi = t0, f0
        lo = t0 - step
        flo = F(lo)
        for _ in range(MAX_ITER):
            if flo <= 0:
                break
            hi, fhi = lo, flo
            step *= 2.0
            lo = hi - step
            flo = F(lo)
        else:
            raise NonconvergentRootFind(f"could not bracket φ*(v) = {x}")
    if flo == 0.0:
        return math.exp(lo)
    if fhi == 0.0:
        return math.exp(hi)

    t = lo - flo * (hi - lo) / (fhi - flo)
    for _ in range(MAX_ITER):
        v = math.exp(t)
        fv = F(t)
        if fv == 0.0:
            return v
        if fv < 0:
            lo = t
        else:
            hi = t
        slope = 1.0 - elasticity(spec, v)
        t_new = t - fv / slope if slope > 0 else 0.5 * (lo + hi)
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-15 * max(1.0, abs(t)) or hi - lo <= 4e-16 * max(1.0, abs(t)):
            return math.exp(t_new)
        t = t_new
    raise NonconvergentRootFind(f"no convergence solving φ*(v) = {x}")


def varphi_star_deriv(ctx, x: float) -> float:
    """Derivative of the inverse: φ(v)/(1 - vφ'(v)/φ(v)) at v = varphi_star(x)."""
    ctx = _ctx(ctx)
    v = varphi_star(ctx, x)
    f = phi(ctx.spec, complex(v)).real
    slope = 1.0 - elasticity(ctx.spec, v)
    if not slope > 0:
        raise NonconvergentRootFind("φ* is flat at the root; derivative of inverse unbounded")
    return f / slope


def saddle_window(ctx, x: float) -> tuple[float, float]:
    """(H(x), g(x)) with H = v/(10 x v') and g = v^{7/12}, v = varphi_star(x)."""
    ctx = _ctx(ctx)
    v = varphi_star(ctx, x)
    dv = varphi_star_deriv(ctx, x)
    return 0.1 * v / (x * dv), v ** (7.0 / 12.0)
