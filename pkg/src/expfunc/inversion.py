"""Density, derivatives, tail and moments of I_φ by Mellin-Barnes inversion.

The inversion contour is the vertical line through the saddle abscissa
a = varphi_star(x). All magnitudes are assembled in log space and normalised by
the integrand at b = 0 before exponentiation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .bernstein import BernsteinSpec, phi
from .bgamma import DecayEnvelope, decay_envelope, log_mellin_line
from .errors import DomainError, NonconvergentQuadrature, TruncationUnbounded
from .phistar import context, in_domain, saddle_window, varphi_star, varphi_star_deriv
from .quadrature import panel_nodes

# contour abscissa used when x is too close to (or left of) Dom(varphi_star):
# 1/|ln x| clipped to [FALLBACK_A_MIN, FALLBACK_A] and rounded to a quarter-octave
# grid so nearby x share cached lines; keeps x^{-a} <= e^{2^(1/8)}
FALLBACK_A = 1.0
FALLBACK_A_MIN = 0.1
FALLBACK_STEPS_PER_OCTAVE = 4
# smallest abscissa used for the saddle; the Γ pole at 0 ruins accuracy below
MIN_A = 0.5
# smallest abscissa of the tail contour (in the variable of M(z+1)/z)
MIN_C = 0.5
MAX_REFINE = 8
FALLBACK_CAP = 64
ROUNDOFF = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class ContourPlan:
    a: float
    B_central: float
    B_max: float
    node_budget: int
    tail_bound: float
    x: float = 0.0
    n: int = 0
    sigma: float = 1.0
    envelope: DecayEnvelope | None = field(default=None, compare=False, repr=False)

    @property
    def mode(self) -> str:
        return self.envelope.mode if self.envelope is not None else "ModulusBoundOnly"


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_err: float
    imag_residue: float = 0.0
    log_abs_value: float = -math.inf
    plan: ContourPlan | None = field(default=None, compare=False, repr=False)


def _require_driftless(spec: BernsteinSpec):
    if spec.d != 0:
        raise DomainError("inversion is implemented for driftless specs only (d = 0)")
    if spec.q == 0 and spec.measure.mass == 0:
        raise DomainError("trivial spec: I_φ is infinite")


def fallback_abscissa(x: float) -> float:
    """Abscissa left of the domain; only q = 0 specs get here, so M(z) is regular at 0."""
    lx = abs(math.log(x))
    if lx <= 1.0:
        return FALLBACK_A
    a = min(FALLBACK_A, max(FALLBACK_A_MIN, 1.0 / lx))
    k = round(FALLBACK_STEPS_PER_OCTAVE * math.log2(a / FALLBACK_A_MIN))
    return min(FALLBACK_A, FALLBACK_A_MIN * 2.0 ** (k / FALLBACK_STEPS_PER_OCTAVE))


def _saddle(spec: BernsteinSpec, x: float):
    """(a, sigma, B_central, reference scale for b-panels)."""
    ctx = context(spec)
    if in_domain(ctx, x):
        v = varphi_star(ctx, x)
        if v >= MIN_A:
            dv = varphi_star_deriv(ctx, x)
            _, g = saddle_window(ctx, x)
            sigma = math.sqrt(x * dv)
            return v, sigma, max(8.0 * sigma, g)
        a = MIN_A
    else:
        a = fallback_abscissa(x)
    sigma = math.sqrt(a)
    return a, sigma, 8.0 * max(sigma, 1.0)


def _log_tail_bound(env: DecayEnvelope, B: float, c: float, n: int) -> float:
    """log of 2 ∫_B^∞ env(b) (c + b)^n db (both half-lines)."""
    eps = env.epsilon
    b_on = env.b0 * env.a
    start = max(B, b_on)
    s = eps * (start + c)
    # Γ(n+1, s) = n! e^{-s} Σ_{k<=n} s^k/k!
    ks = np.arange(n + 1)
    log_inc = special.gammaln(n + 1) - s + float(special.logsumexp(ks * math.log(s) - special.gammaln(ks + 1)))
    log_int = env.log_base + eps * (b_on + c) + log_inc - (n + 1) * math.log(eps)
    if B < b_on:
        # flat part of the envelope between B and the onset
        flat = env.log_base + n * math.log(c + b_on) + math.log(b_on - B)
        log_int = float(np.logaddexp(log_int, flat))
    return log_int + math.log(2.0)


def _truncation(env: DecayEnvelope, B_c: float, c: float, n: int, log_peak: float, sigma: float, tol: float):
    """(B_max, tail bound relative to the peak integrand) for one contour.

    ``log_peak`` is log of env.base·(polynomial factor at b = 0); the bound on
    the discarded part is compared with tol times the peak over a Gaussian
    width ``sigma``. Common factors such as x^{-a} cancel and are omitted.
    """
    if env.mode != "ExponentialDecay":
        return FALLBACK_CAP * B_c, 0.0
    target = math.log(tol) + log_peak + math.log(sigma)
    B = B_c
    for _ in range(80):
        if _log_tail_bound(env, B, c, n) < target:
            break
        B *= 1.25
    else:
        raise TruncationUnbounded("envelope decay too slow for the requested tolerance")
    return B, math.exp(_log_tail_bound(env, B, c, n) - log_peak)


def _drop(tol: float, sigma: float) -> float:
    """Log-magnitude the envelope must fall by before truncation is possible."""
    return -math.log(tol) + abs(math.log(max(sigma, 1e-3))) + 5.0


def contour_plan(spec: BernsteinSpec, x: float, n: int = 0, tol: float = 1e-8) -> ContourPlan:
    """Choose abscissa, central window and truncation height for one inversion."""
    _require_driftless(spec)
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if not (0 < tol <= 1e-2):
        raise DomainError("tol must lie in (0, 1e-2]")
    a, sigma, B_c = _saddle(spec, x)
    env = decay_envelope(spec, a, target_drop=_drop(tol, sigma))
    log_poly = sum(math.log(a + k) for k in range(n))
    B_max, tail_rel = _truncation(env, B_c, a + n, n, env.log_base + log_poly, sigma, tol)
    return ContourPlan(a, B_c, B_max, _budget(B_max, x, sigma), tail_rel, x, n, sigma, env)


def _budget(B_max: float, x: float, sigma: float) -> int:
    osc = max(abs(math.log(x)), 1.0)
    return int(16 * math.ceil(B_max * osc / math.pi + B_max / max(sigma, 0.5)))


def _panel_width(plan: ContourPlan) -> float:
    # a 16-point panel of this width keeps >= 2 nodes per half-period of x^{-ib}
    return min(plan.sigma / 2.0, 4.0 * math.pi / (1.0 + abs(math.log(plan.x))), 2.0)


@dataclass
class _Sum:
    total: complex = 0j
    err: float = 0.0
    abs_sum: float = 0.0
    converged: bool = True

    def add(self, other: "_Sum"):
        self.total += other.total
        self.err += other.err
        self.abs_sum += other.abs_sum
        self.converged = self.converged and other.converged


def _integrate(log_integrand, edges, tol: float) -> _Sum:
    """Integrate exp(log_integrand(b)) over ±[edges[0], edges[-1]] adaptively.

    Each panel is integrated with 16- and 8-point Gauss-Legendre rules on both
    half-lines; panels whose two rules disagree by more than a share of
    ``tol``·|sum| (or the rounding level of the panel, when larger) are bisected.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    acc = _Sum()
    for _round in range(MAX_REFINE + 1):
        e_lo = np.concatenate([lo, -hi])
        e_hi = np.concatenate([hi, -lo])
        n16, w16 = panel_nodes(np.stack([e_lo, e_hi], 1).ravel(), 16)
        n8, w8 = panel_nodes(np.stack([e_lo, e_hi], 1).ravel(), 8)
        # panel_nodes on interleaved edges also returns the gaps between panels; drop them
        n16, w16, n8, w8 = n16[::2], w16[::2], n8[::2], w8[::2]
        vals = log_integrand(np.concatenate([n16.ravel(), n8.ravel()]))
        f16 = np.exp(vals[: n16.size]).reshape(n16.shape)
        f8 = np.exp(vals[n16.size :]).reshape(n8.shape)
        I16 = np.sum(w16 * f16, axis=1)
        I8 = np.sum(w8 * f8, axis=1)
        A16 = np.sum(w16 * np.abs(f16), axis=1)
        # exp(v) inherits the absolute error of v, which grows with |v| (phase b ln x)
        N16 = np.sum(w16 * np.abs(f16) * (1.0 + np.abs(vals[: n16.size]).reshape(n16.shape)), axis=1)
        k = lo.size
        p16 = I16[:k] + I16[k:]
        p8 = I8[:k] + I8[k:]
        a16 = A16[:k] + A16[k:]
        noise = N16[:k] + N16[k:]
        diff = np.abs(p16 - p8)
        running = abs(acc.total + p16.sum())
        # no point refining below the rounding level of the panel sums
        thresh = np.maximum(1e-3 * tol * running / max(k, 1), ROUNDOFF * noise)
        thresh = np.maximum(thresh, 1e-300)
        bad = diff > thresh
        if _round == MAX_REFINE and bad.any():
            acc.converged = False
            bad[:] = False
        good = ~bad
        acc.total += p16[good].sum()
        acc.err += float(diff[good].sum())
        acc.abs_sum += float(noise[good].sum())
        if not bad.any():
            return acc
        mid = 0.5 * (lo[bad] + hi[bad])
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
    return acc


def _invert(log_integrand, plan: ContourPlan, tol: float, log_scale: float, sign: float) -> EvalResult:
    h = _panel_width(plan)
    if plan.mode == "ExponentialDecay":
        edges = np.linspace(0.0, plan.B_max, max(2, int(math.ceil(plan.B_max / h))) + 1)
        acc = _integrate(log_integrand, edges, tol)
        tail_rel = plan.tail_bound
    else:
        B = plan.B_central
        edges = np.linspace(0.0, B, max(2, int(math.ceil(B / h))) + 1)
        acc = _integrate(log_integrand, edges, tol)
        while True:
            if 2 * B > plan.B_max:
                raise TruncationUnbounded(f"no convergence of the contour integral up to |b| = {B:g}")
            edges = np.linspace(B, 2 * B, max(2, int(math.ceil(B / h))) + 1)
            part = _integrate(log_integrand, edges, tol)
            acc.add(part)
            B *= 2
            if abs(part.total) < max(0.1 * tol * abs(acc.total.real), ROUNDOFF * acc.abs_sum):
                break
        tail_rel = abs(part.total)
    if not acc.converged:
        raise NonconvergentQuadrature("contour quadrature did not settle after refinement")
    re = float(acc.total.real)
    im = float(acc.total.imag)
    scale = math.exp(log_scale) if log_scale < 709 else math.inf
    value = sign * re * scale
    abs_err = float((acc.err + ROUNDOFF * acc.abs_sum + abs(im) + tail_rel) * scale)
    resid = abs(im) / abs(re) if re != 0 else math.inf
    log_abs = log_scale + math.log(abs(re)) if re != 0 else -math.inf
    return EvalResult(value, abs_err, resid, log_abs, plan)


def density_deriv(spec: BernsteinSpec, x: float, n: int = 0, tol: float = 1e-10) -> EvalResult:
    """n-th derivative of the density of I_φ at x > 0.

    Inverts (-1)^n/(2π) ∫ x^{-a-ib-n} Γ(a+ib+n)/W_φ(a+ib) db with
    Γ(z+n)/W_φ(z) = M(z) ∏_{k<n} (z+k).
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    plan = contour_plan(spec, x, n, tol)
    a, lx = plan.a, math.log(x)

    def logF(b):
        z = a + 1j * b
        out = -(a + n + 1j * b) * lx + log_mellin_line(spec, a, b)
        for k in range(n):
            out = out + np.log(z + k)
        return out

    log0 = float(logF(np.array([0.0]))[0].real)
    res = _invert(lambda b: logF(b) - log0, plan, tol, log0 - math.log(2 * math.pi), (-1.0) ** n)
    return res


def tail(spec: BernsteinSpec, x: float, tol: float = 1e-10) -> EvalResult:
    """P(I_φ > x), inverting the Mellin transform M(z+1)/z of the tail.

    The line is Re z = c with c = max(a - 1, 1/2), a the density saddle.
    """
    _require_driftless(spec)
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    a, sigma, B_c = _saddle(spec, x)
    c = max(a - 1.0, MIN_C)
    env = decay_envelope(spec, c + 1.0, target_drop=_drop(tol, sigma))
    # |1/(c + ib)| <= 1/c
    B_max, tail_rel = _truncation(env, B_c, c, 0, env.log_base, sigma, tol)
    plan = ContourPlan(c, B_c, B_max, _budget(B_max, x, sigma), tail_rel, x, 0, sigma, env)
    lx = math.log(x)

    def logF(b):
        z = c + 1j * b
        return -z * lx + log_mellin_line(spec, c + 1.0, b) - np.log(z)

    log0 = float(logF(np.array([0.0]))[0].real)
    return _invert(lambda b: logF(b) - log0, plan, tol, log0 - math.log(2 * math.pi), 1.0)


def moment(spec: BernsteinSpec, n: int) -> float:
    """E[I_φ^n] = n!/∏_{k=1}^n φ(k)."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    if n == 0:
        return 1.0
    ks = np.arange(1, n + 1, dtype=float)
    vals = np.asarray(phi(spec, ks + 0j)).real
    return float(np.exp(special.gammaln(n + 1) - np.sum(np.log(vals))))
