"""Bernstein-gamma functions and the Mellin transform Γ(z)/W_φ(z).

Both are evaluated from the exact Stirling-type representation

    log W_ψ(z) = ½ log ψ(1) - log ψ(z) - ½ log ψ(z+1) + L_ψ(z) - E_ψ(z),

with ψ = φ for W_φ and ψ = φ* = z/φ(z) for the Mellin transform. L_ψ is the
integral of log ψ along 1 → Re z + 1 → z + 1 and E_ψ the sawtooth-weighted
correction. E_ψ is split as

    E_ψ(z) = T_ψ + ½ ∫_1^∞ P(u) (log ψ)''(u + z) du,

where T_ψ = -½ ∫_1^∞ P(u) (log ψ)''(u) du is the z-independent limit. Both
integrals are summed period by period with Gauss-Legendre rules and closed with
an Euler-Maclaurin remainder once the argument is large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev
from scipy import fft, integrate

from .bernstein import BernsteinSpec, phi_all
from .errors import DomainError, NonconvergentQuadrature
from .measures import Atoms, ExpJumpCPP, GammaSub, NoJumps, Stable
from .quadrature import cumulative_line_integral, gauss_legendre, panel_nodes, sawtooth

# |u + z| beyond which the Euler-Maclaurin tail takes over
EM_START = 32.0
# starting point of the Euler-Maclaurin tail for the constant T
T_START = 64
GL_PERIOD = 10
FD_STEP = 0.5
# Chebyshev interpolation of E along vertical lines
E_INTERP_START = 32
E_INTERP_MAX = 512
E_INTERP_TOL = 1e-13


def _log_derivs(spec: BernsteinSpec, w, star: bool):
    """(log ψ, (log ψ)', (log ψ)'') at complex w for ψ = φ or φ*."""
    w = np.asarray(w, dtype=complex)
    f0, f1, f2 = phi_all(spec, w)
    r1 = f1 / f0
    r2 = f2 / f0 - r1 * r1
    lg = np.log(f0)
    if star:
        return np.log(w) - lg, 1.0 / w - r1, -1.0 / (w * w) - r2
    return lg, r1, r2


def _singular_on_real_axis(spec: BernsteinSpec) -> bool:
    """True when log φ is analytic off (-∞, 0] (closed forms without periodic zeros)."""
    return isinstance(spec.measure, (NoJumps, Stable, GammaSub, ExpJumpCPP))


def _second(spec, w, star):
    """(log ψ)'' only; skips the logarithms."""
    w = np.asarray(w, dtype=complex)
    f0, f1, f2 = phi_all(spec, w)
    inv = 1.0 / f0
    r1 = f1 * inv
    r2 = f2 * inv - r1 * r1
    return -1.0 / (w * w) - r2 if star else r2


def _masked_period_sum(spec, z, n_start, edges, order, star):
    """Σ over periods k < n_start(z) of the order-point rule for ∫_k^{k+1} P h''."""
    nodes, weights = panel_nodes(edges, order)
    period = np.repeat(np.arange(1, edges.size), order)
    wts = (weights * sawtooth(nodes)).ravel()
    u = nodes.ravel()
    zi, ui = np.nonzero(period[None, :] < n_start[:, None])
    vals = _second(spec, u[ui] + z[zi], star) * wts[ui]
    return np.bincount(zi, vals.real, z.size) + 1j * np.bincount(zi, vals.imag, z.size)


def _sawtooth_integral(spec: BernsteinSpec, z, star: bool, start_radius: float = EM_START, estimate: bool = True):
    """∫_1^∞ P(u) (log ψ)''(u + z) du for each z, with an error estimate.

    Whole periods [k, k+1] are integrated with a fixed Gauss-Legendre rule
    (P is a polynomial on each); from the first integer N with |N + z| ≥
    ``start_radius`` the remainder is

        -h'(N)/6 + h'''(N)/360 - h^(5)(N)/15120,   h = log ψ(· + z),

    the odd derivatives taken by finite differences of h''.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=complex)
    err = np.zeros(z.shape)
    # number of whole periods before the tail for every z; the tail needs
    # distance >= start_radius from every singularity of log ψ
    if _singular_on_real_axis(spec):
        reach = np.abs(1.0 + z)
    else:
        reach = 1.0 + z.real
    n_start = np.maximum(1, np.ceil(start_radius - reach)).astype(int)
    n_max = int(n_start.max())
    if n_max > 1:
        edges = np.arange(1, n_max + 1, dtype=float)
        high = _masked_period_sum(spec, z, n_start, edges, GL_PERIOD, star)
        out += high
        if estimate:
            # crude rule-error estimate from a half-order rule on the same periods
            low = _masked_period_sum(spec, z, n_start, edges, GL_PERIOD // 2, star)
            err += 1e-3 * np.abs(high - low)

    wN = n_start + z
    h1 = _log_derivs(spec, wN, star)[1]
    d = FD_STEP
    f = [_second(spec, wN + k * d, star) for k in (-2, -1, 0, 1, 2)]
    h3 = (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12 * d)
    h5 = (f[4] - 2 * f[3] + 2 * f[1] - f[0]) / (2 * d**3)
    out += -h1 / 6.0 + h3 / 360.0 - h5 / 15120.0
    err += np.abs(h5) / 15120.0 * 10.0 / np.maximum(np.abs(wN), 1.0) ** 2
    return out, err


@lru_cache(maxsize=512)
def _T(spec: BernsteinSpec, star: bool) -> tuple[float, float]:
    edges = np.arange(1, T_START + 1, dtype=float)
    nodes, weights = panel_nodes(edges, GL_PERIOD)
    vals = _second(spec, nodes + 0j, star).real
    body = math.fsum((weights * sawtooth(nodes) * vals).ravel())
    tail, tail_err = _sawtooth_integral(spec, np.array([float(T_START) - 1.0 + 0j]), star, start_radius=0.0)
    # _sawtooth_integral starts at u = 1 + z; shifting by T_START - 1 gives the tail from T_START
    total = body + tail[0].real
    return -0.5 * total, 0.5 * float(tail_err[0]) + 1e-15


def T_phis(spec: BernsteinSpec) -> float:
    """T_{φ*} = ½ ∫_1^∞ P(u) (1/u² - (φ'/φ)² + φ''/φ) du, the large-Re z limit of E_{φ*}."""
    return _T(spec, True)[0]


def _E(spec, z, star, estimate=True):
    J, err = _sawtooth_integral(spec, z, star, estimate=estimate)
    T, T_err = _T(spec, star)
    return T + 0.5 * J, T_err + 0.5 * err


def _cheb_coeffs(vals):
    """Chebyshev coefficients from values at the n+1 points cos(πk/n)."""
    n = vals.size - 1
    c = fft.dct(vals, type=1) / n
    c[0] /= 2
    c[-1] /= 2
    return c


@lru_cache(maxsize=64)
def _E_line_interp(spec: BernsteinSpec, a: float, star: bool, B: float):
    """Chebyshev interpolant of E(a + ib) on b ∈ [0, B], or None.

    The node set is doubled (nested extrema) until the interpolant from the
    coarser set predicts the new values to E_INTERP_TOL.
    """

    def direct(t):
        b = 0.5 * B * (1.0 - t)
        return _E(spec, a + 1j * b, star, estimate=False)[0]

    n = E_INTERP_START
    t = np.cos(np.pi * np.arange(n + 1) / n)
    vals = direct(t)
    while n < E_INTERP_MAX:
        t_new = np.cos(np.pi * np.arange(1, 2 * n, 2) / (2 * n))
        new = direct(t_new)
        c = _cheb_coeffs(vals.real) + 1j * _cheb_coeffs(vals.imag)
        pred = chebyshev.chebval(t_new, c)
        merged = np.empty(2 * n + 1, dtype=complex)
        merged[0::2], merged[1::2] = vals, new
        vals, n = merged, 2 * n
        scale = 1.0 + float(np.max(np.abs(vals)))
        if float(np.max(np.abs(pred - new))) <= E_INTERP_TOL * scale:
            return _cheb_coeffs(vals.real) + 1j * _cheb_coeffs(vals.imag)
    return None


def _E_line(spec: BernsteinSpec, a: float, b, star: bool):
    """E(a + ib) for many b on one line; interpolated when that is cheaper."""
    b = np.asarray(b, dtype=float).ravel()
    if b.size >= 2 * E_INTERP_START:
        top = float(np.max(np.abs(b)))
        # round the range up so that successive calls on one line share the interpolant
        B = 2.0 ** math.ceil(math.log2(max(top, 1.0)))
        c = _E_line_interp(spec, a, star, B)
        if c is not None:
            t = 1.0 - 2.0 * np.abs(b) / B
            val = chebyshev.chebval(t, c)
            return np.where(b < 0, np.conj(val), val)
    return _E(spec, a + 1j * b, star, estimate=False)[0]


def E_phis(spec: BernsteinSpec, z):
    """E_{φ*}(z) = E_{φ₀}(z) - E_φ(z), φ₀(w) = w."""
    zz = np.asarray(z, dtype=complex)
    if np.any(~(zz.real > 0)):
        raise DomainError("E_phis requires Re(z) > 0")
    val, _ = _E(spec, zz.ravel(), True)
    return complex(val[0]) if np.ndim(z) == 0 else val.reshape(zz.shape)


def E_phi(spec: BernsteinSpec, z):
    zz = np.asarray(z, dtype=complex)
    val, _ = _E(spec, zz.ravel(), False)
    return complex(val[0]) if np.ndim(z) == 0 else val.reshape(zz.shape)


# ---------------------------------------------------------------------------
# L along the bent contour


def _line_step(spec: BernsteinSpec) -> float:
    m = spec.measure
    if isinstance(m, Atoms):
        return min(0.5, 1.0 / max(m.locations))
    return 0.5


def _G(spec: BernsteinSpec, re: float, star: bool) -> tuple[float, float]:
    """∫_1^{re} ln ψ(w) dw on the real axis."""
    if re == 1.0:
        return 0.0, 0.0

    def f(w):
        return float(_log_derivs(spec, complex(w), star)[0].real)

    val, err = integrate.quad(f, 1.0, re, epsabs=1e-13, epsrel=1e-13, limit=500)
    if not math.isfinite(val):
        raise NonconvergentQuadrature("horizontal leg of the Stirling contour diverged")
    return val, err


def _vertical(spec: BernsteinSpec, re: float, b, star: bool, h=None):
    """∫_0^b log ψ(re + iw) dw for an array of b (real part gives U, imaginary part A)."""
    h = _line_step(spec) if h is None else h

    def f(w):
        return _log_derivs(spec, re + 1j * w, star)[0]

    return cumulative_line_integral(f, b, h)


def _log_gamma_type(spec: BernsteinSpec, a: float, b, star: bool):
    """log W_ψ(a + ib) for a fixed real part and an array of imaginary parts."""
    b = np.asarray(b, dtype=float)
    z = a + 1j * b
    l1 = _log_derivs(spec, np.array([1.0 + 0j]), star)[0][0].real
    lz = _log_derivs(spec, z, star)[0]
    lz1 = _log_derivs(spec, z + 1.0, star)[0]
    G, _ = _G(spec, a + 1.0, star)
    V = _vertical(spec, a + 1.0, b, star)
    L = G + 1j * V
    E = _E_line(spec, a, b.ravel(), star)
    return 0.5 * l1 - lz - 0.5 * lz1 + L - E.reshape(z.shape)


def _apply_by_real_part(fn, z):
    zz = np.asarray(z, dtype=complex)
    if np.any(~(zz.real > 0)):
        raise DomainError("requires Re(z) > 0")
    flat = zz.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for re in np.unique(flat.real):
        sel = flat.real == re
        out[sel] = fn(float(re), flat.imag[sel])
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(zz.shape)


def log_W(spec: BernsteinSpec, z):
    """log W_φ(z) on Re z > 0; W_φ(z+1) = φ(z) W_φ(z), W_φ(1) = 1."""
    return _apply_by_real_part(lambda a, b: _log_gamma_type(spec, a, b, False), z)


def log_mellin(spec: BernsteinSpec, z):
    """log of M(z) = E[I_φ^{z-1}] = Γ(z)/W_φ(z) on Re z > 0."""
    return _apply_by_real_part(lambda a, b: _log_gamma_type(spec, a, b, True), z)


def log_mellin_line(spec: BernsteinSpec, a: float, b):
    """log M(a + ib) for many b on one vertical line (one horizontal integral)."""
    if not a > 0:
        raise DomainError("requires Re(z) > 0")
    return _log_gamma_type(spec, float(a), b, True)


# ---------------------------------------------------------------------------
# parts, envelopes, diagnostics


@dataclass(frozen=True)
class StirlingParts:
    """L_{φ*}(z-1) = G - A + iU, plus E = E_{φ*}(z), each with an error estimate."""

    G: float
    A: float
    U: float
    E: complex
    G_err: float
    A_err: float
    U_err: float
    E_err: float


def stirling_parts(spec: BernsteinSpec, z: complex) -> StirlingParts:
    z = complex(z)
    if not z.real > 0:
        raise DomainError("requires Re(z) > 0")
    G, G_err = _G(spec, z.real, True)
    h = _line_step(spec)
    V = _vertical(spec, z.real, np.array([z.imag]), True, h)[0]
    V2 = _vertical(spec, z.real, np.array([z.imag]), True, h / 2)[0]
    E, E_err = _E(spec, np.array([z]), True)
    return StirlingParts(
        G=G,
        A=float(V2.imag),
        U=float(V2.real),
        E=complex(E[0]),
        G_err=G_err,
        A_err=abs(V2.imag - V.imag) + 1e-15,
        U_err=abs(V2.real - V.real) + 1e-15,
        E_err=float(E_err[0]),
    )


@dataclass(frozen=True)
class DecayEnvelope:
    """Upper envelope for |M(a + ib)|, stored in log form.

    ExponentialDecay: base·exp(-epsilon·max(0, |b| - b0·a)).
    ModulusBoundOnly: the constant base = M(a).
    """

    a: float
    epsilon: float
    b0: float
    log_base: float
    mode: str

    @property
    def base(self) -> float:
        return math.exp(self.log_base) if self.log_base < 709.0 else math.inf

    def log_value(self, b):
        b = np.abs(np.asarray(b, dtype=float))
        if self.mode != "ExponentialDecay":
            return self.log_base + 0.0 * b
        return self.log_base - self.epsilon * np.maximum(0.0, b - self.b0 * self.a)

    def __call__(self, b):
        out = np.exp(self.log_value(b))
        return out if np.ndim(b) else float(out)


def decay_envelope(
    spec: BernsteinSpec,
    a: float,
    probe_points: int = 33,
    onset: float | None = None,
    target_drop: float | None = None,
) -> DecayEnvelope:
    """Fit an exponential decay rate to A_{φ*}(a + ib) and calibrate an envelope.

    The slope of A against b is fitted on [b0·a, 4·b0·a], where b0 comes from
    the saddle window (1/H at the point whose saddle is a) unless given. The
    envelope rate is 90% of the fitted slope. Its onset is the smallest one
    that dominates |M| on a probe grid covering [0, 4·b0·a], assuming |M| does
    not increase between neighbouring probes.

    With ``target_drop`` (a log-magnitude the envelope must fall by) the rate
    is lowered, if that helps, to minimise onset + target_drop/rate; a smaller
    rate is still a valid bound and near b = 0 |M| is Gaussian rather than
    exponential. Falls back to the modulus bound M(a) when the fit is poor.
    """
    from .phistar import context, in_domain, phi_star_real, saddle_window

    a = float(a)
    if not a > 0:
        raise DomainError("requires a > 0")
    logMa = log_mellin_line(spec, a, np.array([0.0]))[0].real
    fallback = DecayEnvelope(a, 0.0, 0.0, float(logMa), "ModulusBoundOnly")

    b0 = onset
    if b0 is None:
        b0 = 10.0
        try:
            x = phi_star_real(spec, a)
            if spec.d == 0 and in_domain(context(spec), x):
                H, _ = saddle_window(spec, x)
                b0 = min(max(1.0 / H, 1.0), 100.0)
        except Exception:  # diagnostics only; keep the default onset
            pass
    bs = np.linspace(b0 * a, 4 * b0 * a, probe_points)
    try:
        V = _vertical(spec, a, bs, True)
    except Exception:
        return fallback
    A = V.imag
    slope, intercept = np.polyfit(bs, A, 1)
    resid = A - (slope * bs + intercept)
    rel = float(np.sqrt(np.mean(resid**2)) / max(np.sqrt(np.mean((A - A.mean()) ** 2)), 1e-300))
    if not (slope > 0 and rel < 0.05):
        return fallback
    top = 4 * b0 * a
    probes = np.unique(np.concatenate([
        np.linspace(0.0, top, 4 * probe_points + 1),
        np.linspace(0.0, min(top, 16.0 * math.sqrt(a) + 16.0), 4 * probe_points + 1),
    ]))
    drop = log_mellin_line(spec, a, probes).real - logMa
    nxt = np.append(probes[1:], probes[-1] + (probes[-1] - probes[-2]))

    def onset_for(eps):
        # env(p_{i+1}) >= |M(p_i)| for every i
        return max(float(np.max(nxt + drop / eps)), 0.0)

    eps = 0.9 * float(slope)
    if target_drop is not None and target_drop > 0:
        cands = eps * 2.0 ** -np.arange(0, 12)
        costs = [onset_for(e) + target_drop / e for e in cands]
        eps = float(cands[int(np.argmin(costs))])
    return DecayEnvelope(a, eps, float(onset_for(eps) / a), float(logMa), "ExponentialDecay")


@dataclass
class ArgDiagnostic:
    a_grid: list
    t_grid: list
    table: list  # rows of arg φ*(a(1+it)), one per a
    min_value: float
    min_t_times_value: float
    nonnegative: bool


def arg_phistar_diagnostic(spec: BernsteinSpec, a_grid, t_grid) -> ArgDiagnostic:
    """Tabulate arg φ*(a(1+it)) = arg(a(1+it)) - arg φ(a(1+it))."""
    a = np.asarray(a_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if np.any(a <= 0) or np.any(t <= 0):
        raise DomainError("a_grid and t_grid must be positive")
    z = a[:, None] * (1.0 + 1j * t[None, :])
    f0, _, _ = phi_all(spec, z)
    vals = np.angle(z) - np.angle(f0)
    return ArgDiagnostic(
        a_grid=a.tolist(),
        t_grid=t.tolist(),
        table=vals.tolist(),
        min_value=float(vals.min()),
        min_t_times_value=float((t[None, :] * vals).min()),
        nonnegative=bool(np.all(vals >= -1e-14)),
    )
