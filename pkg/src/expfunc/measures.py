"""Lévy measures of subordinators.

Every measure exposes the jump part of the Laplace exponent and its first two
derivatives on the open right half-plane, vectorised over complex arrays:

    laplace(z) = ∫ (1 - e^{-zy}) μ(dy)
    d1(z)      = ∫ y e^{-zy} μ(dy)
    d2(z)      = -∫ y² e^{-zy} μ(dy)

together with the tail μ̄(y) = μ((y, ∞)) and a few scalar summaries used by the
diagnostics and the simulator.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .errors import ConfigError, NonconvergentQuadrature

# absolute / relative tolerance for measure quadrature
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
# e^{-TRUNCATION_RATE} is negligible against the retained integral
TRUNCATION_RATE = 40.0


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, **kw)
        except integrate.IntegrationWarning as exc:
            # retry quietly; only fail if the error estimate is unacceptable
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, a, b, **kw)
            if err > 1e3 * max(QUAD_EPSABS, QUAD_EPSREL * abs(val)):
                raise NonconvergentQuadrature(f"{exc} (est. error {err:.3g})") from None
    return val, err


def laplace_integral(g: Callable[[float], float], z: complex, y_min: float = 0.0) -> tuple[complex, float]:
    """Return ∫_{y_min}^∞ e^{-zy} g(y) dy and an error estimate, for Re z > 0.

    The first piece [0, y1] (at most half an oscillation and at most 1/Re z long)
    absorbs any integrable singularity of g at the origin, after the change of
    variables y = y1 e^{-s} that turns logarithmic singularities into algebraic
    decay in s. The rest of (0, 1] and (1, 1 + 40/Re z] use the Fourier-weighted
    QUADPACK rule when they hold a full oscillation; the remainder is bounded.
    """
    x, t = float(z.real), float(z.imag)
    at = abs(t)
    y1 = 1.0
    if x > 1.0:
        y1 = min(y1, 1.0 / x)
    if at > 0.0:
        y1 = min(y1, math.pi / at)

    def f(y):
        return math.exp(-x * y) * g(y)

    opts = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=500)

    s_max = math.log(y1 / y_min) if y_min > 0.0 else math.inf

    def near_origin(h):
        def hs(s):
            y = y1 * math.exp(-s)
            return h(y) * y if y > 0.0 else 0.0

        return _quad(hs, 0.0, s_max, **opts)

    errs = []
    if at == 0.0:
        v, e = near_origin(f)
        parts, errs = [v], [e]
        for a, b in ((y1, 1.0), (1.0, math.inf)):
            if b > a:
                v, e = _quad(f, a, b, **opts)
                parts.append(v)
                errs.append(e)
        return complex(math.fsum(parts), 0.0), math.fsum(errs)

    re_parts, im_parts = [], []
    v, e = near_origin(lambda y: f(y) * math.cos(t * y))
    re_parts.append(v)
    errs.append(e)
    v, e = near_origin(lambda y: f(y) * math.sin(t * y))
    im_parts.append(-v)
    errs.append(e)
    if y1 < 1.0:
        for weight, sink, sign in (("cos", re_parts, 1.0), ("sin", im_parts, -1.0)):
            v, e = _quad(f, y1, 1.0, weight=weight, wvar=t, **opts)
            sink.append(sign * v)
            errs.append(e)
    if x * 1.0 < 745.0:
        # e^{-xy} is below e^{-TRUNCATION_RATE} past y_end; the cycle extrapolation of the
        # Fourier-integral rule is unreliable both for very slow and very slow-decaying
        # oscillation, so integrate the finite piece and bound the rest
        y_end = 1.0 + TRUNCATION_RATE / x
        rest = abs(f(y_end)) / x
        weighted = at * (y_end - 1.0) > 2.0 * math.pi
        for weight, trig, sink, sign in (("cos", math.cos, re_parts, 1.0), ("sin", math.sin, im_parts, -1.0)):
            if weighted:
                v, e = _quad(f, 1.0, y_end, weight=weight, wvar=t, epsabs=QUAD_EPSABS, limit=2000)
            else:
                v, e = _quad(lambda y: f(y) * trig(t * y), 1.0, y_end, **opts)
            sink.append(sign * v)
            errs.append(e + rest)
    return complex(math.fsum(re_parts), math.fsum(im_parts)), math.fsum(errs)


class Measure:
    """Interface shared by all Lévy measure variants."""

    name = "measure"

    def laplace(self, z):
        raise NotImplementedError

    def d1(self, z):
        raise NotImplementedError

    def d2(self, z):
        raise NotImplementedError

    def tail(self, y):
        raise NotImplementedError

    def all_derivs(self, z):
        """(laplace, d1, d2) at once; variants override to share work."""
        return self.laplace(z), self.d1(z), self.d2(z)

    def density(self, y):
        raise NotImplementedError(f"{self.name} has no density")

    @property
    def mass(self) -> float:
        """Total mass μ̄(0+); infinite for infinite activity."""
        raise NotImplementedError

    @property
    def mean(self) -> float:
        """∫ y μ(dy), the jump contribution to φ'(0+)."""
        raise NotImplementedError

    @property
    def limit_at_infinity(self) -> float:
        """lim φ(λ) - q as λ → ∞ for the jump part, i.e. μ̄(0+)."""
        return self.mass

    def integrated_tail(self, x):
        """I(x) = ∫_0^x μ̄(y) dy."""
        return integrate.quad(self.tail, 0.0, x, epsabs=1e-14, epsrel=1e-11, limit=500)[0]

    def small_jumps_integrable(self) -> bool:
        """Whether ∫_0^1 μ(dv)/v is finite."""
        raise NotImplementedError

    def inverse_tail(self, u):
        """Solve μ̄(y) = u for y (vectorised); used to sample jump sizes."""
        u = np.asarray(u, dtype=float)
        lo = np.full(u.shape, 1e-300)
        hi = np.ones(u.shape)
        # grow upper bracket until tail drops below target
        for _ in range(2000):
            bad = np.asarray(self.tail(hi)) > u
            if not bad.any():
                break
            hi = np.where(bad, hi * 2.0, hi)
        llo, lhi = np.log(lo), np.log(hi)
        for _ in range(200):
            mid = 0.5 * (llo + lhi)
            above = np.asarray(self.tail(np.exp(mid))) > u
            llo = np.where(above, mid, llo)
            lhi = np.where(above, lhi, mid)
            if np.all(lhi - llo < 1e-13):
                break
        return np.exp(0.5 * (llo + lhi))


@dataclass(frozen=True)
class NoJumps(Measure):
    """μ = 0: the pure killing (or pure drift) case."""

    name = "pure_kill"

    def laplace(self, z):
        return np.zeros_like(np.asarray(z, dtype=complex))

    d1 = laplace
    d2 = laplace

    def tail(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))

    def integrated_tail(self, x):
        return 0.0

    @property
    def mass(self):
        return 0.0

    @property
    def mean(self):
        return 0.0

    def small_jumps_integrable(self):
        return True


@dataclass(frozen=True)
class Stable(Measure):
    """φ(λ) = c λ^α, μ(dy) = cα/Γ(1-α) y^{-1-α} dy."""

    c: float
    alpha: float
    name = "stable"

    def __post_init__(self):
        if not (self.c > 0 and 0 < self.alpha < 1):
            raise ConfigError("stable needs c > 0 and 0 < alpha < 1")

    def laplace(self, z):
        return self.c * np.power(np.asarray(z, dtype=complex), self.alpha)

    def d1(self, z):
        return self.c * self.alpha * np.power(np.asarray(z, dtype=complex), self.alpha - 1)

    def d2(self, z):
        a = self.alpha
        return self.c * a * (a - 1) * np.power(np.asarray(z, dtype=complex), a - 2)

    def all_derivs(self, z):
        z = np.asarray(z, dtype=complex)
        a = self.alpha
        f0 = self.c * np.power(z, a)
        f1 = a * f0 / z
        return f0, f1, (a - 1) * f1 / z

    def tail(self, y):
        return self.c * np.power(y, -self.alpha) / special.gamma(1 - self.alpha)

    def density(self, y):
        a = self.alpha
        return self.c * a / special.gamma(1 - a) * np.power(y, -1 - a)

    def integrated_tail(self, x):
        return self.c * x ** (1 - self.alpha) / special.gamma(2 - self.alpha)

    def inverse_tail(self, u):
        return np.power(np.asarray(u) * special.gamma(1 - self.alpha) / self.c, -1.0 / self.alpha)

    @property
    def mass(self):
        return math.inf

    @property
    def mean(self):
        return math.inf

    def small_jumps_integrable(self):
        return False


@dataclass(frozen=True)
class GammaSub(Measure):
    """φ(λ) = a log(1 + λ/b), μ(dy) = a y^{-1} e^{-by} dy."""

    a: float
    b: float
    name = "gamma_sub"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ConfigError("gamma_sub needs a > 0 and b > 0")

    def laplace(self, z):
        return self.a * np.log1p(np.asarray(z, dtype=complex) / self.b)

    def d1(self, z):
        return self.a / (self.b + np.asarray(z, dtype=complex))

    def d2(self, z):
        return -self.a / (self.b + np.asarray(z, dtype=complex)) ** 2

    def tail(self, y):
        return self.a * special.exp1(self.b * np.asarray(y, dtype=float))

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return self.a * np.exp(-self.b * y) / y

    def integrated_tail(self, x):
        bx = self.b * x
        return self.a * (x * special.exp1(bx) - math.expm1(-bx) / self.b)

    @property
    def mass(self):
        return math.inf

    @property
    def mean(self):
        return self.a / self.b

    def small_jumps_integrable(self):
        return False


@dataclass(frozen=True)
class ExpJumpCPP(Measure):
    """Compound Poisson, jump rate ``rate``, exponential jumps of mean ``scale``.

    φ(λ) = rate·scale·λ / (1 + scale·λ).
    """

    rate: float
    scale: float
    name = "exp_jump_cpp"

    def __post_init__(self):
        if not (self.rate > 0 and self.scale > 0):
            raise ConfigError("exp_jump_cpp needs rate > 0 and scale > 0")

    def laplace(self, z):
        sz = self.scale * np.asarray(z, dtype=complex)
        return self.rate * sz / (1 + sz)

    def d1(self, z):
        sz = self.scale * np.asarray(z, dtype=complex)
        return self.rate * self.scale / (1 + sz) ** 2

    def d2(self, z):
        sz = self.scale * np.asarray(z, dtype=complex)
        return -2 * self.rate * self.scale**2 / (1 + sz) ** 3

    def tail(self, y):
        return self.rate * np.exp(-np.asarray(y, dtype=float) / self.scale)

    def density(self, y):
        return self.rate / self.scale * np.exp(-np.asarray(y, dtype=float) / self.scale)

    def integrated_tail(self, x):
        return -self.rate * self.scale * math.expm1(-x / self.scale)

    def inverse_tail(self, u):
        return -self.scale * np.log(np.asarray(u) / self.rate)

    @property
    def mass(self):
        return self.rate

    @property
    def mean(self):
        return self.rate * self.scale

    def small_jumps_integrable(self):
        return False

    def sample_jumps(self, rng, size):
        return rng.exponential(self.scale, size)


@dataclass(frozen=True)
class Atoms(Measure):
    """Finitely many jump sizes: μ = Σ w_k δ_{y_k}."""

    locations: tuple
    masses: tuple
    name = "cpp_atoms"

    def __post_init__(self):
        locs = tuple(float(v) for v in self.locations)
        ms = tuple(float(v) for v in self.masses)
        if len(locs) == 0 or len(locs) != len(ms):
            raise ConfigError("atoms need matching, non-empty locations and masses")
        if any(v <= 0 for v in locs) or any(w <= 0 for w in ms):
            raise ConfigError("atom locations and masses must be positive")
        if len(set(locs)) != len(locs):
            raise ConfigError("atom locations must be distinct")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "masses", ms)

    def _grid(self, z):
        z = np.asarray(z, dtype=complex)
        y = np.asarray(self.locations)
        return z[..., None] * y, y, np.asarray(self.masses)

    def laplace(self, z):
        zy, _, w = self._grid(z)
        return np.sum(-w * np.expm1(-zy), axis=-1)

    def d1(self, z):
        zy, y, w = self._grid(z)
        return np.sum(w * y * np.exp(-zy), axis=-1)

    def d2(self, z):
        zy, y, w = self._grid(z)
        return np.sum(-w * y * y * np.exp(-zy), axis=-1)

    def tail(self, y):
        y = np.asarray(y, dtype=float)
        locs = np.asarray(self.locations)
        return np.sum(np.where(locs > y[..., None], np.asarray(self.masses), 0.0), axis=-1)

    def integrated_tail(self, x):
        return float(sum(w * min(x, y) for y, w in zip(self.locations, self.masses)))

    @property
    def mass(self):
        return float(sum(self.masses))

    @property
    def mean(self):
        return float(sum(w * y for y, w in zip(self.locations, self.masses)))

    def small_jumps_integrable(self):
        return True

    def sample_jumps(self, rng, size):
        p = np.asarray(self.masses) / self.mass
        return np.asarray(self.locations)[rng.choice(len(p), size=size, p=p)]


@dataclass(frozen=True)
class Density(Measure):
    """Absolutely continuous μ(dy) = m(y) dy given by callables.

    ``tail_fn`` must be the exact tail ∫_y^∞ m. Everything is evaluated by
    quadrature against the tail: φ(z) = z L0, φ'(z) = L0 - z L1 and
    φ''(z) = z L2 - 2 L1 with Lk = ∫ y^k μ̄(y) e^{-zy} dy. Below Y_MIN the
    factor e^{-zy} is replaced by 1, so that piece of L0 is
    ``integrated_tail_fn(Y_MIN)`` when given and is dropped otherwise.
    ``rv_index`` is the index of regular variation of μ̄ at 0 when known.
    """

    density_fn: Callable = field(repr=False)
    tail_fn: Callable = field(repr=False)
    rv_index: Optional[float] = None
    label: str = "custom_density"
    integrated_tail_fn: Optional[Callable] = field(default=None, repr=False)
    name = "custom_density"

    Y_MIN = 1e-250

    def tail(self, y):
        return np.vectorize(lambda v: float(self.tail_fn(v)), otypes=[float])(y)

    def density(self, y):
        return np.vectorize(lambda v: float(self.density_fn(v)), otypes=[float])(y)

    def _head(self) -> float:
        if self.integrated_tail_fn is None:
            return 0.0
        return float(self.integrated_tail_fn(self.Y_MIN))

    def _moments(self, z: complex, orders):
        tail = self.tail_fn
        return [
            laplace_integral(lambda y, k=k: y**k * float(tail(y)), z, self.Y_MIN)[0]
            for k in orders
        ]

    def _map(self, fn, z):
        z = np.asarray(z, dtype=complex)
        out = [np.empty(z.shape, dtype=complex) for _ in range(3)]
        for idx, zz in np.ndenumerate(z):
            vals = fn(complex(zz))
            for o, v in zip(out, vals):
                o[idx] = v
        return [o if o.shape else complex(o) for o in out]

    def all_derivs(self, z):
        head = self._head()

        def one(zz):
            L0, L1, L2 = self._moments(zz, (0, 1, 2))
            L0 += head
            return zz * L0, L0 - zz * L1, zz * L2 - 2.0 * L1

        return tuple(self._map(one, z))

    def laplace(self, z):
        head = self._head()
        return self._map(lambda zz: (zz * (self._moments(zz, (0,))[0] + head), 0, 0), z)[0]

    def d1(self, z):
        head = self._head()

        def one(zz):
            L0, L1 = self._moments(zz, (0, 1))
            return (L0 + head - zz * L1, 0, 0)

        return self._map(one, z)[0]

    def d2(self, z):
        def one(zz):
            L1, L2 = self._moments(zz, (1, 2))
            return (zz * L2 - 2.0 * L1, 0, 0)

        return self._map(one, z)[0]

    @property
    def mass(self):
        m0 = float(self.tail_fn(1e-300))
        return m0 if math.isfinite(m0) and m0 < 1e250 else math.inf

    @property
    def mean(self):
        if self.integrated_tail_fn is not None:
            val = float(self.integrated_tail_fn(math.inf))
        else:
            val, _ = integrate.quad(lambda y: float(self.tail_fn(y)), 0.0, math.inf, limit=500)
        return val if val < 1e12 else math.inf

    def integrated_tail(self, x):
        if self.integrated_tail_fn is not None:
            return float(self.integrated_tail_fn(x))
        return integrate.quad(lambda y: float(self.tail_fn(y)), 0.0, x, epsabs=1e-14, epsrel=1e-11, limit=500)[0]

    def small_jumps_integrable(self):
        if not math.isfinite(self.mass):
            return False
        val, err = integrate.quad(lambda v: float(self.density_fn(v)) / v, 0.0, 1.0, limit=500)
        return math.isfinite(val) and val < 1e12


@dataclass(frozen=True)
class CustomAnalytic(Measure):
    """User-supplied analytic triple (laplace, d1, d2) plus tail."""

    laplace_fn: Callable = field(repr=False)
    d1_fn: Callable = field(repr=False)
    d2_fn: Callable = field(repr=False)
    tail_fn: Callable = field(repr=False)
    mass_value: float = math.inf
    mean_value: float = math.inf
    integrable_small_jumps: bool = False
    name = "custom_analytic"

    def laplace(self, z):
        return self.laplace_fn(np.asarray(z, dtype=complex))

    def d1(self, z):
        return self.d1_fn(np.asarray(z, dtype=complex))

    def d2(self, z):
        return self.d2_fn(np.asarray(z, dtype=complex))

    def tail(self, y):
        return self.tail_fn(np.asarray(y, dtype=float))

    @property
    def mass(self):
        return self.mass_value

    @property
    def mean(self):
        return self.mean_value

    def small_jumps_integrable(self):
        return self.integrable_small_jumps
