"""Seeded simulation of I_φ = ∫_0^∞ e^{-ξ_s} ds as an independent oracle."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bernstein import BernsteinSpec
from .errors import BudgetExceeded, ConfigError, DomainError
from .inversion import moment, tail
from .measures import NoJumps


@dataclass(frozen=True)
class SimConfig:
    sample_count: int = 100_000
    seed: int = 0
    jump_threshold: float = 1e-3
    stop_level: float = 1e-8
    worker_count: int = 1
    max_events: int = 1_000_000

    def __post_init__(self):
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")
        if not (0 < self.stop_level <= 1e-6):
            raise ConfigError("stop_level must lie in (0, 1e-6]")
        if not self.jump_threshold > 0:
            raise ConfigError("jump_threshold must be positive")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be >= 1")


@dataclass
class SampleBatch:
    draws: np.ndarray
    config: SimConfig
    scheme: str
    bias_bound: float
    scheme_bias: bool
    summary: dict = field(init=False)

    def __post_init__(self):
        self.summary = summarize(self.draws)

    def to_dict(self) -> dict:
        return {
            "summary": self.summary,
            "config": asdict(self.config),
            "scheme": self.scheme,
            "truncation_bias_bound": self.bias_bound,
            "scheme_bias_unquantified": self.scheme_bias,
        }

    def write_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["draw"])
            for v in self.draws:
                w.writerow([repr(float(v))])
        finally:
            if own:
                fh.close()

    def write_json(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)


def summarize(draws) -> dict:
    d = np.asarray(draws, dtype=float)
    n = d.size
    var = float(d.var(ddof=1)) if n > 1 else 0.0
    q = np.quantile(d, [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
    return {
        "count": int(n),
        "mean": float(d.mean()),
        "variance": var,
        "std_err": math.sqrt(var / n) if n > 1 else math.inf,
        "quantiles": dict(zip(["q01", "q10", "q25", "q50", "q75", "q90", "q99"], map(float, q))),
    }


# ---------------------------------------------------------------------------
# path schemes


def _jump_sampler(spec: BernsteinSpec, eps: float):
    """(rate, sampler(rng, k)) for the jumps that are simulated exactly."""
    m = spec.measure
    if isinstance(m, NoJumps):
        return 0.0, None
    if hasattr(m, "sample_jumps"):
        return m.mass, m.sample_jumps
    if spec.is_compound_poisson:
        rate = m.mass
        return rate, lambda rng, k: m.inverse_tail(rate * (1.0 - rng.random(k)))
    rate = float(m.tail(eps))
    return rate, lambda rng, k: m.inverse_tail(rate * (1.0 - rng.random(k)))


def _small_jump_drift(spec: BernsteinSpec, eps: float) -> float:
    """∫_0^ε y μ(dy) = ∫_0^ε μ̄ - ε μ̄(ε)."""
    m = spec.measure
    return max(float(m.integrated_tail(eps)) - eps * float(m.tail(eps)), 0.0)


def _simulate(spec: BernsteinSpec, cfg: SimConfig, rng: np.random.Generator, count: int) -> np.ndarray:
    exact = spec.is_compound_poisson
    rate, sampler = _jump_sampler(spec, cfg.jump_threshold)
    drift = 0.0 if exact else _small_jump_drift(spec, cfg.jump_threshold)
    q = spec.q
    total = rate + q
    if total <= 0:
        raise DomainError("trivial spec: I_φ is infinite")
    level = -math.log(cfg.stop_level)

    S = np.zeros(count)
    out = np.zeros(count)
    idx = np.arange(count)
    for _ in range(cfg.max_events):
        if idx.size == 0:
            return out
        k = idx.size
        tau = rng.exponential(1.0 / total, k)
        s = S[idx]
        if drift > 0:
            out[idx] += np.exp(-s) * -np.expm1(-drift * tau) / drift
            s = s + drift * tau
        else:
            out[idx] += np.exp(-s) * tau
        killed = rng.random(k) * total < q
        if sampler is not None:
            jumps = np.zeros(k)
            alive = ~killed
            jumps[alive] = sampler(rng, int(alive.sum()))
            s = s + jumps
        S[idx] = s
        idx = idx[~killed & (s < level)]
    raise BudgetExceeded(f"{idx.size} paths still running after {cfg.max_events} events")


def sample_batch(spec: BernsteinSpec, config: SimConfig) -> SampleBatch:
    """Draw config.sample_count copies of I_φ.

    Compound Poisson (and pure killing) paths are simulated event by event
    and exactly up to the stop level; infinite-activity measures simulate
    jumps above the threshold exactly and replace smaller ones by their mean
    drift. Each worker uses its own sub-stream of SeedSequence(seed); draws
    are concatenated in worker order.
    """
    if spec.d != 0:
        raise DomainError("simulation is implemented for driftless specs only (d = 0)")
    W = config.worker_count
    seeds = np.random.SeedSequence(config.seed).spawn(W)
    counts = [config.sample_count // W + (1 if w < config.sample_count % W else 0) for w in range(W)]

    def run(w):
        return _simulate(spec, config, np.random.default_rng(seeds[w]), counts[w])

    if W == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=W) as pool:
            parts = list(pool.map(run, range(W)))
    draws = np.concatenate(parts)
    exact = spec.is_compound_poisson
    try:
        bias = config.stop_level * moment(spec, 1)
    except Exception:
        bias = math.nan
    return SampleBatch(
        draws=draws,
        config=config,
        scheme="compound_poisson_exact" if exact else "threshold_mean_drift",
        bias_bound=bias,
        scheme_bias=not exact,
    )


@dataclass(frozen=True)
class CompareRow:
    x: float
    empirical_tail: float
    inverted_tail: float
    std_err: float
    z_score: float
    flagged: bool


def compare_to_inversion(spec: BernsteinSpec, config: SimConfig, xs, batch: SampleBatch | None = None, tol: float = 1e-10) -> list[CompareRow]:
    """Empirical vs inverted P(I > x); the standard error uses the inverted tail."""
    xs = [float(v) for v in xs]
    if not xs:
        return []
    if batch is None:
        batch = sample_batch(spec, config)
    d = np.sort(batch.draws)
    N = d.size
    rows = []
    for x in xs:
        emp = float(N - np.searchsorted(d, x, side="right")) / N
        inv = tail(spec, x, tol).value
        p = min(max(inv, 0.0), 1.0)
        se = math.sqrt(max(p * (1 - p), 1e-300) / N)
        z = (emp - inv) / se
        rows.append(CompareRow(x, emp, inv, se, z, abs(z) > 4))
    return rows


__all__ = [
    "SimConfig",
    "SampleBatch",
    "CompareRow",
    "sample_batch",
    "compare_to_inversion",
    "summarize",
]
