"""Seeded Monte Carlo of the trading cycle.

Each cycle draws quotations from eta until the rational side accepts one
(every draw costs theta), then makes one random reverse transaction
(another theta).  Uniforms come from numpy's counter-based Philox
generator and are mapped through the distribution's quantile function, so
a run is fully determined by (config, seed, shards).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateStrategyError, InvalidParameterError
from .mm_engine import BUYER, MIN_ACCEPTANCE, MMConfig, acceptance_prob

MAX_DRAWS_PER_CYCLE = 10**9
N_BATCHES = 100


@dataclass(frozen=True)
class SimConfig:
    mm: MMConfig
    n_cycles: int
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise InvalidParameterError(f"n_cycles must be a positive integer, got {self.n_cycles}")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")
        if int(self.shards) < 1 or self.shards > self.n_cycles:
            raise InvalidParameterError("shards must lie in [1, n_cycles]")


@dataclass(frozen=True)
class CycleStats:
    """Monte Carlo estimates with batch-means standard errors."""

    n_cycles: int
    mean_tau: float
    mean_return: float
    intensity_estimate: float
    se_return: float
    se_tau: float
    se_intensity: float
    wald_residual: float
    wald_var_residual: float
    se_wald: float
    se_wald_var: float
    acceptance_rate: float
    first_draw_fraction: float
    se_first_draw: float

    def as_dict(self):
        return asdict(self)


@dataclass
class CycleSample:
    """Per-cycle raw draws: rational attempts, accepted and random quotations."""

    attempts: np.ndarray
    accepted: np.ndarray
    reverse: np.ndarray


def _uniform_open(rng: np.random.Generator, n: int) -> np.ndarray:
    # 53-bit midpoints: never exactly 0 or 1, so quantiles stay finite
    bits = rng.integers(0, 2**63, size=n, dtype=np.uint64, endpoint=False) >> np.uint64(10)
    return (bits.astype(np.float64) + 0.5) * 2.0**-53


def _simulate_block(mm: MMConfig, n: int, rng: np.random.Generator) -> CycleSample:
    dist, a = mm.dist, mm.withdrawal
    attempts = np.zeros(n, dtype=np.int64)
    accepted = np.empty(n)
    active = np.arange(n)
    rounds = 0
    while active.size:
        rounds += 1
        if rounds > MAX_DRAWS_PER_CYCLE:
            raise DegenerateStrategyError(f"a cycle exceeded {MAX_DRAWS_PER_CYCLE} draws")
        p = np.asarray(dist.quantile(_uniform_open(rng, active.size)), dtype=float)
        attempts[active] += 1
        ok = p <= -a if mm.orientation == BUYER else p >= a
        accepted[active[ok]] = p[ok]
        active = active[~ok]
    reverse = np.asarray(dist.quantile(_uniform_open(rng, n)), dtype=float)
    return CycleSample(attempts, accepted, reverse)


def _shard_sizes(n: int, shards: int) -> list[int]:
    base, extra = divmod(n, shards)
    return [base + (k < extra) for k in range(shards)]


def draw_cycles(cfg: SimConfig) -> CycleSample:
    """Raw per-cycle draws, concatenated over shards in shard order.

    Raises:
        DegenerateStrategyError: the rational side is (numerically) never accepted.
    """
    q = acceptance_prob(cfg.mm)
    if q < MIN_ACCEPTANCE:
        raise DegenerateStrategyError(f"acceptance probability {q:.3g}: cycles never complete")
    if cfg.shards == 1:
        return _simulate_block(cfg.mm, cfg.n_cycles, np.random.Generator(np.random.Philox(cfg.seed)))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.shards)
    sizes = _shard_sizes(cfg.n_cycles, cfg.shards)
    with ThreadPoolExecutor(max_workers=cfg.shards) as pool:
        parts = list(pool.map(
            lambda job: _simulate_block(cfg.mm, job[0], np.random.Generator(np.random.Philox(job[1]))),
            zip(sizes, seeds),
        ))
    return CycleSample(
        np.concatenate([s.attempts for s in parts]),
        np.concatenate([s.accepted for s in parts]),
        np.concatenate([s.reverse for s in parts]),
    )


def _batch_se(values: np.ndarray) -> float:
    b = values.size
    return float(np.std(values, ddof=1) / math.sqrt(b)) if b > 1 else math.inf


def _wald_pieces(stopped, attempts, increments):
    """Wald and second-moment residuals for one set of cycles.

    The increments X_k = sign * p_k * [p_k accepted] are i.i.d. over rational
    attempts, the attempt count N is a stopping time for them, and S_N is the
    signed accepted quotation.  E(X) and Var(X) are estimated from
    ``increments``, an independent sample of X, so the identity is tested
    rather than assumed.
    """
    mean_x = increments.mean()
    var_x = increments.var()
    mean_n = attempts.mean()
    residual = stopped.mean() - mean_x * mean_n
    var_residual = np.mean((stopped - attempts * mean_x) ** 2) - mean_n * var_x
    return residual, var_residual


def summarize(sample: CycleSample, mm: MMConfig, n_batches: int = N_BATCHES) -> CycleStats:
    theta = mm.theta
    n = sample.attempts.size
    sign = -1.0 if mm.orientation == BUYER else 1.0
    tau = (sample.attempts + 1) * theta
    r = sign * sample.accepted - sign * sample.reverse
    stopped = sign * sample.accepted
    # reverse-leg quotations are fresh i.i.d. draws from eta
    accept = sample.reverse <= -mm.withdrawal if mm.orientation == BUYER else sample.reverse >= mm.withdrawal
    increments = np.where(accept, sign * sample.reverse, 0.0)

    mean_tau, mean_r = float(tau.mean()), float(r.mean())
    res, var_res = _wald_pieces(stopped, sample.attempts, increments)
    first = float(np.mean(sample.attempts == 1))

    b = min(n_batches, n)
    chunks = np.array_split(np.arange(n), b)
    batch_tau = np.array([tau[c].mean() for c in chunks])
    batch_r = np.array([r[c].mean() for c in chunks])
    batch_ratio = batch_r / batch_tau
    batch_wald = np.array([_wald_pieces(stopped[c], sample.attempts[c], increments[c]) for c in chunks])
    return CycleStats(
        n_cycles=n,
        mean_tau=mean_tau,
        mean_return=mean_r,
        intensity_estimate=mean_r / mean_tau,
        se_return=_batch_se(batch_r),
        se_tau=_batch_se(batch_tau),
        se_intensity=_batch_se(batch_ratio),
        wald_residual=float(res),
        wald_var_residual=float(var_res),
        se_wald=_batch_se(batch_wald[:, 0]),
        se_wald_var=_batch_se(batch_wald[:, 1]),
        acceptance_rate=float(n / sample.attempts.sum()),
        first_draw_fraction=first,
        se_first_draw=math.sqrt(first * (1.0 - first) / n),
    )


def simulate(cfg: SimConfig) -> CycleStats:
    return summarize(draw_cycles(cfg), cfg.mm)


def check_wald(cfg: SimConfig) -> tuple[float, float]:
    """(Wald residual, second-moment residual) of a fresh simulation."""
    s = simulate(cfg)
    return s.wald_residual, s.wald_var_residual


def truncated_cdf(mm: MMConfig):
    """Cdf of the accepted quotation: eta restricted to the acceptance region."""
    dist, a = mm.dist, mm.withdrawal
    q = acceptance_prob(mm)
    if mm.orientation == BUYER:
        return lambda x: np.minimum(np.asarray(dist.cdf(np.minimum(x, -a))) / q, 1.0)
    base = float(dist.cdf(a))
    return lambda x: np.clip((np.asarray(dist.cdf(np.maximum(x, a))) - base) / q, 0.0, 1.0)


def accepted_price_ks(cfg: SimConfig):
    """One-sample KS test of accepted quotations against the truncated law."""
    sample = draw_cycles(cfg)
    return stats.kstest(sample.accepted, truncated_cdf(cfg.mm))
