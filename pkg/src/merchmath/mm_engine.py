"""Trading-cycle quantities and the fixed-point solver for the withdrawal price.

A cycle is one rational transaction, accepted only when the quotation is
favourable (buyer: p <= -a, seller: p >= a), followed by one random reverse
transaction.  Each attempt takes on average ``theta`` time units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .distributions import LOWER, UPPER, PriceDistribution
from .errors import DegenerateStrategyError, InvalidParameterError, NoFixedPointError

BUYER = "buyer"
SELLER = "seller"

# acceptance probabilities below this count as zero
MIN_ACCEPTANCE = 1e-12


@dataclass(frozen=True)
class MMConfig:
    """Market law, withdrawal price and timing for one trader.

    Attributes:
        dist: log-price law of the rest of the world.
        withdrawal: threshold ``a``; the buyer accepts p <= -a, the seller p >= a.
        theta: mean duration of a single transaction attempt, > 0.
        orientation: ``"buyer"`` or ``"seller"``.
    """

    dist: PriceDistribution
    withdrawal: float = 0.0
    theta: float = 1.0
    orientation: str = BUYER

    def __post_init__(self):
        if not isinstance(self.dist, PriceDistribution):
            raise InvalidParameterError("dist must be a PriceDistribution")
        if not math.isfinite(self.withdrawal):
            raise InvalidParameterError("withdrawal price must be finite")
        if not (self.theta > 0) or not math.isfinite(self.theta):
            raise InvalidParameterError(f"theta must be positive, got {self.theta}")
        if self.orientation not in (BUYER, SELLER):
            raise InvalidParameterError(f"orientation must be buyer or seller, got {self.orientation!r}")

    def at(self, withdrawal: float) -> "MMConfig":
        return replace(self, withdrawal=float(withdrawal))


@dataclass
class FixedPointResult:
    a_max: float
    rho_at_max: float
    iterations: int
    trace: list = field(default_factory=list)
    converged: bool = False
    residual: float = math.inf
    method: str = "iteration"


def acceptance_prob(cfg: MMConfig) -> float:
    """Chance a single quotation satisfies the rational-side condition."""
    if cfg.orientation == BUYER:
        return float(cfg.dist.cdf(-cfg.withdrawal))
    return float(cfg.dist.sf(cfg.withdrawal))


def non_transaction_prob(cfg: MMConfig) -> float:
    return 1.0 - acceptance_prob(cfg)


def expected_cycle_length(cfg: MMConfig) -> float:
    """(1 + 1 / acceptance) * theta.

    Raises:
        DegenerateStrategyError: the rational side is never accepted.
    """
    q = acceptance_prob(cfg)
    if q < MIN_ACCEPTANCE:
        raise DegenerateStrategyError(
            f"acceptance probability {q:.3g} at a={cfg.withdrawal}: expected wait is infinite"
        )
    return (1.0 + 1.0 / q) * cfg.theta


def cycle_profit(cfg: MMConfig) -> float:
    """Expected log-return of one cycle, rho_eta(a).

    Buyer:  -int_{-inf}^{-a} p eta / (1 + int_{-inf}^{-a} eta)
    Seller:  int_{a}^{inf}  p eta / (1 + int_{a}^{inf}  eta)

    The random reverse leg contributes E(p), taken as zero as for a centred
    market; no correction is added for uncentred laws.
    """
    a = cfg.withdrawal
    if cfg.orientation == BUYER:
        moment = -cfg.dist.partial_first_moment(-a, LOWER)
    else:
        moment = cfg.dist.partial_first_moment(a, UPPER)
    return moment / (1.0 + acceptance_prob(cfg))


def profit_intensity(cfg: MMConfig) -> float:
    """Expected profit per unit time, rho_eta(a) / theta.

    For a centred law this equals E(r) / E(tau), the Wald ratio.
    """
    return cycle_profit(cfg) / cfg.theta


def expected_return(cfg: MMConfig) -> float:
    """E(r) of one cycle, including the mean of the random reverse leg.

    Raises:
        DegenerateStrategyError: the rational side is never accepted.
    """
    q = acceptance_prob(cfg)
    if q < MIN_ACCEPTANCE:
        raise DegenerateStrategyError(f"acceptance probability {q:.3g} at a={cfg.withdrawal}")
    a = cfg.withdrawal
    if cfg.orientation == BUYER:
        accepted_mean = cfg.dist.partial_first_moment(-a, LOWER) / q
        return cfg.dist.mean() - accepted_mean
    accepted_mean = cfg.dist.partial_first_moment(a, UPPER) / q
    return accepted_mean - cfg.dist.mean()


def accumulate_profit(intensity: float, horizon: float) -> float:
    if horizon < 0:
        raise InvalidParameterError(f"horizon must be >= 0, got {horizon}")
    return intensity * horizon


def log_return(p_buy: float, p_sell: float) -> float:
    return p_sell - p_buy


def _abs_quantile(dist: PriceDistribution, level: float) -> float:
    """Level-quantile of |p| by bisection on cdf(q) - cdf(-q)."""
    lo_q, hi_q = dist.quantile(1e-12), dist.quantile(1.0 - 1e-12)
    hi = max(abs(float(lo_q)), abs(float(hi_q)))
    if not math.isfinite(hi):
        hi = max(abs(float(dist.quantile(1e-9))), abs(float(dist.quantile(1 - 1e-9))))
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mass = float(dist.cdf(mid)) - float(dist.cdf(-mid))
        if mass < level:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return hi


def _bisect(g, lo, hi, g_lo, tol, trace, max_steps=400):
    a, value = lo, g_lo
    for step in range(1, max_steps + 1):
        a = 0.5 * (lo + hi)
        value = g(a)
        trace.append((a, a + value))
        if abs(value) <= tol or hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi), 1.0)):
            return a, value, step
        if (value > 0) == (g_lo > 0):
            lo, g_lo = a, value
        else:
            hi = a
    return a, value, max_steps


def solve_fixed_point(
    cfg: MMConfig,
    tol: float = 1e-10,
    max_iter: int = 200,
    damping: float = 0.5,
    start: float | None = None,
    stall_limit: int = 5,
) -> FixedPointResult:
    """Find a_max with rho(a_max) = a_max.

    Runs the damped iteration ``a <- (1 - damping) a + damping rho(a)``.  After
    ``stall_limit`` steps that fail to shrink |rho(a) - a|, or when
    ``max_iter`` is exhausted, it falls back to bisection on
    g(a) = rho(a) - a over [0, q99], q99 being the 0.99 quantile of |p|.

    The maximality guarantee holds for centred laws (E p = 0); other
    finite-mean laws are solved all the same.

    Raises:
        InvalidParameterError: bad tolerance or damping.
        NoFixedPointError: g keeps one sign over the widened bracket.
    """
    if not (tol > 0):
        raise InvalidParameterError("tol must be positive")
    if not (0 < damping < 2):
        raise InvalidParameterError("damping must lie in (0, 2)")
    if max_iter < 0:
        raise InvalidParameterError("max_iter must be >= 0")

    def rho(a):
        return cycle_profit(cfg.at(a))

    trace = []
    a = 0.0 if start is None else float(start)
    stalls = 0
    previous = math.inf
    for it in range(1, max_iter + 1):
        r = rho(a)
        trace.append((a, r))
        residual = abs(r - a)
        if not math.isfinite(r):
            break
        if residual <= tol:
            return FixedPointResult(a, r, it, trace, True, residual, "iteration")
        if residual >= previous:
            stalls += 1
            if stalls >= stall_limit:
                break
        previous = residual
        a = (1.0 - damping) * a + damping * r

    def g(x):
        return rho(x) - x

    lo = 0.0
    hi = _abs_quantile(cfg.dist, 0.99)
    g_lo, g_hi = g(lo), g(hi)
    for _ in range(60):
        if g_lo * g_hi <= 0:
            break
        width = hi - lo
        lo, hi = lo - width, hi + width
        g_lo, g_hi = g(lo), g(hi)
    else:
        raise NoFixedPointError(f"rho(a) - a keeps one sign on [{lo:g}, {hi:g}]")
    if g_lo == 0:
        return FixedPointResult(lo, lo, len(trace), trace, True, 0.0, "bisection")
    a, value, steps = _bisect(g, lo, hi, g_lo, tol, trace)
    residual = abs(value)
    return FixedPointResult(a, a + value, len(trace), trace, residual <= tol, residual, "bisection")
