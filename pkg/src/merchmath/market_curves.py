"""Supply/demand curves (Cournot convention), equilibrium price, cross-ratio."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .distributions import PriceDistribution
from .errors import DegenerateLineError, InvalidParameterError, NoEquilibriumError


class ConsistencyWarning(UserWarning):
    """Supply and demand laws differ although equilibrium assumes they agree."""


@dataclass(frozen=True)
class MarketPair:
    eta_s: PriceDistribution
    eta_d: PriceDistribution

    @classmethod
    def symmetric(cls, dist: PriceDistribution) -> "MarketPair":
        return cls(dist, dist)


@dataclass(frozen=True)
class PortfolioPoint:
    money_amount: float
    asset_log_price: float

    def __post_init__(self):
        if not (self.money_amount > 0) or not math.isfinite(self.money_amount):
            raise InvalidParameterError(f"money amount must be positive, got {self.money_amount}")
        if not math.isfinite(self.asset_log_price):
            raise InvalidParameterError("asset log-price must be finite")


@dataclass(frozen=True)
class Equilibrium:
    price: float
    supply: float
    demand: float
    consistent: bool
    max_law_gap: float


def supply_curve(mp: MarketPair, x):
    """Pr(xi <= x) under the supply law."""
    return mp.eta_s.cdf(x)


def demand_curve(mp: MarketPair, x):
    """Tail mass of the demand law above x."""
    return mp.eta_d.sf(x)


def _grid(mp: MarketPair, n: int = 201):
    lo = min(float(mp.eta_s.quantile(1e-6)), float(mp.eta_d.quantile(1e-6)))
    hi = max(float(mp.eta_s.quantile(1 - 1e-6)), float(mp.eta_d.quantile(1 - 1e-6)))
    return np.linspace(lo, hi, n)


def law_gap(mp: MarketPair) -> float:
    """Largest cdf difference between the two laws on a quantile grid."""
    x = _grid(mp)
    return float(np.max(np.abs(np.asarray(mp.eta_s.cdf(x)) - np.asarray(mp.eta_d.cdf(x)))))


def equilibrium_price(mp: MarketPair, xtol: float = 1e-12, gap_tol: float = 1e-9) -> Equilibrium:
    """Log-price where supply equals demand.

    With identical laws this is the common median.  Differing laws still get
    a crossing, flagged as inconsistent with a :class:`ConsistencyWarning`.

    Raises:
        NoEquilibriumError: the curves do not cross.
    """
    gap = law_gap(mp)
    consistent = gap <= gap_tol
    if not consistent:
        warnings.warn(f"supply and demand laws differ by up to {gap:.3g}", ConsistencyWarning, stacklevel=2)

    def excess(y):
        return float(supply_curve(mp, y)) - float(demand_curve(mp, y))

    lo = min(float(mp.eta_s.quantile(1e-12)), float(mp.eta_d.quantile(1e-12)))
    hi = max(float(mp.eta_s.quantile(1 - 1e-12)), float(mp.eta_d.quantile(1 - 1e-12)))
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo == 0:
        y = lo
    elif f_hi == 0:
        y = hi
    elif f_lo * f_hi > 0:
        raise NoEquilibriumError("supply and demand curves do not cross")
    else:
        y = optimize.brentq(excess, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    return Equilibrium(y, float(supply_curve(mp, y)), float(demand_curve(mp, y)), consistent, gap)


def curve_table(mp: MarketPair, n: int = 101, marshall: bool = False) -> list[dict]:
    """Sampled curves; Marshall convention swaps price onto the ordinate."""
    rows = []
    for x in _grid(mp, n):
        s, d = float(supply_curve(mp, x)), float(demand_curve(mp, x))
        if marshall:
            rows.append({"supply": s, "demand": d, "log_price": float(x)})
        else:
            rows.append({"log_price": float(x), "supply": s, "demand": d})
    return rows


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def log_cross_ratio(buy: PortfolioPoint, sell: PortfolioPoint) -> float:
    """Logarithm of the cross ratio [asset, U_buy, U_sell, money] on the line U_buy U_sell.

    Points on the line are u(l) = l U_buy + (1 - l) U_sell.  The one-asset
    portfolios sit at l_money = w / (w - v) and
    l_asset = w e^{p_sell} / (w e^{p_sell} - v e^{p_buy}); U_buy and U_sell
    are l = 1 and l = 0.  Parameters are kept homogeneous so that either
    crossing may lie at infinity, and the determinants are formed in exact
    rational arithmetic so no cancellation enters before the logarithm.

    Raises:
        DegenerateLineError: both portfolios are the same point.
    """
    v, pb = buy.money_amount, buy.asset_log_price
    w, ps = sell.money_amount, sell.asset_log_price
    if v == w and pb == ps:
        raise DegenerateLineError("buy and sell portfolios coincide; no line joins them")
    # shift prices so the exponentials stay in range
    ref = max(pb, ps)
    eb, es = Fraction(math.exp(pb - ref)), Fraction(math.exp(ps - ref))
    v, w = Fraction(v), Fraction(w)
    asset = (w * es, w * es - v * eb)
    u_buy = (Fraction(1), Fraction(1))
    u_sell = (Fraction(0), Fraction(1))
    money = (w, w - v)
    ratio = (_det(asset, u_sell) * _det(u_buy, money)) / (_det(asset, u_buy) * _det(u_sell, money))
    return math.log(ratio.numerator) - math.log(ratio.denominator)
