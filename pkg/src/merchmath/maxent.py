"""Maximum-entropy subjective price law and the golden-ratio optimum.

The agent knows only her transaction probability P = Pr(p >= a).  With
support [0, inf) the entropy maximiser is flat on [0, a] and exponential
with temperature T above a:

    pdf(p) = exp(-[p > a] (p - a) / T) / (a + T)

which integrates to P = T / (a + T).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .distributions import LOWER, UPPER, PriceDistribution, _out
from .errors import InvalidParameterError, SolverError
from .quadrature import integrate

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_probability(P):
    if not (0.0 < P < 1.0):
        raise InvalidParameterError(f"probability must lie in (0, 1), got {P}")


class MaxEntModel(PriceDistribution):
    """Flat-then-exponential law with kink at the withdrawal price ``a``."""

    def __init__(self, a: float, T: float):
        a, T = float(a), float(T)
        if not (a >= 0) or not math.isfinite(a):
            raise InvalidParameterError(f"withdrawal price a must be >= 0, got {a}")
        if not (T > 0) or not math.isfinite(T):
            raise InvalidParameterError(f"temperature T must be > 0, got {T}")
        self.a = a
        self.T = T
        self.norm = a + T
        self.kinks = (a,) if a > 0 else ()

    @classmethod
    def from_probability(cls, a: float, P: float) -> "MaxEntModel":
        return cls(a, temperature_from_probability(a, P))

    def __repr__(self):
        return f"MaxEntModel(a={self.a}, T={self.T})"

    @property
    def P(self) -> float:
        """Probability of transaction, the tail mass above ``a``."""
        return self.T / self.norm

    @property
    def support(self):
        return (0.0, math.inf)

    def log_density(self, p):
        x = np.asarray(p, dtype=float)
        excess = np.maximum(x - self.a, 0.0)
        out = -excess / self.T - math.log(self.norm)
        return _out(p, np.where(x < 0, -np.inf, out))

    def density(self, p):
        x = np.asarray(p, dtype=float)
        excess = np.maximum(x - self.a, 0.0)
        return _out(p, np.where(x < 0, 0.0, np.exp(-excess / self.T) / self.norm))

    def sf(self, p):
        x = np.asarray(p, dtype=float)
        flat = (self.a - np.clip(x, 0.0, self.a) + self.T) / self.norm
        tail = self.T * np.exp(-np.maximum(x - self.a, 0.0) / self.T) / self.norm
        return _out(p, np.where(x <= 0, 1.0, np.where(x <= self.a, flat, tail)))

    def cdf(self, p):
        x = np.asarray(p, dtype=float)
        flat = np.clip(x, 0.0, self.a) / self.norm
        tail = 1.0 - self.T * np.exp(-np.maximum(x - self.a, 0.0) / self.T) / self.norm
        return _out(p, np.where(x <= 0, 0.0, np.where(x <= self.a, flat, tail)))

    def quantile(self, u):
        v = np.asarray(u, dtype=float)
        if np.any((v < 0) | (v > 1)):
            raise InvalidParameterError("quantile level must lie in [0, 1]")
        knee = self.a / self.norm
        with np.errstate(divide="ignore"):
            tail = self.a - self.T * np.log((1.0 - v) * self.norm / self.T)
        return _out(u, np.where(v <= knee, v * self.norm, tail))

    def mean(self):
        return self.a * self.a / (2.0 * self.norm) + self.T

    def partial_first_moment(self, bound, side=LOWER):
        if side not in (LOWER, UPPER):
            raise InvalidParameterError(f"side must be {LOWER!r} or {UPPER!r}, got {side!r}")
        b = float(bound)
        if b <= 0:
            upper = self.mean()
        elif b <= self.a:
            upper = (self.a * self.a - b * b) / (2.0 * self.norm) + self.T
        else:
            upper = math.exp(-(b - self.a) / self.T) * (b * self.T + self.T * self.T) / self.norm
        return upper if side == UPPER else self.mean() - upper


def make_maxent(a: float, T: float) -> MaxEntModel:
    return MaxEntModel(a, T)


def probability_from_temperature(a: float, T: float) -> float:
    return T / (a + T)


def temperature_from_probability(a: float, P: float) -> float:
    """Temperature giving tail mass ``P`` above ``a``: T = a P / (1 - P)."""
    if not (a > 0) or not math.isfinite(a):
        raise InvalidParameterError(f"withdrawal price a must be > 0, got {a}")
    _check_probability(P)
    return a * P / (1.0 - P)


def mean_price(m: MaxEntModel) -> float:
    """E(p); equals a (1 + P^2) / (2 (1 - P)) when a > 0."""
    return m.mean()


def perceived_demand(m: MaxEntModel, x: float) -> float:
    """Tail mass above ``x``: chance the market buys at log-price x or higher."""
    if np.any(np.asarray(x) < 0):
        raise InvalidParameterError("perceived demand is defined for x >= 0")
    return m.sf(x)


def golden_optimum() -> float:
    return GOLDEN


def _suro_residual(a: float, P: float) -> float:
    # seller fixed-point condition, integrals by quadrature
    m = MaxEntModel.from_probability(a, P)
    numerator = integrate(lambda p: p * m.density(p), a, math.inf)
    tail = integrate(m.density, a, math.inf)
    return numerator / (1.0 + tail) - a


def golden_optimum_numeric(a: float = 1.0, xtol: float = 1e-13) -> float:
    """Solve the seller's profit-maximality condition for P at fixed ``a``.

    The tail integrals are evaluated by quadrature and the root is bracketed
    in P on (0, 1).

    Raises:
        SolverError: no root in the bracket.
    """
    if not (a > 0):
        raise InvalidParameterError(f"withdrawal price a must be > 0, got {a}")
    lo, hi = 0.05, 0.95
    g_lo, g_hi = _suro_residual(a, lo), _suro_residual(a, hi)
    if g_lo * g_hi > 0:
        raise SolverError(f"no sign change of the optimality residual on [{lo}, {hi}] at a={a}")
    try:
        return optimize.brentq(lambda P: _suro_residual(a, P), lo, hi, xtol=xtol)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(str(exc)) from exc
