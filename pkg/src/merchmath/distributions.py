"""Log-price distributions eta(p).

All distributions accept scalars or numpy arrays and are immutable after
construction.  Partial first moments use closed forms; quadrature is only
the fallback of the base class.
"""

from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
from scipy import special

from .errors import InvalidParameterError
from .quadrature import integrate

LOWER = "lower"
UPPER = "upper"

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _out(x, value):
    """Return a Python float for scalar input, the array otherwise."""
    return float(value) if np.ndim(x) == 0 else value


class PriceDistribution(ABC):
    """Density, cdf, quantile and partial moments of a log-price law."""

    #: interior points where the density is not smooth
    kinks: tuple = ()

    @property
    @abstractmethod
    def support(self) -> tuple[float, float]:
        """(lower, upper) bounds; either may be infinite."""

    @abstractmethod
    def density(self, p):
        ...

    @abstractmethod
    def cdf(self, p):
        ...

    @abstractmethod
    def quantile(self, u):
        ...

    def sf(self, p):
        """Tail mass above ``p``; overridden where 1 - cdf would cancel."""
        return _out(p, 1.0 - np.asarray(self.cdf(p), dtype=float))

    def mean(self) -> float:
        lo, hi = self.support
        return integrate(lambda p: p * self.density(p), lo, hi, points=self.kinks)

    def partial_first_moment(self, bound: float, side: str = LOWER) -> float:
        """Integral of p * density(p) over (-inf, bound] or [bound, inf)."""
        lo, hi = self.support
        f = lambda p: p * self.density(p)  # noqa: E731
        if side == LOWER:
            if bound <= lo:
                return 0.0
            return integrate(f, lo, min(bound, hi), points=self.kinks)
        if side == UPPER:
            if bound >= hi:
                return 0.0
            return integrate(f, max(bound, lo), hi, points=self.kinks)
        raise InvalidParameterError(f"side must be {LOWER!r} or {UPPER!r}, got {side!r}")


class GaussianDist(PriceDistribution):
    """Normal law with mean ``mean`` and standard deviation ``sigma``."""

    def __init__(self, mean: float = 0.0, sigma: float = 1.0):
        mean, sigma = float(mean), float(sigma)
        if not math.isfinite(mean):
            raise InvalidParameterError("mean must be finite")
        if not (sigma > 0) or not math.isfinite(sigma):
            raise InvalidParameterError(f"sigma must be positive, got {sigma}")
        self.mu = mean
        self.sigma = sigma

    def __repr__(self):
        return f"GaussianDist(mean={self.mu}, sigma={self.sigma})"

    @property
    def support(self):
        return (-math.inf, math.inf)

    def _z(self, p):
        return (np.asarray(p, dtype=float) - self.mu) / self.sigma

    def density(self, p):
        z = self._z(p)
        return _out(p, np.exp(-0.5 * z * z) / (_SQRT2PI * self.sigma))

    def cdf(self, p):
        return _out(p, special.ndtr(self._z(p)))

    def sf(self, p):
        return _out(p, special.ndtr(-self._z(p)))

    def quantile(self, u):
        return _out(u, self.mu + self.sigma * special.ndtri(np.asarray(u, dtype=float)))

    def mean(self):
        return self.mu

    def partial_first_moment(self, bound, side=LOWER):
        # upper tail: mu * sf(b) + sigma * phi(z_b)
        z = (bound - self.mu) / self.sigma
        phi = math.exp(-0.5 * z * z) / _SQRT2PI if math.isfinite(z) else 0.0
        if side == UPPER:
            return self.mu * float(special.ndtr(-z)) + self.sigma * phi
        if side == LOWER:
            return self.mu * float(special.ndtr(z)) - self.sigma * phi
        raise InvalidParameterError(f"side must be {LOWER!r} or {UPPER!r}, got {side!r}")


class TabulatedDist(PriceDistribution):
    """Histogram density with piecewise-linear cdf.

    Bins are half-open ``[edge_i, edge_{i+1})`` so the density is
    right-continuous at every edge.
    """

    def __init__(self, edges, masses):
        edges = np.asarray(edges, dtype=float)
        masses = np.asarray(masses, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise InvalidParameterError("need at least two bin edges")
        if not np.all(np.isfinite(edges)):
            raise InvalidParameterError("bin edges must be finite")
        if np.any(np.diff(edges) <= 0):
            raise InvalidParameterError("bin edges must be strictly ascending")
        if masses.shape != (edges.size - 1,):
            raise InvalidParameterError(
                f"expected {edges.size - 1} masses for {edges.size} edges, got {masses.size}"
            )
        if np.any(masses < 0) or not np.all(np.isfinite(masses)):
            raise InvalidParameterError("bin masses must be finite and nonnegative")
        total = masses.sum()
        if total <= 0:
            raise InvalidParameterError("total bin mass must be positive")
        self.edges = edges
        self.masses = masses / total
        self.widths = np.diff(edges)
        self.heights = self.masses / self.widths
        self.cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        self.cum[-1] = 1.0
        self.edges.setflags(write=False)
        self.masses.setflags(write=False)
        self.kinks = tuple(edges[1:-1])

    def __repr__(self):
        return f"TabulatedDist(edges={self.edges.tolist()}, masses={self.masses.tolist()})"

    @property
    def support(self):
        return (float(self.edges[0]), float(self.edges[-1]))

    def _bin(self, p):
        return np.searchsorted(self.edges, p, side="right") - 1

    def density(self, p):
        x = np.asarray(p, dtype=float)
        i = self._bin(x)
        inside = (i >= 0) & (i < self.masses.size)
        h = np.where(inside, self.heights[np.clip(i, 0, self.masses.size - 1)], 0.0)
        return _out(p, h)

    def cdf(self, p):
        x = np.asarray(p, dtype=float)
        i = np.clip(self._bin(x), 0, self.masses.size - 1)
        c = self.cum[i] + self.heights[i] * (x - self.edges[i])
        c = np.where(x < self.edges[0], 0.0, np.where(x >= self.edges[-1], 1.0, c))
        return _out(p, np.clip(c, 0.0, 1.0))

    def quantile(self, u):
        v = np.asarray(u, dtype=float)
        if np.any((v < 0) | (v > 1)):
            raise InvalidParameterError("quantile level must lie in [0, 1]")
        i = np.clip(np.searchsorted(self.cum, v, side="right") - 1, 0, self.masses.size - 1)
        # searchsorted lands on the last bin whose start mass <= u; skip empty bins
        x = self.edges[i] + np.where(
            self.masses[i] > 0, (v - self.cum[i]) / np.where(self.heights[i] > 0, self.heights[i], 1.0), 0.0
        )
        return _out(u, np.clip(x, self.edges[0], self.edges[-1]))

    def mean(self):
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        return float(np.dot(self.masses, mids))

    def partial_first_moment(self, bound, side=LOWER):
        if side not in (LOWER, UPPER):
            raise InvalidParameterError(f"side must be {LOWER!r} or {UPPER!r}, got {side!r}")
        lo = np.clip(self.edges[:-1], -math.inf, bound)
        hi = np.clip(self.edges[1:], -math.inf, bound)
        below = float(np.dot(self.heights, 0.5 * (hi * hi - lo * lo)))
        return below if side == LOWER else self.mean() - below


class ReflectedDist(PriceDistribution):
    """The law of -p when p follows ``base``."""

    def __init__(self, base: PriceDistribution):
        self.base = base
        self.kinks = tuple(-k for k in base.kinks)

    def __repr__(self):
        return f"ReflectedDist({self.base!r})"

    @property
    def support(self):
        lo, hi = self.base.support
        return (-hi, -lo)

    def density(self, p):
        return self.base.density(-np.asarray(p, dtype=float) if np.ndim(p) else -p)

    def cdf(self, p):
        return self.base.sf(-np.asarray(p, dtype=float) if np.ndim(p) else -p)

    def sf(self, p):
        return self.base.cdf(-np.asarray(p, dtype=float) if np.ndim(p) else -p)

    def quantile(self, u):
        v = np.asarray(u, dtype=float)
        return _out(u, -np.asarray(self.base.quantile(1.0 - v), dtype=float))

    def mean(self):
        return -self.base.mean()

    def partial_first_moment(self, bound, side=LOWER):
        if side == LOWER:
            return -self.base.partial_first_moment(-bound, UPPER)
        if side == UPPER:
            return -self.base.partial_first_moment(-bound, LOWER)
        raise InvalidParameterError(f"side must be {LOWER!r} or {UPPER!r}, got {side!r}")


def make_gaussian(mean: float, sigma: float) -> GaussianDist:
    return GaussianDist(mean, sigma)


def make_tabulated(edges, masses) -> TabulatedDist:
    return TabulatedDist(edges, masses)


def make_uniform(lo: float, hi: float) -> TabulatedDist:
    """Uniform law on [lo, hi] as a one-bin histogram."""
    return TabulatedDist([lo, hi], [1.0])


def reflect(dist: PriceDistribution) -> ReflectedDist:
    return ReflectedDist(dist)


def load_tabulated_csv(path) -> TabulatedDist:
    """Read an ``edge,mass`` CSV.

    One row per edge; the mass on a row belongs to the bin starting at that
    edge, so the final row's mass cell must be empty (or the column absent).

    Raises:
        InvalidParameterError: malformed header, cells or bin layout.
        OSError: the file cannot be read.
    """
    text = Path(path).read_text()
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows or [c.strip().lower() for c in rows[0]][:2] != ["edge", "mass"]:
        raise InvalidParameterError(f"{path}: header must be 'edge,mass'")
    edges, masses = [], []
    body = rows[1:]
    for n, row in enumerate(body, start=2):
        cells = [c.strip() for c in row] + [""]
        try:
            edges.append(float(cells[0]))
            last = n == len(body) + 1
            if last:
                if cells[1]:
                    raise InvalidParameterError(f"{path}:{n}: final row must have an empty mass cell")
            else:
                masses.append(float(cells[1]))
        except ValueError as exc:
            if isinstance(exc, InvalidParameterError):
                raise
            raise InvalidParameterError(f"{path}:{n}: non-numeric cell in {row!r}") from exc
    return TabulatedDist(edges, masses)
