"""Shannon entropy, Fisher information and the H-entropy of the max-entropy model.

Quadrature values are the reference; closed forms are provided alongside
for cross-checking.  All logarithms are natural (nats).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidParameterError
from .maxent import GOLDEN, MaxEntModel
from .quadrature import integrate

QUAD_TOL = 1e-12
# finite-difference scores carry ~1e-10 rounding noise in steep tails
FISHER_TOL = 1e-10
MATCH_TOL = 1e-6


@dataclass(frozen=True)
class InfoReport:
    P: float
    a: float
    S: float
    I: float
    H: float
    S_rel_a: float
    S_rel_mean: float
    I_scaled_a: float
    I_scaled_mean: float
    H_rel_a: float
    H_rel_mean: float

    def as_dict(self):
        return asdict(self)


def _pieces(m: MaxEntModel):
    # integrate flat and exponential parts separately; the kink is at a
    return [(0.0, m.a), (m.a, math.inf)] if m.a > 0 else [(0.0, math.inf)]


def _numeric_score(m: MaxEntModel, lo: float, hi: float):
    """Finite-difference d/dp ln pdf whose stencil never leaves [lo, hi].

    Central differences in the interior; near an edge a second-order
    one-sided stencil points inward, so the step never has to shrink.
    """
    cap = 0.25 * (hi - lo) if math.isfinite(hi) else math.inf
    f = m.log_density

    def score(p):
        p = np.asarray(p, dtype=float)
        h = np.minimum(1e-4 * np.maximum(1.0, np.abs(p)), cap)
        central = (f(p + h) - f(p - h)) / (2.0 * h)
        forward = (-3.0 * f(p) + 4.0 * f(p + h) - f(p + 2.0 * h)) / (2.0 * h)
        backward = (3.0 * f(p) - 4.0 * f(p - h) + f(p - 2.0 * h)) / (2.0 * h)
        return np.where(p - h < lo, forward, np.where(p + h > hi, backward, central))

    return score


def quad_mean(m: MaxEntModel) -> float:
    # the mean grows like a + T, so its error target is relative to that scale
    tol = QUAD_TOL * max(1.0, m.a + m.T)
    return math.fsum(integrate(lambda p: p * m.density(p), lo, hi, tol) for lo, hi in _pieces(m))


def shannon_entropy(m: MaxEntModel) -> float:
    """S = -int ln(pdf) pdf dp over [0, inf), by quadrature."""
    return -math.fsum(
        integrate(lambda p: m.log_density(p) * m.density(p), lo, hi, QUAD_TOL) for lo, hi in _pieces(m)
    )


def fisher_information(m: MaxEntModel) -> float:
    """I = E[(d ln pdf / dp)^2] by quadrature, split at the kink."""
    total = []
    for lo, hi in _pieces(m):
        score = _numeric_score(m, lo, hi)
        total.append(integrate(lambda p: score(p) ** 2 * m.density(p), lo, hi, FISHER_TOL))
    return math.fsum(total)


def h_entropy(m: MaxEntModel) -> float:
    """One-dimensional H = -ln(I) / 2."""
    return -0.5 * math.log(fisher_information(m))


def shannon_entropy_closed(m: MaxEntModel) -> float:
    return math.log(m.a + m.T) + m.P


def fisher_information_closed(m: MaxEntModel) -> float:
    return m.P / (m.T * m.T)


def h_entropy_closed(m: MaxEntModel) -> float:
    return -0.5 * math.log(fisher_information_closed(m))


def info_report(a: float, P: float) -> InfoReport:
    """All quadrature measures at (a, P) with their scale-corrected forms."""
    m = MaxEntModel.from_probability(a, P)
    S = shannon_entropy(m)
    I = fisher_information(m)
    H = -0.5 * math.log(I)
    E = quad_mean(m)
    return InfoReport(
        P=P, a=a, S=S, I=I, H=H,
        S_rel_a=S - math.log(a),
        S_rel_mean=S - math.log(E),
        I_scaled_a=I * a * a,
        I_scaled_mean=I * E * E,
        H_rel_a=H - math.log(a),
        H_rel_mean=H - math.log(E),
    )


def figure_curves(P: float) -> dict:
    """The six reference curves in their quoted closed forms, unaltered.

    The quoted ``fig14_red`` denominator uses a lowercase p, read here as P.
    """
    if not (0.0 < P < 1.0):
        raise InvalidParameterError(f"P must lie in (0, 1), got {P}")
    return {
        "fig13_blue": P - math.log(1.0 - P),
        "fig13_red": P - math.log((1.0 + P * P) / 2.0),
        "fig14_blue": (1.0 - P) ** 2 / P,
        "fig14_red": (1.0 + P * P) ** 2 / (2.0 * P) ** 2,
        "fig15_blue": math.log(math.sqrt(P) / (1.0 - P)),
        "fig15_red": math.log(2.0 * P / (1.0 + P * P)),
    }


# Closed forms obtained by substituting I = (1-P)^2 / (a^2 P) and
# E(p) = a (1 + P^2) / (2 (1 - P)).
DERIVED_RED = {
    "fig14_red": ("(1+P^2)^2/(4P)", lambda P: (1.0 + P * P) ** 2 / (4.0 * P)),
    "fig15_red": ("ln(2 sqrt(P)/(1+P^2))", lambda P: math.log(2.0 * math.sqrt(P) / (1.0 + P * P))),
}
CAPTION_RED = {
    "fig13_red": "P - ln((1+P^2)/2)",
    "fig14_red": "(1+P^2)^2/(2P)^2",
    "fig15_red": "ln(2P/(1+P^2))",
}
_QUANTITY = {"fig13_red": "S_rel_mean", "fig14_red": "I_scaled_mean", "fig15_red": "H_rel_mean"}


def audit_red_curves(P_grid, a: float = 1.0, tol: float = MATCH_TOL) -> dict:
    """Compare the red (mean-corrected) captions against quadrature.

    For each red curve, reports per-P deviations of the quoted caption formula
    and of the derived candidate from the quadrature value, and names the
    candidate(s) matching within ``tol`` everywhere.
    """
    grid = [float(P) for P in P_grid]
    if not grid or any(not (0 < P < 1) for P in grid):
        raise InvalidParameterError("P grid must be non-empty and inside (0, 1)")
    rows = []
    worst = {k: {"caption": 0.0, "derived": 0.0} for k in _QUANTITY}
    for P in grid:
        rep = info_report(a, P)
        caption = figure_curves(P)
        row = {"P": P}
        for key, qty in _QUANTITY.items():
            computed = getattr(rep, qty)
            dev_caption = abs(caption[key] - computed)
            row[f"{key}_computed"] = computed
            row[f"{key}_as_published"] = caption[key]
            row[f"{key}_caption_dev"] = dev_caption
            worst[key]["caption"] = max(worst[key]["caption"], dev_caption)
            if key in DERIVED_RED:
                derived = DERIVED_RED[key][1](P)
                dev_derived = abs(derived - computed)
                row[f"{key}_derived"] = derived
                row[f"{key}_derived_dev"] = dev_derived
                worst[key]["derived"] = max(worst[key]["derived"], dev_derived)
        rows.append(row)

    verdicts = {}
    for key in _QUANTITY:
        matches = []
        if worst[key]["caption"] <= tol:
            matches.append("caption")
        if key in DERIVED_RED and worst[key]["derived"] <= tol:
            matches.append("derived")
        formula = {
            "caption": CAPTION_RED[key],
            "derived": DERIVED_RED[key][0] if key in DERIVED_RED else None,
        }
        verdicts[key] = {
            "quantity": _QUANTITY[key],
            "matches": matches,
            "winner": matches[0] if len(matches) == 1 else None,
            "formula": formula[matches[0]] if len(matches) == 1 else None,
            "max_caption_dev": worst[key]["caption"],
            "max_derived_dev": worst[key]["derived"] if key in DERIVED_RED else None,
        }
    return {"a": a, "tol": tol, "rows": rows, "verdicts": verdicts}


def default_p_grid(step: float = 0.05, with_golden: bool = True) -> list:
    n = int(round(1.0 / step))
    grid = [round(k * step, 12) for k in range(1, n)]
    if with_golden and all(abs(P - GOLDEN) > 1e-12 for P in grid):
        grid.append(GOLDEN)
    return sorted(grid)
