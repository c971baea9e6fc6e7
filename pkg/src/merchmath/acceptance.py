"""End-to-end acceptance battery shared by ``merchmath demo-all`` and the test suite.

Each check returns a :class:`Check`; tolerances are fixed here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import make_gaussian, make_tabulated, make_uniform, reflect
from .info_measures import (
    audit_red_curves,
    default_p_grid,
    fisher_information,
    figure_curves,
    h_entropy,
    quad_mean,
    shannon_entropy,
)
from .maxent import GOLDEN, MaxEntModel, golden_optimum, golden_optimum_numeric, perceived_demand
from .market_curves import (
    MarketPair,
    PortfolioPoint,
    demand_curve,
    equilibrium_price,
    log_cross_ratio,
    supply_curve,
)
from .mc_sim import SimConfig, accepted_price_ks, simulate
from .mm_engine import (
    SELLER,
    MMConfig,
    cycle_profit,
    expected_cycle_length,
    expected_return,
    solve_fixed_point,
)
from .quadrature import integrate

QUOTED_A_MAX = 0.27603
MC_SEED = 20240531
MC_CYCLES = 10**6
P_GRID = [round(0.05 * k, 2) for k in range(1, 20)]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, not an aborted battery
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(passed), detail, time.perf_counter() - t0)


def normal_fixed_point():
    t0 = time.perf_counter()
    res = solve_fixed_point(MMConfig(make_gaussian(0, 1)))
    elapsed = time.perf_counter() - t0
    ok = abs(res.a_max - QUOTED_A_MAX) <= 1e-4 and abs(res.rho_at_max - res.a_max) <= 1e-10 and elapsed < 1.0
    return ok, f"a_max={res.a_max:.8f} |rho-a|={res.residual:.2e} t={elapsed:.3f}s"


def golden_ratio():
    t0 = time.perf_counter()
    exact = golden_optimum() == 0.6180339887498949
    numeric = {a: golden_optimum_numeric(a) for a in (0.1, 1.0, 7.3)}
    elapsed = time.perf_counter() - t0
    worst = max(abs(P - 0.618034) for P in numeric.values())
    ok = exact and worst <= 1e-6 and elapsed < 1.0
    return ok, f"analytic exact={exact} numeric max|P-0.618034|={worst:.2e} t={elapsed:.3f}s"


def golden_scale_free():
    worst = 0.0
    for a in np.linspace(0.1, 10.0, 20):
        m = MaxEntModel(a, a * GOLDEN / (1 - GOLDEN))
        worst = max(worst, abs(cycle_profit(MMConfig(m, a, orientation=SELLER)) - a))
    return worst <= 1e-9, f"max|rho(a)-a|={worst:.2e} over 20 a in [0.1,10]"


def blue_curves():
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for P in P_GRID:
            m = MaxEntModel.from_probability(a, P)
            c = figure_curves(P)
            worst = max(
                worst,
                abs(shannon_entropy(m) - math.log(a) - c["fig13_blue"]),
                abs(fisher_information(m) * a * a - c["fig14_blue"]),
                abs(h_entropy(m) - math.log(a) - c["fig15_blue"]),
            )
    return worst <= 1e-8, f"max deviation {worst:.2e} (57 points x 3 curves)"


def red_curve_audit():
    audit = audit_red_curves(P_GRID, tol=1e-6)
    v = audit["verdicts"]
    fig13 = v["fig13_red"]["max_caption_dev"] <= 1e-8
    unique = all(len(v[k]["matches"]) == 1 for k in ("fig14_red", "fig15_red"))
    detail = "; ".join(
        f"{k}: {v[k]['winner'] or 'none'} [{v[k]['formula']}]" for k in ("fig13_red", "fig14_red", "fig15_red")
    )
    return fig13 and unique, detail


def monte_carlo():
    from scipy.special import ndtr

    t0 = time.perf_counter()
    s = simulate(SimConfig(MMConfig(make_gaussian(0, 1), QUOTED_A_MAX), MC_CYCLES, MC_SEED))
    elapsed = time.perf_counter() - t0
    tau_exact = 1.0 + 1.0 / float(ndtr(-QUOTED_A_MAX))
    z = {
        "intensity": (s.intensity_estimate - QUOTED_A_MAX) / s.se_intensity,
        "tau": (s.mean_tau - tau_exact) / s.se_tau,
        "wald": s.wald_residual / s.se_wald,
        "wald_var": s.wald_var_residual / s.se_wald_var,
    }
    ok = all(abs(v) <= 3 for v in z.values()) and elapsed < 30
    return ok, " ".join(f"z_{k}={v:+.2f}" for k, v in z.items()) + f" t={elapsed:.1f}s"


def transaction_frequency():
    m = MaxEntModel.from_probability(1.0, GOLDEN)
    s = simulate(SimConfig(MMConfig(m, 1.0, orientation=SELLER), MC_CYCLES, MC_SEED))
    z = (s.first_draw_fraction - 0.618) / s.se_first_draw
    return abs(z) <= 3, f"first-draw acceptance={s.first_draw_fraction:.5f} z={z:+.2f}"


def scaling():
    a1 = solve_fixed_point(MMConfig(make_gaussian(0, 1))).a_max
    a2 = solve_fixed_point(MMConfig(make_gaussian(0, 2))).a_max
    worst = 0.0
    for a in np.linspace(-2, 2, 50):
        lhs = cycle_profit(MMConfig(make_gaussian(0, 2), 2 * a))
        worst = max(worst, abs(lhs - 2 * cycle_profit(MMConfig(make_gaussian(0, 1), a))))
    ok = abs(a2 - 2 * a1) <= 1e-6 and worst <= 1e-9
    return ok, f"|a2-2a1|={abs(a2 - 2 * a1):.2e} max|rho_2(2a)-2rho_1(a)|={worst:.2e}"


def cross_ratio():
    worst = 0.0
    grid = np.linspace(0.1, 10, 10)
    for pb, ps in [(0.1, 0.5), (-0.27603, 0.0), (1.0, -2.0), (3.0, 3.0), (-5.0, 4.0)]:
        for v in grid:
            for w in grid:
                if v == w and pb == ps:
                    continue
                r = log_cross_ratio(PortfolioPoint(v, pb), PortfolioPoint(w, ps))
                worst = max(worst, abs(r - (ps - pb)))
    return worst <= 1e-12, f"max|ln cr - (p_sell - p_buy)|={worst:.2e} on 10x10x5"


def property_battery():
    """Compact re-run of the module invariants."""
    failures = []

    def need(cond, label):
        if not cond:
            failures.append(label)

    g = make_gaussian(0.3, 1.7)
    t = make_tabulated([-1, 0, 0.5, 2], [0.2, 0.5, 0.3])
    m = MaxEntModel(1.3, 0.7)
    for d in (g, t, m):
        lo, hi = d.support
        need(abs(integrate(d.density, lo, hi, points=d.kinks) - 1) <= 1e-9, f"normalisation {d!r}")
        x = np.linspace(*[float(d.quantile(u)) for u in (1e-6, 1 - 1e-6)], 1000)
        need(np.all(np.diff(d.cdf(x)) >= 0), f"cdf monotone {d!r}")
        b = float(d.quantile(0.4))
        need(abs(d.partial_first_moment(b, "lower") + d.partial_first_moment(b, "upper") - d.mean()) <= 1e-9,
             f"moment split {d!r}")
        u = np.linspace(1e-6, 1 - 1e-6, 101)
        need(np.max(np.abs(d.cdf(d.quantile(u)) - u)) <= 1e-8, f"quantile round trip {d!r}")

    for dist in (make_gaussian(0, 1), make_gaussian(0, 0.4), make_tabulated([-2, -1, 0, 1, 2], [0.1, 0.4, 0.4, 0.1])):
        cfg = MMConfig(dist)
        res = solve_fixed_point(cfg)
        need(res.converged and res.a_max > 0, f"fixed point positive {dist!r}")
        grid = np.linspace(res.a_max - 1, res.a_max + 1, 201)
        need(max(cycle_profit(cfg.at(a)) for a in grid) <= res.rho_at_max + 1e-8, f"maximality {dist!r}")
        for a in (0.0, 0.2, res.a_max, 0.9):
            c = cfg.at(a)
            need(abs(expected_return(c) / expected_cycle_length(c) - cycle_profit(c) / c.theta) <= 1e-10,
                 f"intensity identity {dist!r} a={a}")
        for a in (-0.5, 0.0, 0.7):
            seller = cycle_profit(MMConfig(dist, a, orientation=SELLER))
            buyer = cycle_profit(MMConfig(reflect(dist), a))
            need(seller == buyer, f"mirror {dist!r} a={a}")

    pd_left = perceived_demand(m, m.a - 1e-13)
    pd_right = perceived_demand(m, m.a + 1e-13)
    need(abs(pd_left - pd_right) <= 1e-12, "perceived demand continuity")
    need(max(abs(golden_optimum_numeric(a) - GOLDEN) for a in (0.3, 2.0, 5.0)) <= 1e-6, "golden a-independence")
    for a in (0.5, 2.0):
        mm = MaxEntModel.from_probability(a, 0.3)
        need(abs(quad_mean(mm) - a * (1 + 0.09) / (2 * 0.7)) <= 1e-10, "maxent mean")

    mp = MarketPair.symmetric(make_gaussian(0.4, 1.1))
    x = np.linspace(-4, 4, 81)
    need(np.max(np.abs(supply_curve(mp, x) + demand_curve(mp, x) - 1)) <= 1e-10, "supply + demand = 1")
    need(abs(equilibrium_price(mp).price - 0.4) <= 1e-10, "equilibrium at centre")
    need(abs(equilibrium_price(MarketPair.symmetric(make_uniform(0, 4))).price - 2.0) <= 1e-10, "uniform median")

    a1 = simulate(SimConfig(MMConfig(make_gaussian(0, 1), 0.3), 2000, seed=11))
    a2 = simulate(SimConfig(MMConfig(make_gaussian(0, 1), 0.3), 2000, seed=11))
    need(a1 == a2, "simulation determinism")
    ks = accepted_price_ks(SimConfig(MMConfig(make_gaussian(0, 1), QUOTED_A_MAX), 10**5, seed=MC_SEED))
    need(ks.pvalue > 0.001, "accepted-price KS")

    audit = audit_red_curves(default_p_grid(0.1))
    need(audit["verdicts"]["fig13_red"]["winner"] == "caption", "fig13 red caption")
    return not failures, "all invariants hold" if not failures else "failed: " + ", ".join(failures)


CRITERIA = [
    ("1 normal fixed point", normal_fixed_point),
    ("2 golden ratio", golden_ratio),
    ("3 golden fixed point scale-free", golden_scale_free),
    ("4 blue curves", blue_curves),
    ("5 red-curve audit", red_curve_audit),
    ("6 Monte Carlo validation", monte_carlo),
    ("7 transaction frequency", transaction_frequency),
    ("8 scaling", scaling),
    ("9 cross-ratio invariance", cross_ratio),
    ("10 property battery", property_battery),
]


def run_all(echo: Callable[[str], None] | None = None) -> list[Check]:
    checks = []
    for name, fn in CRITERIA:
        c = _timed(name, fn)
        checks.append(c)
        if echo:
            echo(c.line())
    return checks
