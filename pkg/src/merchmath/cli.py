"""Command-line interface.

Usage:
    merchmath fixed-point --dist gaussian:0,1
    merchmath golden
    merchmath simulate --dist gaussian:0,1 --a 0.27603 --n 100000 --seed 42
    merchmath info-scan --output curves.csv
    merchmath curves --dist gaussian:0,1
    merchmath audit-red
    merchmath demo-all

Distribution specs: ``gaussian:<mean>,<sigma>``, ``maxent:<a>,<T>``,
``uniform:<lo>,<hi>`` and ``tabulated:<path.csv>``.  A tabulated CSV has
the header ``edge,mass`` and one row per bin edge; each mass belongs to the
bin starting at its edge, so the last row leaves the mass cell empty::

    edge,mass
    -1,0.25
    0,0.75
    1,

Exit codes: 0 success, 1 validation error (or a failed demo-all check),
2 solver/quadrature failure, 3 I/O error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
import warnings
from pathlib import Path

import click

from . import acceptance
from .distributions import PriceDistribution, load_tabulated_csv, make_gaussian, make_uniform
from .errors import (
    DegenerateStrategyError,
    InvalidParameterError,
    MerchMathError,
    QuadratureError,
    SolverError,
)
from .info_measures import audit_red_curves, default_p_grid, figure_curves, info_report
from .maxent import GOLDEN, MaxEntModel, golden_optimum, golden_optimum_numeric
from .market_curves import ConsistencyWarning, MarketPair, curve_table, equilibrium_price
from .mc_sim import SimConfig, simulate
from .mm_engine import MMConfig, expected_cycle_length, profit_intensity, solve_fixed_point

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

INFO_COLUMNS = [
    "P", "S_rel_a", "S_rel_mean", "I_scaled_a", "I_scaled_mean", "H_rel_a", "H_rel_mean",
    "fig13_blue_as_published", "fig13_red_as_published",
    "fig14_blue_as_published", "fig14_red_as_published",
    "fig15_blue_as_published", "fig15_red_as_published",
    "is_golden",
]


def parse_dist(spec: str) -> PriceDistribution:
    """Build a distribution from the ``family:params`` mini-grammar."""
    family, sep, params = spec.partition(":")
    family = family.strip().lower()
    if not sep or not params:
        raise InvalidParameterError(f"distribution spec {spec!r} must look like family:params")
    if family == "tabulated":
        return load_tabulated_csv(params)
    try:
        values = [float(v) for v in params.split(",")]
    except ValueError as exc:
        raise InvalidParameterError(f"non-numeric parameter in {spec!r}") from exc
    if len(values) != 2:
        raise InvalidParameterError(f"{family} takes two parameters, got {len(values)}")
    if family == "gaussian":
        return make_gaussian(*values)
    if family == "maxent":
        return MaxEntModel(*values)
    if family == "uniform":
        return make_uniform(*values)
    raise InvalidParameterError(f"unknown distribution family {family!r}")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def render_json(command: str, inputs: dict, results, diagnostics: dict) -> str:
    doc = {"command": command, "inputs": inputs, "results": results, "diagnostics": diagnostics}
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    columns = columns or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_text(results: dict) -> str:
    # full float precision here; the 10-digit rule is for CSV
    def show(v):
        return repr(v) if isinstance(v, float) else fmt(v)

    return "".join(f"{k}: {show(v)}\n" for k, v in results.items() if not isinstance(v, (list, dict)))


def _write(text: str, output: str | None):
    if output and output != "-":
        Path(output).write_text(text, newline="\n")
    else:
        click.echo(text, nl=False)


def _emit(fmt_name, output, command, inputs, results, diagnostics, rows=None, columns=None):
    if fmt_name == "json":
        _write(render_json(command, inputs, results, diagnostics), output)
    elif fmt_name == "csv":
        if rows is None:
            raise InvalidParameterError(f"{command} has no tabular output; use --format json or text")
        _write(render_csv(rows, columns), output)
    else:
        _write(render_text(results), output)


format_option = click.option(
    "--format", "fmt_name", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True
)
output_option = click.option("--output", "-o", default=None, help="Write to this path instead of stdout.")
dist_option = click.option("--dist", "dist_spec", required=True, help="e.g. gaussian:0,1")
orientation_option = click.option(
    "--orientation", type=click.Choice(["buyer", "seller"]), default="buyer", show_default=True
)
theta_option = click.option("--theta", type=float, default=1.0, show_default=True)


@click.group()
def cli():
    """Trading-cycle profit, fixed-point and max-entropy tools."""


@cli.command("fixed-point")
@dist_option
@orientation_option
@theta_option
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@format_option
@output_option
def cmd_fixed_point(dist_spec, orientation, theta, tol, max_iter, fmt_name, output):
    """Solve rho(a) = a for the optimal withdrawal price."""
    cfg = MMConfig(parse_dist(dist_spec), 0.0, theta, orientation)
    res = solve_fixed_point(cfg, tol=tol, max_iter=max_iter)
    at_max = cfg.at(res.a_max)
    results = {
        "a_max": res.a_max,
        "rho_at_max": res.rho_at_max,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
        "method": res.method,
        "profit_intensity": profit_intensity(at_max),
        "expected_cycle_length": expected_cycle_length(at_max),
    }
    inputs = {"dist": dist_spec, "orientation": orientation, "theta": theta, "tol": tol, "max_iter": max_iter}
    rows = [{"iteration": k, "a": a, "rho": r} for k, (a, r) in enumerate(res.trace)]
    _emit(fmt_name, output, "fixed-point", inputs, results, {"trace": [list(t) for t in res.trace]}, rows)
    if not res.converged:
        raise SolverError(f"fixed point not converged (residual {res.residual:.3g})")


@cli.command("golden")
@click.option("--a", "a_values", type=float, multiple=True, default=(0.1, 1.0, 7.3), show_default=True)
@format_option
@output_option
def cmd_golden(a_values, fmt_name, output):
    """Golden-ratio transaction probability, analytic and by root finding."""
    results = {"P_analytic": golden_optimum()}
    rows = []
    for a in a_values:
        P = golden_optimum_numeric(a)
        results[f"P_numeric[a={fmt(a)}]"] = P
        rows.append({"a": a, "P_numeric": P, "deviation": P - GOLDEN})
    diagnostics = {"numeric": rows, "max_deviation": max(abs(r["deviation"]) for r in rows)}
    _emit(fmt_name, output, "golden", {"a": list(a_values)}, results, diagnostics, rows)


@cli.command("simulate")
@dist_option
@click.option("--a", "withdrawal", type=float, default=0.0, show_default=True)
@click.option("--n", "n_cycles", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--shards", type=int, default=1, show_default=True)
@orientation_option
@theta_option
@format_option
@output_option
def cmd_simulate(dist_spec, withdrawal, n_cycles, seed, shards, orientation, theta, fmt_name, output):
    """Monte Carlo trading cycles versus the analytic engine."""
    mm = MMConfig(parse_dist(dist_spec), withdrawal, theta, orientation)
    stats = simulate(SimConfig(mm, n_cycles, seed, shards))
    results = stats.as_dict()
    diagnostics = {
        "analytic_profit_intensity": profit_intensity(mm),
        "analytic_mean_tau": expected_cycle_length(mm),
    }
    inputs = {
        "dist": dist_spec, "a": withdrawal, "n": n_cycles, "seed": seed,
        "shards": shards, "orientation": orientation, "theta": theta,
    }
    _emit(fmt_name, output, "simulate", inputs, results, diagnostics, [results])


@cli.command("info-scan")
@click.option("--a", type=float, default=1.0, show_default=True, help="Withdrawal price of the model.")
@click.option("--step", type=float, default=0.05, show_default=True, help="P grid spacing.")
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@output_option
def cmd_info_scan(a, step, fmt_name, output):
    """Entropy, Fisher and H curves over P (quadrature plus as-published captions)."""
    if not (0 < step < 1):
        raise InvalidParameterError("step must lie in (0, 1)")
    rows = []
    for P in default_p_grid(step):
        rep = info_report(a, P)
        row = {k: getattr(rep, k) for k in INFO_COLUMNS[:7]}
        row.update({f"{k}_as_published": v for k, v in figure_curves(P).items()})
        row["is_golden"] = abs(P - GOLDEN) < 1e-12
        rows.append(row)
    _emit(fmt_name, output, "info-scan", {"a": a, "step": step}, rows, {"n_rows": len(rows)}, rows, INFO_COLUMNS)


@cli.command("curves")
@dist_option
@click.option("--demand-dist", "demand_spec", default=None, help="Demand law if it differs from supply.")
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--marshall", is_flag=True, help="CSV with price as the last (ordinate) column.")
@format_option
@output_option
def cmd_curves(dist_spec, demand_spec, points, marshall, fmt_name, output):
    """Supply and demand curves and their equilibrium price."""
    supply = parse_dist(dist_spec)
    demand = parse_dist(demand_spec) if demand_spec else supply
    mp = MarketPair(supply, demand)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConsistencyWarning)
        eq = equilibrium_price(mp)
    results = {
        "equilibrium": eq.price,
        "supply_at_equilibrium": eq.supply,
        "demand_at_equilibrium": eq.demand,
        "consistent": eq.consistent,
    }
    diagnostics = {"max_law_gap": eq.max_law_gap, "warnings": [str(w.message) for w in caught]}
    rows = curve_table(mp, points, marshall)
    inputs = {"dist": dist_spec, "demand_dist": demand_spec, "points": points, "marshall": marshall}
    _emit(fmt_name, output, "curves", inputs, results, diagnostics, rows)


@cli.command("audit-red")
@click.option("--step", type=float, default=0.05, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@format_option
@output_option
def cmd_audit_red(step, tol, fmt_name, output):
    """Check the quoted mean-corrected curve formulas against quadrature."""
    audit = audit_red_curves(default_p_grid(step, with_golden=False), tol=tol)
    results = {}
    for key, v in audit["verdicts"].items():
        label = "as-published" if v["winner"] == "caption" else ("derived" if v["winner"] else "none")
        results[f"{key}.match"] = label
        results[f"{key}.formula"] = v["formula"] or "none"
        results[f"{key}.max_caption_dev"] = v["max_caption_dev"]
    _emit(fmt_name, output, "audit-red", {"step": step, "tol": tol}, results, audit["verdicts"], audit["rows"])


@cli.command("demo-all")
def cmd_demo_all():
    """Run the full acceptance battery and print a pass/fail summary."""
    t0 = time.perf_counter()
    checks = acceptance.run_all(click.echo)
    passed = sum(c.passed for c in checks)
    click.echo(f"{passed}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f}s")
    if passed != len(checks):
        raise click.exceptions.Exit(EXIT_VALIDATION)


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="merchmath", standalone_mode=False)
        if isinstance(rv, int):
            return rv
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_VALIDATION
    except click.ClickException as exc:
        exc.show()
        return EXIT_VALIDATION
    except (InvalidParameterError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except (QuadratureError, SolverError, DegenerateStrategyError, MerchMathError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_SOLVER
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
