"""Command-line entry point: ``inverse-ramsey <command> --config run.toml``."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import wraps

import click
import numpy as np

from . import analysis, curves
from .adjust import adjust_budget
from .config import RunConfig, load_config
from .errors import (
    BoundaryCase,
    ConfigError,
    DegenerateMultiplier,
    DomainError,
    Infeasible,
    InverseRamseyError,
    NoSolution,
    NotFound,
    Unsupported,
)
from .model import T_MIN, Economy, GoodSpec
from .oracle import GridSpec, oracle_search
from .solver import classify_case, initial_slope, perceived_laffer_t2, solve_perceived, vertical_tangent_t2

EXIT_OK, EXIT_INFEASIBLE, EXIT_BOUNDARY, EXIT_CONFIG, EXIT_OTHER = 0, 2, 3, 4, 1

DEFAULT_WINDOW = {"t1": [-0.5, 1.5], "t2": [-0.5, 1.5], "step": curves.DEFAULT_STEP}


def exit_code(exc: Exception) -> int:
    if isinstance(exc, (ConfigError, DomainError)):
        return EXIT_CONFIG
    if isinstance(exc, (BoundaryCase, DegenerateMultiplier, Unsupported)):
        return EXIT_BOUNDARY
    if isinstance(exc, (Infeasible, NoSolution, NotFound)):
        return EXIT_INFEASIBLE
    return EXIT_OTHER


def _fail(exc: Exception):
    if isinstance(exc, InverseRamseyError):
        payload = exc.to_dict()
    else:
        payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(exit_code(exc))


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _report(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return _json(obj)
    flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in sorted(obj.items())}
    return _csv([list(flat.values())], list(flat.keys()))


def command(default_format="json"):
    """Shared options and error handling for every subcommand."""

    def deco(fn):
        @click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                      help="TOML run configuration.")
        @click.option("--out", type=click.Path(dir_okay=False), default=None,
                      help="Write output here instead of stdout.")
        @click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=default_format,
                      show_default=True)
        @click.option("--mode", type=click.Choice(["perceived", "adjusted"]), default="perceived",
                      show_default=True, help="Use the perceived solution or the budget-adjusted one.")
        @click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True,
                      help="Seed for randomized checks.")
        @wraps(fn)
        def wrapper(config_path, out, fmt, mode, seed, **kw):
            try:
                cfg = load_config(config_path)
                _emit(fn(cfg, fmt=fmt, mode=mode, seed=seed, **kw), out)
            except Exception as exc:  # noqa: BLE001 - every failure becomes a structured exit
                _fail(exc)

        return wrapper

    return deco


@click.group()
def main():
    """Optimal commodity taxes chosen by an overconfident planner."""


def _solution_dict(cfg: RunConfig, mode: str) -> dict:
    econ = cfg.economy
    if mode == "adjusted":
        adj = adjust_budget(econ, cfg.revenue)
        out, sol = adj.to_dict(), adj.inner
    else:
        sol = solve_perceived(econ, cfg.revenue)
        out = sol.to_dict()
    try:
        out["condition"] = analysis.inverse_ramsey_check(sol, econ).to_dict()
    except DegenerateMultiplier:
        out["condition"] = None
    return out


@main.command()
@command()
def solve(cfg, fmt, mode, seed):
    """Solve the perceived problem at the configured revenue."""
    return _report(_solution_dict(cfg, mode), fmt)


@main.command()
@command()
def adjust(cfg, fmt, mode, seed):
    """Apply the budget-adjustment rule to meet the true revenue requirement."""
    return _report(_solution_dict(cfg, "adjusted"), fmt)


def trace_all(econ: Economy, R: float, window: curves.Window, step: float) -> list[curves.CurveTrace]:
    """The five loci: perceived and true FOC, perceived and true budget, adjusted perceived budget."""
    K = curves.CurveKind
    t2_range = (max(window.t2[0], T_MIN), window.t2[1])
    out = [
        curves.trace_foc_curve(econ, t2_range, window=window, step=step, kind=K.PERCEIVED_FOC),
        curves.trace_foc_curve(econ.without_misperception(), t2_range, window=window, step=step,
                               kind=K.TRUE_FOC),
        curves.trace_budget_curve(econ, R, K.PERCEIVED_BUDGET, window=window, step=step),
        curves.trace_budget_curve(econ, R, K.TRUE_BUDGET, window=window, step=step),
    ]
    r_adj = adjust_budget(econ, R).adjusted_target
    out.append(curves.trace_budget_curve(econ, r_adj, K.PERCEIVED_BUDGET, window=window, step=step,
                                         kind=K.ADJUSTED_PERCEIVED_BUDGET))
    return out


def _window(cfg: RunConfig) -> tuple[curves.Window, float]:
    opts = {**DEFAULT_WINDOW, **cfg.trace}
    for axis in ("t1", "t2"):
        lo, hi = opts[axis]
        if not (-1.0 < lo < hi):
            raise ConfigError(f"trace.{axis} must satisfy -1 < lo < hi, got {opts[axis]}")
    return curves.Window(tuple(opts["t1"]), tuple(opts["t2"])), float(opts["step"])


@main.command()
@command(default_format="csv")
def trace(cfg, fmt, mode, seed):
    """Sample the five loci inside the configured window."""
    window, step = _window(cfg)
    traces = trace_all(cfg.economy, cfg.revenue, window, step)
    if fmt == "json":
        return _json([{"kind": t.kind.value, "terminal": t.terminal,
                       "t1": t.t1.tolist(), "t2": t.t2.tolist()} for t in traces])
    rows = [r for t in traces for r in t.rows()]
    return _csv([(k, repr(a), repr(b)) for k, a, b in rows], ["kind", "t1", "t2"])


def classify_dict(econ: Economy) -> dict:
    slope = initial_slope(econ)
    laffer = perceived_laffer_t2(econ)
    return {
        "case": classify_case(econ).value,
        "initial_slope": slope,
        "initial_slope_sign": int(np.sign(slope)),
        "perceived_laffer_t2": laffer,
        "has_perceived_laffer": laffer is not None,
        "vertical_tangent_t2": vertical_tangent_t2(econ),
    }


@main.command()
@command()
def classify(cfg, fmt, mode, seed):
    """Report the case label with slope and Laffer diagnostics."""
    return _report(classify_dict(cfg.economy), fmt)


def _axis(spec, default):
    spec = spec or default
    return np.linspace(spec["min"], spec["max"], spec["n"])


def sweep_cell(econ: Economy, R: float, mode: str) -> dict:
    row = {"theta2": econ.good2.theta, "e2": econ.good2.e}
    try:
        row["case"] = classify_case(econ).value
    except (BoundaryCase, Unsupported) as exc:
        row["case"] = exc.kind
    try:
        sol = adjust_budget(econ, R).inner if mode == "adjusted" else solve_perceived(econ, R)
        row.update(status="ok", t1=sol.taxes.t1, t2=sol.taxes.t2, mu=sol.mu,
                   inverse_ramsey=sol.flags.inverse_ramsey, subsidy_on_good1=sol.flags.subsidy_on_good1)
    except InverseRamseyError as exc:
        row.update(status=exc.kind, t1=None, t2=None, mu=None, inverse_ramsey=None, subsidy_on_good1=None)
    return row


def threads() -> int:
    raw = os.environ.get("RI_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RI_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("RI_THREADS must be at least 1")
    return n


@main.command()
@command(default_format="csv")
def sweep(cfg, fmt, mode, seed):
    """Grid over theta2 and e2 with case and inverse-Ramsey flags per cell."""
    base = cfg.economy
    th = _axis(cfg.sweep.get("theta2"), {"min": 0.3, "max": 0.95, "n": 14})
    e2 = _axis(cfg.sweep.get("e2"), {"min": 0.5, "max": 4.0, "n": 15})
    cells = [Economy(base.good1, GoodSpec(float(e), float(t)), base.mode) for t in th for e in e2]
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        rows = list(pool.map(lambda c: sweep_cell(c, cfg.revenue, mode), cells))
    if fmt == "json":
        return _json(rows)
    header = list(rows[0])
    return _csv([["" if r[k] is None else (repr(r[k]) if isinstance(r[k], float) else r[k])
                  for k in header] for r in rows], header)


@main.command()
@command()
def lumpsum(cfg, fmt, mode, seed):
    """Compare the integrated multiplier with the lump-sum cost of the revenue."""
    return _report(analysis.lumpsum_compare(cfg.economy, cfg.revenue, path=mode).to_dict(), fmt)


@main.command()
@command()
def existence(cfg, fmt, mode, seed):
    """Threshold misperception below which the inverse-Ramsey outcome appears."""
    opts = cfg.existence
    goods = sorted(cfg.economy.goods, key=lambda g: g.e)
    e_i = float(opts.get("e_i", goods[1].e))
    e_j = float(opts.get("e_j", goods[0].e))
    R = float(opts.get("revenue", cfg.revenue))
    theta_bar = analysis.existence_threshold(e_i, e_j, R)
    return _report({"e_i": e_i, "e_j": e_j, "revenue": R, "theta_bar": theta_bar,
                    "lower_bound": e_j / e_i}, fmt)


def random_economy(rng) -> tuple[Economy, float]:
    e1, e2 = rng.uniform(0.2, 4.0, 2)
    th1, th2 = rng.uniform(0.3, 1.0, 2)
    return Economy.from_params(float(e1), float(e2), float(th2), float(th1)), float(rng.uniform(0.05, 0.5))


@main.command()
@command()
def verify(cfg, fmt, mode, seed):
    """Check the solver against the grid oracle on seeded random economies.

    Economies whose perceived problem has no interior solution are redrawn.
    """
    rng = np.random.default_rng(seed)
    samples = int(cfg.verify.get("samples", 10))
    grid = GridSpec(n=int(cfg.verify.get("grid_n", 2001)))
    rows, redrawn = [], 0
    while len(rows) < samples:
        econ, R = random_economy(rng)
        try:
            sol = solve_perceived(econ, R)
        except Infeasible:
            redrawn += 1
            continue
        orc = oracle_search(econ, R, grid)
        rows.append({"e1": econ.good1.e, "e2": econ.good2.e, "theta1": econ.good1.theta,
                     "theta2": econ.good2.theta, "revenue": R, "solver_welfare": sol.welfare,
                     "oracle_welfare": orc.welfare, "bound": orc.resolution_bound,
                     "pass": bool(sol.welfare >= orc.welfare - orc.resolution_bound)})
    return _report({"seed": seed, "redrawn": redrawn, "all_pass": all(r["pass"] for r in rows),
                    "samples": rows}, fmt)


if __name__ == "__main__":
    main()
