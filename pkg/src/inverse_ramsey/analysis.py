"""Inverse-Ramsey diagnostics, small-revenue existence results and the lump-sum comparison."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .adjust import adjust_budget
from .errors import DegenerateMultiplier, DomainError, Infeasible, NotFound, Unsupported
from .model import (
    T_MAX,
    Economy,
    GoodSpec,
    PerceptionMode,
    check_target,
    perceived_demand,
    perceived_elasticity,
    true_demand,
)
from .quadrature import adaptive_simpson
from .solver import Solution, _inverse_ramsey_goods, origin_path, solve_perceived


@dataclass(frozen=True)
class InverseRamseyReport:
    holds: bool
    lhs: float
    rhs: float
    mu: float
    burden_share: float
    tax_ratio_check: bool
    good_i: int
    good_j: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LumpSumReport:
    integral: float
    target: float
    commodity_preferred: bool | None
    aperitivo_monotone: bool
    sufficient_condition: bool
    path: str
    partial: bool = False
    reached: float | None = None
    min_mu: float | None = None
    subsidy_witness: dict | None = None
    error_estimate: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def inverse_ramsey_check(sol: Solution, econ: Economy) -> InverseRamseyReport:
    """Evaluate the ratio form of the inverse-Ramsey condition at a solution.

    Good ``i`` is the misperceived good (or the more elastic one when both
    or neither are).  ``holds`` is the ratio test; ``tax_ratio_check`` compares
    ``t/(1+t)`` directly and is the authoritative verdict when mu < 1.
    """
    mu = float(sol.mu)
    if abs(mu - 1.0) < 1e-9:
        raise DegenerateMultiplier(f"mu = {mu!r} is too close to 1 for the ratio condition")
    i, j = _inverse_ramsey_goods(econ)
    goods = econ.goods
    t = tuple(sol.taxes)

    def share(k):
        return true_demand(float(t[k]), goods[k]) / perceived_demand(float(t[k]), goods[k], econ.mode)

    b_i, b_j = share(i), share(j)
    ebar_i = perceived_elasticity(float(t[i]), goods[i], econ.mode)
    ebar_j = perceived_elasticity(float(t[j]), goods[j], econ.mode)
    lhs = (1.0 - b_i / mu) / (1.0 - b_j / mu) * ebar_j
    s = [x / (1.0 + x) for x in t]
    return InverseRamseyReport(
        holds=bool(lhs > ebar_i),
        lhs=float(lhs),
        rhs=float(ebar_i),
        mu=mu,
        burden_share=float(b_i),
        tax_ratio_check=bool(s[i] > s[j]),
        good_i=i + 1,
        good_j=j + 1,
    )


def small_r_approx_check(econ: Economy) -> bool:
    """Small-revenue predicate: perceived elasticity of good 2 below the mean true elasticity."""
    if econ.good1.theta != 1.0:
        raise Unsupported("the small-R approximation assumes good 1 is correctly perceived")
    return bool((econ.good1.e + econ.good2.e) / 2.0 > econ.good2.perceived_e)


def _threshold_economy(e_i: float, e_j: float, theta: float) -> Economy:
    # geometric-mean perception x_i(t)^theta x_i(0)^(1-theta) coincides with
    # the taxed-only constant-elasticity belief (1+t)^(-theta e_i)
    return Economy(GoodSpec(e_j, 1.0), GoodSpec(e_i, theta), PerceptionMode.TAXED_ONLY)


def inverse_ramsey_outcome(e_i: float, e_j: float, theta: float, R: float) -> bool | None:
    """Tax-ratio outcome of the perceived problem at ``theta``; None when ``R`` is unreachable."""
    try:
        sol = solve_perceived(_threshold_economy(e_i, e_j, theta), R)
    except Infeasible:
        return None
    return sol.flags.inverse_ramsey


def existence_threshold(e_i: float, e_j: float, R: float, tol: float = 1e-7, scan: int = 50) -> float:
    """Largest misperception factor below which the planner taxes the elastic good more heavily.

    ``theta`` ranges over ``(e_j/e_i, 1)``.  Near the lower end the perceived
    problem can be infeasible for the requested ``R`` (revenue falls along the
    FOC locus in both directions from the origin), so the bracket is found by
    scanning ``scan`` points first, then refined by bisection on the last
    True -> False transition.
    """
    if not e_i > e_j > 0:
        raise DomainError("existence threshold needs e_i > e_j > 0")
    R = check_target(R)
    lo = e_j / e_i
    grid = lo + (1.0 - lo) * (np.arange(1, scan + 1) / scan)
    outcomes = [inverse_ramsey_outcome(e_i, e_j, th, R) for th in grid]
    last = None
    for k in range(len(grid) - 1):
        if outcomes[k] is True and outcomes[k + 1] is False:
            last = k
    if last is None:
        if outcomes[-1] is True:
            return 1.0
        raise NotFound(f"no inverse-Ramsey outcome for theta in ({lo:.6g}, 1) at R = {R}")
    a, b = float(grid[last]), float(grid[last + 1])
    while b - a > tol:
        mid = 0.5 * (a + b)
        out = inverse_ramsey_outcome(e_i, e_j, mid, R)
        if out is None:
            raise NotFound(f"perceived problem infeasible at theta = {mid:.6g} inside the bracket")
        if out:
            a = mid
        else:
            b = mid
    return a


def mu_of_r(econ: Economy, r: float, path: str = "perceived") -> float:
    """Multiplier of the perceived budget when the revenue requirement is ``r``.

    ``path="perceived"`` follows the perceived optimum continuously from r = 0;
    ``path="adjusted"`` uses the budget-adjusted solution that raises ``r`` in true revenue.
    """
    return _solution_at(econ, r, path).mu


def _solution_at(econ: Economy, r: float, path: str) -> Solution:
    if path == "perceived":
        return solve_perceived(econ, r, branch="origin")
    if path == "adjusted":
        return adjust_budget(econ, r).inner
    raise ValueError(f"unknown path {path!r}")


def foc_factor_derivative(t2, econ: Economy):
    """d/dt2 of ``(1+t2)^((1-theta2) e2) * (1 - theta2 e2 t2/(1+t2))`` on t2 >= 0."""
    t2 = np.asarray(t2, dtype=float)
    a = (1.0 - econ.good2.theta) * econ.good2.e
    b = econ.good2.perceived_e
    return (1.0 + t2) ** (a - 2.0) * ((a - b) + a * (1.0 - b) * t2)


def foc_factor_nonincreasing(econ: Economy, n: int = 4001) -> bool:
    """True when the good-2 FOC product never rises on t2 >= 0 (sampled)."""
    grid = np.concatenate([[0.0], np.geomspace(1e-6, T_MAX, n - 1)])
    d = foc_factor_derivative(grid, econ)
    return bool(d[0] <= 0.0 and np.all(d[1:] < 0.0))


def lumpsum_compare(econ: Economy, R: float, path: str = "perceived", tol: float = 1e-7) -> LumpSumReport:
    """Compare ``integral_0^R mu(r) dr`` with the lump-sum cost ``R``."""
    R = check_target(R)
    nodes: list[tuple[float, float, float, float]] = []

    def mu(r):
        sol = _solution_at(econ, r, path)
        nodes.append((r, sol.mu, sol.taxes.t1, sol.taxes.t2))
        return sol.mu

    partial, reached = False, None
    try:
        integral, err = adaptive_simpson(mu, 0.0, R, tol)
    except Infeasible:
        partial = True
        reached = _reachable(econ, R, path)
        nodes.clear()
        integral, err = adaptive_simpson(mu, 0.0, reached, tol) if reached > 0 else (0.0, 0.0)

    witness = None
    for r, m, t1, t2 in sorted(nodes):
        if 0 < r and m < 1.0 and t1 < 0 < t2:
            witness = {"r": r, "mu": m, "t1": t1, "t2": t2}
            break
    th, e2 = econ.good2.theta, econ.good2.e
    return LumpSumReport(
        integral=float(integral),
        target=R,
        commodity_preferred=None if partial else bool(integral < R),
        aperitivo_monotone=foc_factor_nonincreasing(econ),
        sufficient_condition=bool(th >= 0.5 and th * e2 > 1.0),
        path=path,
        partial=partial,
        reached=reached,
        min_mu=float(min(m for _, m, _, _ in nodes)) if nodes else None,
        subsidy_witness=witness,
        error_estimate=float(err),
    )


def _reachable(econ: Economy, R: float, path: str) -> float:
    """Largest r <= R at which the chosen path is still defined (bisection)."""
    if path == "perceived":
        return min(R, origin_path(econ).fold_revenue * (1.0 - 1e-12))
    lo, hi = 0.0, R
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        try:
            _solution_at(econ, mid, path)
            lo = mid
        except Infeasible:
            hi = mid
    return lo


def search_commodity_preferred(R: float, e1_values=(0.6, 0.8), e2_values=(1.9, 2.5, 4.0),
                               theta2_values=(0.45, 0.4, 0.35, 0.3, 0.25), path: str = "perceived"):
    """First economy (scanning the given grids) where commodity taxation beats a lump-sum tax.

    Returns ``(economy, report)``; raises NotFound when none qualifies.
    """
    for e1 in e1_values:
        for e2 in e2_values:
            for th in theta2_values:
                econ = Economy.from_params(e1, e2, th)
                try:
                    rep = lumpsum_compare(econ, R, path)
                except Infeasible:
                    continue
                if rep.commodity_preferred:
                    return econ, rep
    raise NotFound(f"no economy on the search grid prefers commodity taxation at R = {R}")
