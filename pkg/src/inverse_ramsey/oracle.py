"""Brute-force grid verifier for the perceived problem.

Deliberately independent of the solver: it only evaluates revenue and welfare
from the model and never touches the FOC machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoFeasiblePoint
from .model import Economy, TaxPair, check_target, true_demand


@dataclass(frozen=True)
class GridSpec:
    t_min: float = -0.95
    t_max: float = 10.0
    n: int = 2001
    constraint_tol: float = 1e-10

    def __post_init__(self):
        if not self.t_min > -1.0:
            raise DomainError(f"t_min must exceed -1, got {self.t_min}")
        if not self.t_max > self.t_min:
            raise DomainError("t_max must exceed t_min")
        if int(self.n) != self.n or self.n < 10:
            raise DomainError(f"n must be an integer >= 10, got {self.n}")
        if not self.constraint_tol > 0:
            raise DomainError("constraint_tol must be positive")

    def axis(self) -> np.ndarray:
        # the origin is added as a node so that R = 0 is hit exactly
        return np.union1d(np.linspace(self.t_min, self.t_max, int(self.n)), [0.0])

    @property
    def cell(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)


@dataclass(frozen=True)
class OracleResult:
    taxes: TaxPair
    welfare: float
    resolution_bound: float
    n_feasible: int


def _project_rows(econ, R, t1, t2, tol, iters=80):
    """All points (t1_i, t2*) with t2* on the t2 axis cell where the revenue residual changes sign."""
    res = econ.revenue(t1[:, None], t2[None, :], perceived=True) - R
    sgn = np.sign(res)
    rows, cols = np.nonzero(sgn[:, :-1] * sgn[:, 1:] <= 0)
    if rows.size == 0:
        return np.empty(0), np.empty(0)
    x1 = t1[rows]
    lo, hi = t2[cols].copy(), t2[cols + 1].copy()
    flo = res[rows, cols]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = econ.revenue(x1, mid, perceived=True) - R
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    x2 = 0.5 * (lo + hi)
    ok = np.abs(econ.revenue(x1, x2, perceived=True) - R) < tol
    return x1[ok], x2[ok]


def oracle_search(econ: Economy, R: float, grid: GridSpec | None = None,
                  chunk: int = 256) -> OracleResult:
    """Grid maximization of welfare on the perceived budget constraint.

    Each grid row (fixed t1) is projected onto the constraint along t2 by
    bisection inside every cell where the revenue residual changes sign.
    The feasible point of highest welfare wins.  The returned resolution bound
    is ``L * h`` (h the cell diagonal, L the largest welfare gradient on the
    cell below the answer) plus the welfare value of the revenue slack.
    """
    R = check_target(R)
    grid = grid or GridSpec()
    axis = grid.axis()
    best = (-np.inf, None, None)
    count = 0
    for start in range(0, axis.size, chunk):
        x1, x2 = _project_rows(econ, R, axis[start:start + chunk], axis, grid.constraint_tol)
        if x1.size == 0:
            continue
        count += x1.size
        w = econ.welfare(x1, x2)
        k = int(np.argmax(w))
        if w[k] > best[0]:
            best = (float(w[k]), float(x1[k]), float(x2[k]))
    if best[1] is None:
        raise NoFeasiblePoint(f"the perceived budget constraint R = {R} misses the grid")
    w, a, b = best
    h = grid.cell * np.sqrt(2.0)
    lo1, lo2 = max(a - grid.cell, grid.t_min), max(b - grid.cell, grid.t_min)
    L = float(np.hypot(true_demand(lo1, econ.good1), true_demand(lo2, econ.good2)))
    g1, g2 = econ.revenue_gradient(a, b, perceived=True)
    slack = L / max(float(np.hypot(g1, g2)), 1e-12) * grid.constraint_tol
    return OracleResult(TaxPair(a, b), w, L * h + slack, count)


def grid_maximize_perceived(econ: Economy, R: float, grid: GridSpec | None = None) -> TaxPair:
    return oracle_search(econ, R, grid).taxes
