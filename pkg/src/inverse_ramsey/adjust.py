"""Budget adjustment: raise the perceived revenue target until the chosen taxes meet the true budget."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import Infeasible
from .model import Economy, check_target
from .solver import Solution, _same, foc_points_where, max_revenue_on_foc, solve_perceived

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjustedSolution:
    inner: Solution
    adjusted_target: float
    true_target: float
    alternatives: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        out = self.inner.to_dict()
        out.update(
            adjusted_target=float(self.adjusted_target),
            true_target=float(self.true_target),
            true_budget_residual=float(self.inner.true_rev - self.true_target),
            alternative_targets=[float(a) for a in self.alternatives],
        )
        return out


def adjust_budget(econ: Economy, R_true: float) -> AdjustedSolution:
    """Find the perceived target R' whose perceived optimum raises ``R_true`` in true revenue.

    Perceptions stay fixed.  Candidate fixed points are the points of the
    perceived FOC locus where true revenue equals ``R_true``; each one is kept
    only if re-solving the perceived problem at its perceived revenue picks it
    again.  The smallest such R' is returned.
    """
    R_true = check_target(R_true)
    candidates = []
    for tp in foc_points_where(econ, R_true, perceived=False):
        r_prime = float(econ.revenue(tp.t1, tp.t2, perceived=True))
        if r_prime < 0.0:
            if r_prime > -1e-12:
                r_prime = 0.0
            else:
                continue
        candidates.append((r_prime, tp))
    candidates.sort(key=lambda c: c[0])

    accepted = []
    for r_prime, tp in candidates:
        try:
            sol = solve_perceived(econ, r_prime)
        except Infeasible:
            continue
        if _same(sol.taxes, tp, tol=1e-7):
            accepted.append((r_prime, sol))
    if not accepted:
        raise Infeasible(
            f"no perceived optimum meets the true revenue requirement {R_true}",
            max_revenue=max_revenue_on_foc(econ, perceived=False),
        )
    r_prime, sol = accepted[0]
    others = tuple(r for r, _ in accepted[1:])
    if others:
        log.info("budget adjustment has %d further fixed points at R' = %s", len(others), others)
    return AdjustedSolution(sol, r_prime, R_true, others)
