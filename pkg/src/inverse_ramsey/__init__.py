"""Commodity taxes chosen by a planner who misperceives demand elasticities."""

from .adjust import AdjustedSolution, adjust_budget
from .analysis import (
    InverseRamseyReport,
    LumpSumReport,
    existence_threshold,
    inverse_ramsey_check,
    lumpsum_compare,
    mu_of_r,
    small_r_approx_check,
)
from .curves import CurveKind, CurveTrace, Window, trace_budget_curve, trace_foc_curve
from .errors import (
    BoundaryCase,
    ConfigError,
    DegenerateMultiplier,
    DomainError,
    EmptyLocus,
    Infeasible,
    InverseRamseyError,
    NoFeasiblePoint,
    NoSolution,
    NotFound,
    Unsupported,
)
from .model import Economy, GoodSpec, PerceptionMode, TaxPair, perceived_revenue, true_revenue, welfare
from .oracle import GridSpec, grid_maximize_perceived
from .solver import (
    Branch,
    CaseLabel,
    Solution,
    classify_case,
    foc_residual,
    initial_slope,
    perceived_laffer_t2,
    solve_perceived,
    t1_on_foc,
    vertical_tangent_t2,
)

__version__ = "0.1.0"
