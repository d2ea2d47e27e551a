import numpy as np
import pytest

from inverse_ramsey.errors import DomainError, NoFeasiblePoint
from inverse_ramsey.oracle import GridSpec, grid_maximize_perceived, oracle_search
from inverse_ramsey.solver import solve_perceived


def test_gridspec_validation():
    with pytest.raises(DomainError):
        GridSpec(t_min=-1.0)
    with pytest.raises(DomainError):
        GridSpec(t_min=1.0, t_max=0.5)
    with pytest.raises(DomainError):
        GridSpec(n=5)
    with pytest.raises(DomainError):
        GridSpec(constraint_tol=0.0)
    assert 0.0 in GridSpec().axis()


def test_zero_revenue_returns_origin(fig1):
    assert grid_maximize_perceived(fig1, 0.0).as_tuple() == pytest.approx((0.0, 0.0), abs=1e-12)


def test_ramsey_matches_solver(ramsey):
    g = GridSpec()
    res = oracle_search(ramsey, 0.3, g)
    sol = solve_perceived(ramsey, 0.3)
    assert np.all(np.abs(np.subtract(res.taxes.as_tuple(), sol.taxes.as_tuple())) <= g.cell)
    assert sol.welfare >= res.welfare - res.resolution_bound


def test_figure1_ordering(fig1):
    tp = grid_maximize_perceived(fig1, 0.5, GridSpec(n=801))
    assert tp.t2 > tp.t1


def test_no_feasible_point(ramsey):
    with pytest.raises(NoFeasiblePoint):
        oracle_search(ramsey, 5.0, GridSpec(t_min=-0.5, t_max=0.5, n=51))
