import numpy as np
import pytest

from inverse_ramsey.adjust import adjust_budget
from inverse_ramsey.curves import CurveKind, Window, polyline_intersections, trace_budget_curve, trace_foc_curve
from inverse_ramsey.errors import Infeasible
from inverse_ramsey.model import Economy
from inverse_ramsey.solver import max_revenue_on_foc, solve_perceived

# Frozen from a 30-digit mpmath solve of (perceived FOC, true budget).
FROZEN = {"fig1": (0.38348121868163, 0.564450599464176), "fig2": (0.112658994567677, 0.563056433950758)}
TARGETS = {"fig1": 0.5, "fig2": 0.2, "fig3": 0.3, "fig4": 0.12}


def test_no_misperception_is_identity(ramsey):
    adj = adjust_budget(ramsey, 0.3)
    assert adj.adjusted_target == pytest.approx(0.3, abs=1e-12)
    assert np.allclose(adj.inner.taxes.as_tuple(), solve_perceived(ramsey, 0.3).taxes.as_tuple(), atol=1e-10)


@pytest.mark.parametrize("name", list(FROZEN))
def test_frozen_adjusted(name, request):
    adj = adjust_budget(request.getfixturevalue(name), TARGETS[name])
    assert np.allclose(adj.inner.taxes.as_tuple(), FROZEN[name], atol=1e-10)


def test_spec_examples(fig1, fig2):
    a1 = adjust_budget(fig1, 0.5)
    assert a1.inner.taxes.t2 > a1.inner.taxes.t1
    a2 = adjust_budget(fig2, 0.2)
    assert a2.inner.taxes.t1 >= 0


@pytest.mark.parametrize("name", list(TARGETS))
def test_invariants(name, request):
    econ = request.getfixturevalue(name)
    adj = adjust_budget(econ, TARGETS[name])
    assert abs(adj.inner.true_rev - adj.true_target) < 1e-8
    assert abs(adj.inner.foc_residual) < 1e-8
    assert abs(adj.inner.budget_residual) < 1e-8
    assert adj.inner.target == adj.adjusted_target
    assert adj.adjusted_target > adj.true_target
    assert list(adj.alternatives) == sorted(adj.alternatives)
    assert all(a > adj.adjusted_target for a in adj.alternatives)
    d = adj.to_dict()
    assert abs(d["true_budget_residual"]) < 1e-8


def test_adjusted_point_on_trace_intersection(fig1):
    box = Window((-0.95, 3.0), (-0.95, 3.0))
    foc = trace_foc_curve(fig1, (0.0, 1.5), window=box)
    true_bc = trace_budget_curve(fig1, 0.5, CurveKind.TRUE_BUDGET, window=box)
    (x,) = polyline_intersections(foc, true_bc)
    assert np.allclose(x, adjust_budget(fig1, 0.5).inner.taxes.as_tuple(), atol=1e-6)


def test_infeasible():
    econ = Economy.from_params(1.5, 2.5, 0.55)
    top = max_revenue_on_foc(econ, perceived=False)
    with pytest.raises(Infeasible) as info:
        adjust_budget(econ, top + 0.05)
    assert info.value.max_revenue == pytest.approx(top)


def test_zero_requirement(fig2):
    adj = adjust_budget(fig2, 0.0)
    assert adj.adjusted_target == 0.0 and adj.inner.taxes.as_tuple() == (0.0, 0.0)


def test_taxed_only_misperception_of_untaxed_good_is_invisible():
    # good 1 misperceived but subsidised: perceived and true revenue agree there
    econ = Economy.from_params(2.5, 0.6, 1.0, theta1=0.55)
    adj = adjust_budget(econ, 0.2)
    t1, t2 = adj.inner.taxes
    if t1 <= 0 and t2 <= 0:
        assert adj.adjusted_target == pytest.approx(0.2)
    else:
        assert adj.adjusted_target >= 0.2
