import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inverse_ramsey.errors import DomainError
from inverse_ramsey.model import (
    Economy,
    GoodSpec,
    PerceptionMode,
    TaxPair,
    check_target,
    foc_factor,
    good_revenue,
    good_revenue_slope,
    laffer_rate,
    log_foc_factor,
    log_foc_factor_slope,
    perceived_demand,
    perceived_elasticity,
    perceived_revenue,
    true_demand,
    true_revenue,
    welfare,
    welfare_term,
)

elasticity = st.floats(0.2, 4.0)
theta = st.floats(0.3, 1.0)
rate = st.floats(-0.9, 5.0)


def test_goodspec_validation():
    with pytest.raises(DomainError):
        GoodSpec(0.0)
    with pytest.raises(DomainError):
        GoodSpec(1.0, 0.0)
    with pytest.raises(DomainError):
        GoodSpec(1.0, 1.2)
    assert GoodSpec(2.0, 0.5).perceived_e == 1.0


def test_taxpair_rejects_nonpositive_price():
    with pytest.raises(DomainError):
        TaxPair(-1.0, 0.0)
    tp = TaxPair(0.25, -0.5)
    assert (tp.q1, tp.q2) == (1.25, 0.5)
    assert tuple(tp) == (0.25, -0.5)


def test_check_target():
    assert check_target(0) == 0.0
    with pytest.raises(DomainError):
        check_target(-0.1)
    with pytest.raises(DomainError):
        check_target(float("nan"))


def test_demand_values():
    g = GoodSpec(2.0, 0.5)
    assert true_demand(1.0, g) == pytest.approx(0.25)
    assert perceived_demand(1.0, g) == pytest.approx(0.5)
    # a subsidy is perceived correctly in the taxed-only mode
    assert perceived_demand(-0.5, g) == pytest.approx(true_demand(-0.5, g))
    assert perceived_demand(-0.5, g, PerceptionMode.SYMMETRIC) == pytest.approx(0.5 ** -1.0)
    with pytest.raises(DomainError):
        true_demand(-1.0, g)


def test_scalar_and_array_paths_agree():
    g = GoodSpec(1.7, 0.6)
    t = np.array([-0.5, 0.0, 0.3, 2.0])
    for fn in (true_demand, welfare_term):
        assert np.allclose(fn(t, g), [fn(float(x), g) for x in t])
    for fn in (perceived_demand, good_revenue_slope, foc_factor, log_foc_factor):
        assert np.allclose(fn(t, g), [fn(float(x), g) for x in t])
    assert np.allclose(perceived_elasticity(t, g), [1.7, 1.7, 1.02, 1.02])


def test_laffer_rate():
    assert laffer_rate(GoodSpec(2.5, 0.55)) == pytest.approx(1 / 0.375)
    assert laffer_rate(GoodSpec(2.5, 0.55), perceived=False) == pytest.approx(1 / 1.5)
    assert laffer_rate(GoodSpec(1.0)) is None


def test_welfare_continuous_in_elasticity():
    for t in (-0.4, 0.3, 2.0):
        w1 = welfare_term(t, GoodSpec(1.0))
        assert w1 == pytest.approx(-math.log1p(t))
        assert welfare_term(t, GoodSpec(1.0 + 1e-9)) == pytest.approx(w1, abs=1e-8)


def test_log_foc_factor_past_laffer_rate():
    g = GoodSpec(2.5, 0.55)
    with pytest.raises(DomainError):
        log_foc_factor(3.0, g)
    assert foc_factor(3.0, g) < 0


def test_economy_helpers(fig1):
    assert fig1.misperceived
    assert not fig1.without_misperception().misperceived
    assert fig1.with_theta2(0.45).good2.theta == 0.45
    assert perceived_revenue((0.1, 0.2), fig1) == pytest.approx(fig1.revenue(0.1, 0.2))
    assert true_revenue((0.1, 0.2), fig1) < perceived_revenue((0.1, 0.2), fig1)
    assert welfare((0.0, 0.0), fig1) == 0.0
    # the revenue maximum of a separable economy is the sum of the two Laffer peaks
    g1, g2 = fig1.goods
    expected = sum(float(good_revenue(min(laffer_rate(g), 100.0) if laffer_rate(g) else 100.0, g))
                   for g in (g1, g2))
    assert fig1.max_revenue() == pytest.approx(expected)


@settings(max_examples=200, deadline=None)
@given(elasticity, theta, rate)
def test_revenue_slope_matches_finite_difference(e, th, t):
    g = GoodSpec(e, th)
    if abs(t) < 1e-4:
        return
    h = 1e-6
    fd = (good_revenue(t + h, g) - good_revenue(t - h, g)) / (2 * h)
    assert good_revenue_slope(t, g) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(elasticity, theta, st.floats(-0.9, 0.9))
def test_log_foc_slope_matches_finite_difference(e, th, t):
    g = GoodSpec(e, th)
    if abs(t) < 1e-4 or 1 - th * e * t / (1 + t) < 0.05:
        return
    h = 1e-6
    fd = (log_foc_factor(t + h, g) - log_foc_factor(t - h, g)) / (2 * h)
    assert log_foc_factor_slope(t, g) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(elasticity, theta, st.floats(-0.9, 3.0))
def test_foc_factor_is_perceived_slope_over_true_demand(e, th, t):
    # the planner equalises (d perceived revenue / dt) / x across goods
    g = GoodSpec(e, th)
    assert foc_factor(t, g) == pytest.approx(good_revenue_slope(t, g) / true_demand(t, g), rel=1e-10, abs=1e-12)


def test_symmetric_mode_round_trip():
    econ = Economy.from_params(0.6, 2.5, 0.55, mode="symmetric")
    assert econ.mode is PerceptionMode.SYMMETRIC
    assert econ.revenue(-0.2, 0.0) == pytest.approx(-0.2 * 0.8 ** -0.6)
    assert hash(econ) == hash(Economy.from_params(0.6, 2.5, 0.55, mode=PerceptionMode.SYMMETRIC))
