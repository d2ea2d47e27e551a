"""Two-good quasilinear economy with constant-elasticity demand.

True demand for good i is ``(1 + t_i) ** -e_i``.  The planner believes the
other consumers' demand is ``(1 + t_i) ** -(theta_i * e_i)``, where the
misperception factor ``theta_i`` applies only to taxed goods unless the
perception mode is symmetric.

All functions accept scalars or numpy arrays for tax rates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

# Admissible tax domain for every search: (T_MIN, T_MAX].
T_MIN = -0.99
T_MAX = 100.0


class PerceptionMode(str, enum.Enum):
    TAXED_ONLY = "taxed_only"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class GoodSpec:
    """One good: true own-price elasticity ``e`` and misperception factor ``theta``."""

    e: float
    theta: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.e) and self.e > 0):
            raise DomainError(f"elasticity must be positive, got {self.e}")
        if not (0 < self.theta <= 1):
            raise DomainError(f"theta must lie in (0, 1], got {self.theta}")

    @property
    def perceived_e(self) -> float:
        return self.theta * self.e


@dataclass(frozen=True)
class TaxPair:
    t1: float
    t2: float

    def __post_init__(self):
        if not (self.t1 > -1 and self.t2 > -1):
            raise DomainError(f"tax rates must exceed -1, got ({self.t1}, {self.t2})")

    @property
    def q1(self) -> float:
        return 1.0 + self.t1

    @property
    def q2(self) -> float:
        return 1.0 + self.t2

    def __iter__(self):
        yield self.t1
        yield self.t2

    def as_tuple(self) -> tuple[float, float]:
        return (float(self.t1), float(self.t2))


def check_target(R: float) -> float:
    R = float(R)
    if not (np.isfinite(R) and R >= 0):
        raise DomainError(f"revenue requirement must be >= 0, got {R}")
    return R


def _is_scalar(t) -> bool:
    return isinstance(t, (float, int)) and not isinstance(t, bool)


def _scalar_theta(t: float, g: GoodSpec, mode) -> float:
    if mode == PerceptionMode.SYMMETRIC or t > 0:
        return g.theta
    return 1.0


def _scalar_log_price(t: float) -> float:
    if t <= -1:
        raise DomainError("tax rate must exceed -1 (consumer price must stay positive)")
    return math.log1p(t)


def _log_price(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= -1):
        raise DomainError("tax rate must exceed -1 (consumer price must stay positive)")
    return np.log1p(t)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def effective_theta(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    """Misperception factor in force at tax rate ``t``."""
    if mode == PerceptionMode.SYMMETRIC or g.theta == 1.0:
        return g.theta
    return np.where(np.asarray(t) > 0, g.theta, 1.0)


def true_demand(t, g: GoodSpec):
    if _is_scalar(t):
        return math.exp(-g.e * _scalar_log_price(t))
    return _out(np.exp(-g.e * _log_price(t)))


def perceived_demand(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    if _is_scalar(t):
        return math.exp(-_scalar_theta(t, g, mode) * g.e * _scalar_log_price(t))
    lq = _log_price(t)
    th = effective_theta(t, g, mode)
    return _out(np.exp(-th * g.e * lq))


def perceived_elasticity(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    return _out(effective_theta(t, g, mode) * g.e)


def good_revenue(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY,
                 perceived: bool = True):
    """Revenue ``t * x(t)`` raised from one good under true or perceived demand."""
    if _is_scalar(t):
        th = _scalar_theta(t, g, mode) if perceived else 1.0
        return t * math.exp(-th * g.e * _scalar_log_price(t))
    x = perceived_demand(t, g, mode) if perceived else true_demand(t, g)
    return _out(np.asarray(t, dtype=float) * x)


def good_revenue_slope(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY,
                       perceived: bool = True):
    """d/dt of ``good_revenue``: ``x * (1 - ebar * t / (1 + t))``."""
    if _is_scalar(t):
        th = _scalar_theta(t, g, mode) if perceived else 1.0
        return math.exp(-th * g.e * _scalar_log_price(t)) * (1.0 - th * g.e * t / (1.0 + t))
    t = np.asarray(t, dtype=float)
    th = effective_theta(t, g, mode) if perceived else 1.0
    x = np.exp(-th * g.e * _log_price(t))
    return _out(x * (1.0 - th * g.e * t / (1.0 + t)))


def welfare_term(t, g: GoodSpec):
    """Indirect-utility contribution of one good, normalised to zero at t = 0.

    Equals ``-(1+t)**(1-e) / (1-e)`` up to an additive constant, and
    ``-log(1+t)`` at e = 1, so it is continuous in ``e``.
    """
    a = 1.0 - g.e
    if _is_scalar(t):
        lq = _scalar_log_price(t)
        return -lq if a == 0.0 else -math.expm1(a * lq) / a
    lq = _log_price(t)
    if a == 0.0:
        return _out(-lq)
    return _out(-np.expm1(a * lq) / a)


def laffer_rate(g: GoodSpec, perceived: bool = True) -> float | None:
    """Revenue-maximising rate of ``t * x(t)`` for t > 0, or None if revenue keeps rising."""
    eff = g.perceived_e if perceived else g.e
    return 1.0 / (eff - 1.0) if eff > 1.0 else None


# --- first-order-condition factor -------------------------------------------
#
# Along the perceived optimum the ratio  x_i / (d revenue_i / d t_i)  is equal
# across goods.  With x_i / xbar_i = (1+t)^((1-theta) e) it reduces to
#     phi_i(t) = (1+t)^((1-theta) e) * (1 - theta e t / (1+t)),
# and the multiplier on the perceived budget is mu = 1 / phi_i.


def foc_factor(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    if _is_scalar(t):
        th = _scalar_theta(t, g, mode)
        return math.exp((1.0 - th) * g.e * _scalar_log_price(t)) * (1.0 - th * g.e * t / (1.0 + t))
    t = np.asarray(t, dtype=float)
    lq = _log_price(t)
    th = effective_theta(t, g, mode)
    b = th * g.e
    return _out(np.exp((1.0 - th) * g.e * lq) * (1.0 - b * t / (1.0 + t)))


def log_foc_factor(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    """``log(foc_factor)``; DomainError past the perceived Laffer rate."""
    if _is_scalar(t):
        th = _scalar_theta(t, g, mode)
        h = 1.0 - th * g.e * t / (1.0 + t)
        if h <= 0:
            raise DomainError("tax rate at or beyond the perceived Laffer rate")
        return (1.0 - th) * g.e * _scalar_log_price(t) + math.log(h)
    t = np.asarray(t, dtype=float)
    lq = _log_price(t)
    th = effective_theta(t, g, mode)
    h = 1.0 - th * g.e * t / (1.0 + t)
    if np.any(h <= 0):
        raise DomainError("tax rate at or beyond the perceived Laffer rate")
    return _out((1.0 - th) * g.e * lq + np.log(h))


def log_foc_factor_slope(t, g: GoodSpec, mode: PerceptionMode = PerceptionMode.TAXED_ONLY):
    """Derivative of ``log_foc_factor`` in t (one-sided at a kink: the t > 0 branch wins only for t > 0)."""
    t = np.asarray(t, dtype=float)
    th = effective_theta(t, g, mode)
    a = (1.0 - th) * g.e
    b = th * g.e
    return _out(((a - b) + a * (1.0 - b) * t) / ((1.0 + t) * (1.0 + (1.0 - b) * t)))


@dataclass(frozen=True)
class Economy:
    good1: GoodSpec
    good2: GoodSpec
    mode: PerceptionMode = PerceptionMode.TAXED_ONLY

    def __post_init__(self):
        object.__setattr__(self, "mode", PerceptionMode(self.mode))

    @classmethod
    def from_params(cls, e1, e2, theta2=1.0, theta1=1.0, mode=PerceptionMode.TAXED_ONLY):
        return cls(GoodSpec(e1, theta1), GoodSpec(e2, theta2), PerceptionMode(mode))

    @property
    def goods(self) -> tuple[GoodSpec, GoodSpec]:
        return (self.good1, self.good2)

    @property
    def misperceived(self) -> bool:
        return self.good1.theta < 1.0 or self.good2.theta < 1.0

    def without_misperception(self) -> Economy:
        return replace(self, good1=GoodSpec(self.good1.e, 1.0), good2=GoodSpec(self.good2.e, 1.0))

    def with_theta2(self, theta2: float) -> Economy:
        return replace(self, good2=GoodSpec(self.good2.e, theta2))

    def revenue(self, t1, t2, perceived: bool = True):
        if _is_scalar(t1) and _is_scalar(t2):
            return (good_revenue(t1, self.good1, self.mode, perceived)
                    + good_revenue(t2, self.good2, self.mode, perceived))
        return _out(np.add(good_revenue(t1, self.good1, self.mode, perceived),
                           good_revenue(t2, self.good2, self.mode, perceived)))

    def revenue_gradient(self, t1, t2, perceived: bool = True):
        return (good_revenue_slope(t1, self.good1, self.mode, perceived),
                good_revenue_slope(t2, self.good2, self.mode, perceived))

    def welfare(self, t1, t2):
        if _is_scalar(t1) and _is_scalar(t2):
            return welfare_term(t1, self.good1) + welfare_term(t2, self.good2)
        return _out(np.add(welfare_term(t1, self.good1), welfare_term(t2, self.good2)))

    def max_revenue(self, perceived: bool = True) -> float:
        """Largest revenue attainable on the admissible domain (goods are separable)."""
        total = 0.0
        for g in self.goods:
            peak = laffer_rate(g, perceived)
            peak = T_MAX if peak is None else min(peak, T_MAX)
            total += float(good_revenue(peak, g, self.mode, perceived))
        return total


def perceived_revenue(tp, econ: Economy):
    t1, t2 = tp
    return econ.revenue(t1, t2, perceived=True)


def true_revenue(tp, econ: Economy):
    t1, t2 = tp
    return econ.revenue(t1, t2, perceived=False)


def welfare(tp, econ: Economy):
    t1, t2 = tp
    return econ.welfare(t1, t2)
