"""Perceived optimum of the two-good planner problem and the shape taxonomy of its FOC locus.

The perceived first-order condition equates the FOC factors of both goods,
``phi_1(t1) = phi_2(t2)`` (see :func:`inverse_ramsey.model.foc_factor`).  Each
factor is piecewise monotone in its own rate, so the locus splits into
segments on which ``t1`` is an explicit function of ``t2``.  Roots of the
perceived budget are located segment by segment and the one with the highest
welfare is returned.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BoundaryCase, DomainError, Infeasible, NoSolution, Unsupported
from .model import (
    T_MAX,
    T_MIN,
    Economy,
    GoodSpec,
    PerceptionMode,
    TaxPair,
    check_target,
    foc_factor,
    laffer_rate,
    log_foc_factor,
    log_foc_factor_slope,
)

XTOL = 1e-13
_SCAN_POINTS = 1200


class CaseLabel(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"


class Branch(str, enum.Enum):
    ORIGIN = "OriginBranch"
    OTHER = "OtherBranch"


@dataclass(frozen=True)
class SolutionFlags:
    inverse_ramsey: bool
    subsidy_on_good1: bool


@dataclass(frozen=True)
class Solution:
    taxes: TaxPair
    mu: float
    perceived_rev: float
    true_rev: float
    welfare: float
    case: CaseLabel | None
    branch: Branch
    flags: SolutionFlags
    target: float = 0.0
    foc_residual: float = 0.0
    budget_residual: float = 0.0
    alternatives: tuple[TaxPair, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "t1": float(self.taxes.t1),
            "t2": float(self.taxes.t2),
            "mu": float(self.mu),
            "target": float(self.target),
            "perceived_revenue": float(self.perceived_rev),
            "true_revenue": float(self.true_rev),
            "welfare": float(self.welfare),
            "case": self.case.value if self.case else None,
            "branch": self.branch.value,
            "inverse_ramsey": bool(self.flags.inverse_ramsey),
            "subsidy_on_good1": bool(self.flags.subsidy_on_good1),
            "foc_residual": float(self.foc_residual),
            "budget_residual": float(self.budget_residual),
            "alternatives": [list(a.as_tuple()) for a in self.alternatives],
        }


# --- monotone pieces of one good's FOC factor --------------------------------


@dataclass(frozen=True)
class MonotonePiece:
    """Interval ``[lo, hi]`` of tax rates on which ``foc_factor`` is strictly monotone."""

    good: GoodSpec
    mode: PerceptionMode
    lo: float
    hi: float
    increasing: bool

    @functools.cached_property
    def v_lo(self) -> float:
        return foc_factor(float(self.lo), self.good, self.mode)

    @functools.cached_property
    def v_hi(self) -> float:
        return foc_factor(float(self.hi), self.good, self.mode)

    @functools.cached_property
    def vmin(self) -> float:
        return min(self.v_lo, self.v_hi)

    @functools.cached_property
    def vmax(self) -> float:
        return max(self.v_lo, self.v_hi)

    def contains_value(self, v, strict=False):
        if strict:
            return (v > self.vmin) & (v < self.vmax)
        return (v >= self.vmin) & (v <= self.vmax)

    def _closed_form_region(self):
        # theta does not bite on t <= 0 under taxed-only perception
        if self.good.theta == 1.0:
            return self.lo, self.hi
        if self.mode == PerceptionMode.TAXED_ONLY and self.lo < 0:
            return self.lo, min(self.hi, 0.0)
        return None

    def inverse(self, v):
        """Tax rate in the piece at which the FOC factor equals ``v``."""
        if isinstance(v, float):
            return self._inverse_scalar(v)
        v_arr = np.asarray(v, dtype=float)
        scalar = v_arr.ndim == 0
        v_arr = np.atleast_1d(v_arr)
        out = np.full(v_arr.shape, np.nan)
        region = self._closed_form_region()
        todo = np.ones(v_arr.shape, dtype=bool)
        e = self.good.e
        if region is not None:
            a, b = region
            fa = float(foc_factor(a, self.good, self.mode))
            fb = float(foc_factor(b, self.good, self.mode))
            in_cf = (v_arr >= min(fa, fb)) & (v_arr <= max(fa, fb))
            s = (1.0 - v_arr[in_cf]) / e
            out[in_cf] = np.clip(s / (1.0 - s), a, b)
            todo &= ~in_cf
        if np.any(todo):
            a = self.lo if region is None else max(self.lo, region[1])
            out[todo] = self._bisect(v_arr[todo], a, self.hi)
        return float(out[0]) if scalar else out

    @functools.cached_property
    def _cf_bounds(self):
        region = self._closed_form_region()
        if region is None:
            return None
        fa = foc_factor(float(region[0]), self.good, self.mode)
        fb = foc_factor(float(region[1]), self.good, self.mode)
        return region[0], region[1], min(fa, fb), max(fa, fb)

    def _inverse_scalar(self, v: float) -> float:
        cf = self._cf_bounds
        if cf is not None and cf[2] <= v <= cf[3]:
            s = (1.0 - v) / self.good.e
            return min(max(s / (1.0 - s), cf[0]), cf[1])
        a = self.lo if cf is None else max(self.lo, cf[1])
        return float(self._bisect(np.array([v]), a, self.hi)[0])

    def _bisect(self, v, a, b):
        sign = 1.0 if self.increasing else -1.0
        if v.size == 1:
            f = lambda t: sign * (float(foc_factor(t, self.good, self.mode)) - v[0])
            fa, fb = f(a), f(b)
            if fa >= 0:
                return np.array([a])
            if fb <= 0:
                return np.array([b])
            return np.array([brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)])
        lo = np.full(v.shape, a)
        hi = np.full(v.shape, b)
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            below = sign * (foc_factor(mid, self.good, self.mode) - v) < 0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


def _upper_limit(g: GoodSpec) -> float:
    lr = laffer_rate(g, perceived=True)
    return T_MAX if lr is None else min(T_MAX, lr)


@functools.lru_cache(maxsize=512)
def monotone_pieces(g: GoodSpec, mode: PerceptionMode) -> tuple[MonotonePiece, ...]:
    lo, hi = T_MIN, _upper_limit(g)
    cuts = {lo, hi}
    if g.theta < 1.0:
        if mode == PerceptionMode.TAXED_ONLY:
            cuts.add(0.0)
        denom = (1.0 - g.theta) * (1.0 - g.theta * g.e)
        if denom != 0.0:
            tv = (2.0 * g.theta - 1.0) / denom
            if lo < tv < hi and (mode == PerceptionMode.SYMMETRIC or tv > 0):
                cuts.add(tv)
    cuts = sorted(c for c in cuts if lo <= c <= hi)
    raw = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        slope = float(log_foc_factor_slope(0.5 * (a + b), g, mode))
        raw.append([a, b, slope > 0])
    merged = [raw[0]]
    for a, b, inc in raw[1:]:
        if inc == merged[-1][2]:
            merged[-1][1] = b
        else:
            merged.append([a, b, inc])
    return tuple(MonotonePiece(g, mode, a, b, inc) for a, b, inc in merged)


def principal_piece(g: GoodSpec, mode: PerceptionMode) -> MonotonePiece:
    """Piece through t = 0; at a kink the correctly perceived side (t <= 0) wins."""
    for p in monotone_pieces(g, mode):
        if p.lo < 0.0 <= p.hi:
            return p
    raise AssertionError("no monotone piece covers t = 0")


# --- FOC residual and the FOC locus ------------------------------------------


def foc_residual(tp, econ: Economy) -> float:
    """Log-form perceived FOC: ``log phi_1(t1) - log phi_2(t2)``.

    With theta_1 = 1 this is
    ``log(1 - e1 t1/(1+t1)) - (1-theta2) e2 log(1+t2) - log(1 - theta2 e2 t2/(1+t2))``.
    Raises DomainError past a perceived Laffer rate.
    """
    t1, t2 = tp
    return float(log_foc_factor(t1, econ.good1, econ.mode) - log_foc_factor(t2, econ.good2, econ.mode))


def t1_on_foc(t2: float, econ: Economy) -> float:
    """Tax on good 1 satisfying the perceived FOC for a given ``t2`` (principal branch)."""
    if not t2 > -1:
        raise DomainError(f"tax rate must exceed -1, got {t2}")
    if t2 < T_MIN or t2 > _upper_limit(econ.good2) or t2 > T_MAX:
        raise NoSolution(f"t2={t2} is outside the FOC domain of good 2")
    v = float(foc_factor(t2, econ.good2, econ.mode))
    piece = principal_piece(econ.good1, econ.mode)
    if v <= 0.0 or not piece.contains_value(v):
        raise NoSolution(
            f"FOC factor {v:.6g} at t2={t2} lies outside the attainable range "
            f"[{piece.vmin:.6g}, {piece.vmax:.6g}] for good 1"
        )
    return piece.inverse(v)


def _u_grid(a: float, b: float, n: int) -> np.ndarray:
    """Grid on [a, b] uniform in log(1+t), refined geometrically towards t = 0."""
    ua, ub = math.log1p(a), math.log1p(b)
    grid = np.linspace(ua, ub, n)
    if ua < 0 < ub:
        grid = np.concatenate([grid, np.geomspace(1e-9, ub, n // 4), -np.geomspace(1e-9, -ua, n // 4), [0.0]])
    elif ua >= 0 and ub > 0:
        grid = np.concatenate([grid, np.geomspace(max(ua, 1e-9), ub, n // 4)])
    elif ub <= 0 and ua < 0:
        grid = np.concatenate([grid, -np.geomspace(max(-ub, 1e-9), -ua, n // 4)])
    grid = np.unique(np.clip(grid, ua, ub))
    return np.expm1(grid)


@dataclass(frozen=True)
class FocSegment:
    """Part of the FOC locus where t1 follows one monotone piece of good 1 and t2 one of good 2."""

    piece1: MonotonePiece
    piece2: MonotonePiece
    t2: np.ndarray = field(repr=False)
    t1: np.ndarray = field(repr=False)
    perceived_rev: np.ndarray = field(repr=False)
    true_rev: np.ndarray = field(repr=False)

    def t1_of(self, t2: float) -> float:
        return self.piece1.inverse(float(foc_factor(t2, self.piece2.good, self.piece2.mode)))


@functools.lru_cache(maxsize=256)
def foc_segments(econ: Economy) -> tuple[FocSegment, ...]:
    segs = []
    for p1 in monotone_pieces(econ.good1, econ.mode):
        for p2 in monotone_pieces(econ.good2, econ.mode):
            vlo = max(p1.vmin, p2.vmin, 0.0)
            vhi = min(p1.vmax, p2.vmax)
            if not vhi > vlo:
                continue
            ends = sorted((p2.inverse(vlo), p2.inverse(vhi)))
            a, b = max(ends[0], p2.lo), min(ends[1], p2.hi)
            if not b > a:
                continue
            t2 = _u_grid(a, b, _SCAN_POINTS)
            v = foc_factor(t2, econ.good2, econ.mode)
            ok = (v > 0) & p1.contains_value(v)
            t2, v = t2[ok], v[ok]
            if t2.size < 2:
                continue
            t1 = p1.inverse(v)
            segs.append(FocSegment(
                p1, p2, t2, t1,
                np.asarray(econ.revenue(t1, t2, perceived=True)),
                np.asarray(econ.revenue(t1, t2, perceived=False)),
            ))
    return tuple(segs)


def foc_points_where(econ: Economy, target: float, perceived: bool = True) -> list[TaxPair]:
    """All points of the FOC locus where (perceived or true) revenue equals ``target``."""
    found = []
    for seg in foc_segments(econ):
        vals = (seg.perceived_rev if perceived else seg.true_rev) - target

        def resid(t2, seg=seg):
            return econ.revenue(seg.t1_of(t2), t2, perceived=perceived) - target

        for k in np.flatnonzero(vals == 0.0):
            found.append((float(seg.t1[k]), float(seg.t2[k])))
        sign = np.sign(vals)
        for k in np.flatnonzero(sign[:-1] * sign[1:] < 0):
            t2 = brentq(resid, seg.t2[k], seg.t2[k + 1], xtol=XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
            found.append((seg.t1_of(t2), t2))
    found.sort(key=lambda p: p[1])
    unique = []
    for p in found:
        if not unique or abs(p[0] - unique[-1][0]) + abs(p[1] - unique[-1][1]) > 1e-9:
            unique.append(p)
    return [TaxPair(a, b) for a, b in unique]


def max_revenue_on_foc(econ: Economy, perceived: bool = True) -> float:
    segs = foc_segments(econ)
    if not segs:
        return 0.0
    return float(max(np.max(s.perceived_rev if perceived else s.true_rev) for s in segs))


# --- the branch through the origin ------------------------------------------


@dataclass(frozen=True)
class OriginPath:
    """Principal FOC branch followed from zero taxes in the direction of rising revenue.

    ``fold_revenue`` is the first local maximum of perceived revenue along the
    path; targets above it are not reachable continuously from R = 0.
    """

    econ: Economy
    direction: int
    t2: np.ndarray = field(repr=False)
    t1: np.ndarray = field(repr=False)
    revenue: np.ndarray = field(repr=False)
    fold_index: int

    @property
    def fold_revenue(self) -> float:
        return float(self.revenue[self.fold_index])

    def taxes_at(self, r: float) -> TaxPair:
        if r == 0.0:
            return TaxPair(0.0, 0.0)
        if self.direction == 0 or r > self.fold_revenue:
            raise Infeasible(
                f"perceived revenue {r} is beyond the origin branch (max {self.fold_revenue:.6g})",
                max_revenue=self.fold_revenue,
            )
        rev = self.revenue[: self.fold_index + 1]
        k = int(np.searchsorted(rev, r))  # rev is increasing up to the fold
        if rev[k] == r:
            return TaxPair(float(self.t1[k]), float(self.t2[k]))

        def resid(t2):
            return self.econ.revenue(t1_on_foc(t2, self.econ), t2) - r

        t2 = brentq(resid, self.t2[k - 1], self.t2[k], xtol=XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
        return TaxPair(t1_on_foc(t2, self.econ), t2)


def _principal_valid(t2, econ):
    try:
        t1_on_foc(t2, econ)
        return True
    except (NoSolution, DomainError):
        return False


@functools.lru_cache(maxsize=256)
def origin_path(econ: Economy) -> OriginPath:
    probe = 1e-7
    gains = {}
    for d in (1, -1):
        try:
            gains[d] = econ.revenue(t1_on_foc(d * probe, econ), d * probe)
        except (NoSolution, DomainError):
            gains[d] = -np.inf
    direction = max(gains, key=gains.get)
    if not gains[direction] > 0:
        z = np.zeros(1)
        return OriginPath(econ, 0, z, z, z, 0)

    end = T_MAX if direction > 0 else T_MIN
    grid = _u_grid(0.0, end, 4 * _SCAN_POINTS) if direction > 0 else _u_grid(end, 0.0, 4 * _SCAN_POINTS)[::-1]
    v = foc_factor(grid, econ.good2, econ.mode)
    piece = principal_piece(econ.good1, econ.mode)
    ok = (v > 0) & piece.contains_value(v) & (grid <= _upper_limit(econ.good2))
    bad = np.flatnonzero(~ok)
    n_valid = bad[0] if bad.size else grid.size
    if n_valid < grid.size:
        a, b = grid[n_valid - 1], grid[n_valid]
        for _ in range(80):
            m = 0.5 * (a + b)
            if _principal_valid(m, econ):
                a = m
            else:
                b = m
        grid = np.append(grid[:n_valid], a)
    t1 = piece.inverse(foc_factor(grid, econ.good2, econ.mode))
    rev = np.asarray(econ.revenue(t1, grid))
    drop = np.flatnonzero(np.diff(rev) <= 0)
    fold = int(drop[0]) if drop.size else rev.size - 1
    return OriginPath(econ, direction, grid, t1, rev, fold)


# --- the perceived problem ---------------------------------------------------


def _inverse_ramsey_goods(econ: Economy) -> tuple[int, int]:
    """(i, j): i is the misperceived good if exactly one is, else the more elastic one."""
    th = (econ.good1.theta, econ.good2.theta)
    if th[0] < 1.0 <= th[1]:
        return 0, 1
    if th[1] < 1.0 <= th[0]:
        return 1, 0
    return (0, 1) if econ.good1.e > econ.good2.e else (1, 0)


def tax_ratio_inverse_ramsey(tp, econ: Economy) -> bool:
    i, j = _inverse_ramsey_goods(econ)
    s = [t / (1.0 + t) for t in tp]
    if econ.good1.e == econ.good2.e and econ.good1.theta == econ.good2.theta:
        return False
    return bool(s[i] > s[j])


def multiplier(tp, econ: Economy) -> float:
    """Lagrange multiplier of the perceived budget, ``1 / phi_1(t1)``."""
    return 1.0 / float(foc_factor(tp.t1 if isinstance(tp, TaxPair) else tp[0], econ.good1, econ.mode))


def _build_solution(tp: TaxPair, econ: Economy, R: float, branch: Branch, alternatives=()) -> Solution:
    try:
        case = classify_case(econ)
    except (BoundaryCase, Unsupported):
        case = None
    prev = float(econ.revenue(tp.t1, tp.t2, perceived=True))
    return Solution(
        taxes=tp,
        mu=multiplier(tp, econ),
        perceived_rev=prev,
        true_rev=float(econ.revenue(tp.t1, tp.t2, perceived=False)),
        welfare=float(econ.welfare(tp.t1, tp.t2)),
        case=case,
        branch=branch,
        flags=SolutionFlags(tax_ratio_inverse_ramsey(tp, econ), bool(tp.t1 < 0)),
        target=R,
        foc_residual=foc_residual(tp, econ),
        budget_residual=prev - R,
        alternatives=tuple(alternatives),
    )


def _same(a: TaxPair, b: TaxPair, tol=1e-8) -> bool:
    return abs(a.t1 - b.t1) <= tol and abs(a.t2 - b.t2) <= tol


def solve_perceived(econ: Economy, R: float, branch: str = "best") -> Solution:
    """Solve the planner's perceived problem for revenue target ``R``.

    ``branch="best"`` returns the FOC/budget intersection with the highest
    welfare (ties go to the root on the origin branch).  ``branch="origin"``
    follows the FOC from zero taxes, which is what a continuation in ``R``
    starting at R = 0 tracks.
    """
    R = check_target(R)
    path = origin_path(econ)
    try:
        origin_root = path.taxes_at(R)
    except Infeasible:
        origin_root = None
    if branch == "origin":
        if origin_root is None:
            raise Infeasible(
                f"target {R} is not reachable along the origin branch", max_revenue=path.fold_revenue
            )
        return _build_solution(origin_root, econ, R, Branch.ORIGIN)
    if branch != "best":
        raise ValueError(f"unknown branch selector {branch!r}")

    roots = foc_points_where(econ, R, perceived=True)
    if origin_root is not None and not any(_same(origin_root, r) for r in roots):
        roots.append(origin_root)
    if not roots:
        raise Infeasible(
            f"no point on the perceived FOC locus raises perceived revenue {R}",
            max_revenue=max_revenue_on_foc(econ),
        )
    w = np.array([econ.welfare(r.t1, r.t2) for r in roots])
    best_w = w.max()
    tied = [r for r, wi in zip(roots, w) if wi >= best_w - 1e-12 * max(1.0, abs(best_w))]
    chosen = next((r for r in tied if origin_root is not None and _same(r, origin_root)), tied[0])
    label = Branch.ORIGIN if origin_root is not None and _same(chosen, origin_root) else Branch.OTHER
    others = [r for r in roots if not _same(r, chosen)]
    return _build_solution(chosen, econ, R, label, others)


# --- closed-form shape diagnostics (good 1 correctly perceived) -------------


def initial_slope(econ: Economy) -> float:
    """dt1/dt2 of the perceived FOC locus leaving the origin towards t2 > 0."""
    return 2.0 * (econ.good2.e / econ.good1.e) * (econ.good2.theta - 0.5)


def vertical_tangent_t2(econ: Economy) -> float | None:
    th, e2 = econ.good2.theta, econ.good2.e
    denom = (1.0 - th) * (1.0 - th * e2)
    if th >= 1.0 or denom == 0.0:
        return None
    value = 2.0 * (th - 0.5) / denom
    return value if value > 0 else None


def perceived_laffer_t2(econ: Economy) -> float | None:
    return laffer_rate(econ.good2, perceived=True)


def classify_case(econ: Economy) -> CaseLabel:
    if econ.good1.theta != 1.0:
        raise Unsupported("case taxonomy assumes good 1 is correctly perceived (theta1 = 1)")
    th, e2 = econ.good2.theta, econ.good2.e
    for edge, name in ((0.5, "1/2"), (1.0 / e2, "1/e2")):
        if math.isclose(th, edge, rel_tol=1e-12, abs_tol=1e-15):
            raise BoundaryCase(f"theta2={th} equals the taxonomy boundary {name}")
    positive_slope = th > 0.5
    laffer = th * e2 > 1.0
    if positive_slope:
        return CaseLabel.CASE1 if laffer else CaseLabel.CASE3
    return CaseLabel.CASE2 if laffer else CaseLabel.CASE4
