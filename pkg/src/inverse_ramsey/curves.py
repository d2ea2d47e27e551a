"""Tracing of the FOC and budget loci in (t1, t2) space."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, EmptyLocus, NoSolution
from .model import T_MAX, T_MIN, Economy, TaxPair, check_target, laffer_rate, good_revenue
from .solver import foc_residual, t1_on_foc

DEFAULT_STEP = 1e-2
DEFAULT_TOL = 1e-8
_MIN_STEP = 1e-12
_FIRST_STEP = 1e-7


class CurveKind(str, enum.Enum):
    PERCEIVED_FOC = "PerceivedFOC"
    TRUE_FOC = "TrueFOC"
    PERCEIVED_BUDGET = "PerceivedBudget"
    TRUE_BUDGET = "TrueBudget"
    ADJUSTED_PERCEIVED_BUDGET = "AdjustedPerceivedBudget"


@dataclass
class CurveTrace:
    kind: CurveKind
    points: np.ndarray  # shape (n, 2), columns t1, t2
    terminal: list[str] = field(default_factory=list)

    @property
    def t1(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def t2(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self):
        return len(self.points)

    def tax_pairs(self) -> list[TaxPair]:
        return [TaxPair(a, b) for a, b in self.points]

    def rows(self):
        for a, b in self.points:
            yield (self.kind.value, float(a), float(b))


@dataclass(frozen=True)
class Window:
    t1: tuple[float, float] = (T_MIN, T_MAX)
    t2: tuple[float, float] = (T_MIN, T_MAX)

    def contains(self, p) -> bool:
        return self.t1[0] <= p[0] <= self.t1[1] and self.t2[0] <= p[1] <= self.t2[1]


# --- perceived / true FOC ---------------------------------------------------


def _foc_point(t2, econ):
    return np.array([t1_on_foc(t2, econ), t2])


def trace_foc_curve(econ: Economy, t2_range=(0.0, T_MAX), *, window: Window | None = None,
                    step: float = DEFAULT_STEP, tol: float = DEFAULT_TOL,
                    kind: CurveKind = CurveKind.PERCEIVED_FOC) -> CurveTrace:
    """Sample the principal FOC branch ``t1(t2)`` for t2 in ``t2_range``.

    Consecutive samples are at most ``step`` apart and the FOC residual at
    every chord midpoint stays below ``tol``.  Extrema of t1 along t2 (the
    vertical tangents of the figures) are located and inserted as samples.
    """
    window = window or Window()
    lo, hi = float(t2_range[0]), float(t2_range[1])
    lo, hi = max(lo, window.t2[0], T_MIN), min(hi, window.t2[1], T_MAX)
    nodes = [lo, hi] if not (lo < 0 < hi) else [lo, 0.0, hi]
    terminal = []
    try:
        pts = [_foc_point(lo, econ)]
    except (NoSolution, DomainError) as exc:
        if not lo < 0 <= hi:
            return CurveTrace(kind, np.empty((0, 2)), [f"no FOC solution at t2={lo}: {exc}"])
        lo = _first_valid_t2(lo, econ)
        terminal.append(f"FOC branch starts near t2={lo:.10g}")
        pts = [_foc_point(lo, econ)]

    def ok_mid(p, q):
        try:
            return abs(foc_residual(0.5 * (p + q), econ)) < tol
        except DomainError:
            return False

    h = _FIRST_STEP
    for node in nodes[1:]:
        while pts[-1][1] < node:
            p = pts[-1]
            t2n = min(p[1] + h, node)
            try:
                q = _foc_point(t2n, econ)
            except (NoSolution, DomainError) as exc:
                if h > _MIN_STEP:
                    h /= 2
                    continue
                terminal.append(f"FOC branch ends near t2={p[1]:.10g}: {exc}")
                break
            if (np.hypot(*(q - p)) > step or not ok_mid(p, q)) and h > _MIN_STEP:
                h /= 2
                continue
            pts.append(q)
            _refine_extremum(pts, econ)
            h = min(h * 1.5, step)
        else:
            continue
        break
    if len(terminal) == len([t for t in terminal if "starts" in t]):
        terminal.append("end of t2 range")
    pts = np.array(pts)
    inside = (pts[:, 0] >= window.t1[0]) & (pts[:, 0] <= window.t1[1])
    if not inside.all():
        terminal.append("samples outside the t1 window dropped")
    return CurveTrace(kind, pts[inside], terminal)


def _first_valid_t2(lo, econ):
    """Smallest t2 in (lo, 0] where the principal FOC branch has a solution (bisection)."""
    a, b = lo, 0.0
    for _ in range(100):
        m = 0.5 * (a + b)
        try:
            t1_on_foc(m, econ)
            b = m
        except (NoSolution, DomainError):
            a = m
    return b


def _refine_extremum(pts, econ):
    if len(pts) < 3:
        return
    a, b, c = pts[-3], pts[-2], pts[-1]
    d1, d2 = b[0] - a[0], c[0] - b[0]
    if d1 * d2 >= 0:
        return
    sign = 1.0 if d1 > 0 else -1.0  # maximum if t1 was rising
    res = minimize_scalar(lambda t2: -sign * t1_on_foc(t2, econ), bounds=(a[1], c[1]),
                          method="bounded", options={"xatol": 1e-12})
    t2x = float(res.x)
    if a[1] < t2x < c[1] and abs(t2x - b[1]) > 1e-13:
        pts.insert(len(pts) - 2 if t2x < b[1] else len(pts) - 1, _foc_point(t2x, econ))


def foc_extremum_t2(trace: CurveTrace) -> float | None:
    """t2 at the first interior extremum of t1 along a traced FOC curve."""
    d = np.diff(trace.t1)
    flips = np.flatnonzero(d[:-1] * d[1:] < 0)
    if not flips.size:
        return None
    return float(trace.t2[flips[0] + 1])


# --- budget loci: pseudo-arclength continuation -----------------------------


def _budget_start(econ: Economy, R: float, perceived: bool) -> np.ndarray:
    g1, g2 = econ.good1, econ.good2

    def peak(g):
        lr = laffer_rate(g, perceived)
        return T_MAX if lr is None else min(lr, T_MAX)

    def rev(t, g):
        return float(good_revenue(t, g, econ.mode, perceived))

    if R == 0.0:
        return np.zeros(2)
    p2, p1 = peak(g2), peak(g1)
    if rev(p2, g2) >= R:
        return np.array([0.0, brentq(lambda t: rev(t, g2) - R, 0.0, p2, xtol=1e-15)])
    if rev(p1, g1) >= R:
        return np.array([brentq(lambda t: rev(t, g1) - R, 0.0, p1, xtol=1e-15), 0.0])
    need = R - rev(p1, g1)
    return np.array([p1, brentq(lambda t: rev(t, g2) - need, T_MIN, p2, xtol=1e-15)])


def _newton_project(G, grad, px, py, tx, ty, tol):
    """Correct (px, py) onto G = 0 within the line orthogonal to the tangent (tx, ty)."""
    x, y = px, py
    for _ in range(12):
        try:
            g = G(x, y)
            if abs(g) < tol:
                return x, y
            gx, gy = grad(x, y)
        except DomainError:
            return None
        det = gx * ty - gy * tx
        if det == 0.0:
            return None
        c = -(tx * (x - px) + ty * (y - py))
        # solve [[gx, gy], [tx, ty]] d = [-g, c]
        dx = (-g * ty - gy * c) / det
        dy = (gx * c + g * tx) / det
        x, y = x + dx, y + dy
        if not (x > -1 and y > -1):
            return None
    try:
        return (x, y) if abs(G(x, y)) < tol else None
    except DomainError:
        return None


def trace_implicit(G, grad, start, window: Window, *, step=DEFAULT_STEP, tol=DEFAULT_TOL,
                   max_points=500_000):
    """Pseudo-arclength continuation of the zero set of ``G(x, y)`` through ``start``.

    Both directions are followed until the curve leaves ``window`` or closes.
    A step is accepted when the corrector converges, the tangent turns by less
    than ~18 degrees, and ``|G|`` at the chord midpoint is below ``tol``.
    """
    newton_tol = min(tol * 1e-3, 1e-12)
    x0, y0 = float(start[0]), float(start[1])
    halves = []
    reasons = []
    for orient in (1.0, -1.0):
        gx, gy = grad(x0, y0)
        nrm = math.hypot(gx, gy)
        tx, ty = -orient * gy / nrm, orient * gx / nrm
        px, py = x0, y0
        pts = [(px, py)]
        h = _FIRST_STEP
        reason = "point limit"
        while len(pts) < max_points:
            q = _newton_project(G, grad, px + h * tx, py + h * ty, tx, ty, newton_tol)
            good = q is not None and math.hypot(q[0] - px, q[1] - py) <= step
            if good:
                qx, qy = q
                gx, gy = grad(qx, qy)
                nrm = math.hypot(gx, gy)
                ux, uy = -gy / nrm, gx / nrm
                if ux * tx + uy * ty < 0:
                    ux, uy = -ux, -uy
                good = ux * tx + uy * ty > 0.95
                if good:
                    try:
                        good = abs(G(0.5 * (px + qx), 0.5 * (py + qy))) < tol
                    except DomainError:
                        good = False
            if not good:
                if h < _MIN_STEP:
                    reason = f"step underflow at ({px:.8g}, {py:.8g})"
                    break
                h /= 2
                continue
            if not window.contains(q):
                reason = "left window"
                break
            if len(pts) > 10 and math.hypot(qx - x0, qy - y0) < h:
                pts.append((x0, y0))
                reason = "closed loop"
                break
            pts.append(q)
            px, py, tx, ty = qx, qy, ux, uy
            h = min(1.5 * h, step)
        halves.append(pts)
        reasons.append(reason)
        if reason == "closed loop":
            break
    if len(halves) == 1:
        return np.array(halves[0]), reasons
    back, fwd = halves[1], halves[0]
    return np.array(back[::-1] + fwd[1:]), reasons


def trace_budget_curve(econ: Economy, R: float, which: CurveKind = CurveKind.PERCEIVED_BUDGET, *,
                       window: Window | None = None, step: float = DEFAULT_STEP,
                       tol: float = DEFAULT_TOL, kind: CurveKind | None = None) -> CurveTrace:
    """Trace ``{t : revenue(t) = R}`` for perceived or true revenue."""
    R = check_target(R)
    perceived = which != CurveKind.TRUE_BUDGET
    top = econ.max_revenue(perceived)
    if R > top:
        raise EmptyLocus(f"revenue {R} exceeds the maximum attainable {top:.6g}", max_revenue=top)
    window = window or Window()
    start = _budget_start(econ, R, perceived)

    def G(x, y):
        return econ.revenue(x, y, perceived=perceived) - R

    def grad(x, y):
        return econ.revenue_gradient(x, y, perceived=perceived)

    if not window.contains(start):
        raise EmptyLocus(f"budget locus for R={R} does not start inside the window")
    pts, reasons = trace_implicit(G, grad, start, window, step=step, tol=tol)
    return CurveTrace(kind or which, pts, reasons)


def polyline_intersections(a: CurveTrace, b: CurveTrace, block: int = 512) -> list[tuple[float, float]]:
    """Crossing points of two sampled curves (segment-by-segment, linear interpolation).

    Points are ordered along ``a``.
    """
    P, Q = a.points, b.points
    if len(P) < 2 or len(Q) < 2:
        return []
    q0, q1 = Q[:-1], Q[1:]
    qmin, qmax = np.minimum(q0, q1), np.maximum(q0, q1)
    hits = []
    for start in range(0, len(P) - 1, block):
        p0, p1 = P[start:start + block], P[start + 1:start + block + 1]
        m = min(len(p0), len(p1))
        p0, p1 = p0[:m], p1[:m]
        lo, hi = np.minimum(p0, p1), np.maximum(p0, p1)
        near = np.flatnonzero(np.all(qmax >= lo.min(axis=0), axis=1) & np.all(qmin <= hi.max(axis=0), axis=1))
        if not near.size:
            continue
        bmin, bmax = qmin[near], qmax[near]
        overlap = ((bmax[None, :, 0] >= lo[:, None, 0]) & (bmin[None, :, 0] <= hi[:, None, 0])
                   & (bmax[None, :, 1] >= lo[:, None, 1]) & (bmin[None, :, 1] <= hi[:, None, 1]))
        i, k = np.nonzero(overlap)
        k = near[k]
        if not i.size:
            continue
        r, sv, d = p1[i] - p0[i], q1[k] - q0[k], q0[k] - p0[i]
        den = r[:, 0] * sv[:, 1] - r[:, 1] * sv[:, 0]
        ok = den != 0
        with np.errstate(divide="ignore", invalid="ignore"):
            u = (d[:, 0] * sv[:, 1] - d[:, 1] * sv[:, 0]) / den
            v = (d[:, 0] * r[:, 1] - d[:, 1] * r[:, 0]) / den
        ok &= (u >= 0) & (u <= 1) & (v >= 0) & (v <= 1)
        for idx in np.flatnonzero(ok):
            hits.append((start + i[idx], u[idx], p0[i[idx]] + u[idx] * r[idx]))
    hits.sort(key=lambda h: (h[0], h[1]))
    out = []
    for _, _, x in hits:
        if not out or np.hypot(x[0] - out[-1][0], x[1] - out[-1][1]) > 1e-12:
            out.append((float(x[0]), float(x[1])))
    return out
