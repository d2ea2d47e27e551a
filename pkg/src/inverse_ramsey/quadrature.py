"""Adaptive Simpson quadrature."""

from __future__ import annotations

from collections.abc import Callable


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-7,
                     max_depth: int = 40) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Returns ``(value, error_estimate)``.  Intervals are processed left to
    right, so ``f`` is evaluated in increasing order of the abscissa within
    each refinement level; callers relying on warm starts get nearby nodes.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        v, e = adaptive_simpson(f, b, a, tol, max_depth)
        return -v, e

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total, err = 0.0, 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            continue
        # right pushed first so the left half is refined first
        stack.append((mid, hi, fmid, frm, fhi, right, eps / 2.0, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, eps / 2.0, depth + 1))
    return total, err
