"""One-dimensional root finding and minimization.

Every residual the solvers hand to these routines is monotone (roots) or
convex/unimodal (minima), so plain bisection and golden-section search are
unconditionally convergent and there is no payoff in anything fancier.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import BracketError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float,
    flo: float | None = None,
    fhi: float | None = None,
    max_iter: int = 200,
) -> float:
    """Root of f on [lo, hi] assuming a sign change; returns the bracket midpoint."""
    if flo is None:
        flo = f(lo)
    if fhi is None:
        fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}] (f={flo}, {fhi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def golden_min(
    f: Callable[[float], float], lo: float, hi: float, xtol: float
) -> tuple[float, float]:
    """Minimum of a unimodal f on [lo, hi] to |x - x*| <= xtol."""
    if hi < lo:
        raise BracketError(f"empty interval [{lo}, {hi}]")
    if hi - lo <= xtol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    # include the endpoints of the original interval in the comparison so
    # boundary minima are returned exactly
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for x in (lo, hi):
        fx = f(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def central_derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """Central difference; falls back to a forward difference at the left edge."""
    if x - h < 0.0:
        return (f(x + h) - f(x)) / h
    return (f(x + h) - f(x - h)) / (2.0 * h)


def minimize_convex(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float,
) -> tuple[float, float]:
    """Minimum of a convex f on [lo, hi].

    Bisection on the sign of a finite-difference derivative narrows the
    bracket, then golden-section polishes it to xtol. Boundary minima are
    detected from the derivative sign at the endpoints.
    """
    if hi < lo:
        raise BracketError(f"empty interval [{lo}, {hi}]")
    if hi - lo <= xtol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    h = max(xtol, 1e-9 * (1.0 + abs(lo) + abs(hi)))
    d_lo = central_derivative(f, lo, h)
    if d_lo >= 0.0:
        return lo, f(lo)
    d_hi = central_derivative(f, hi, h)
    if d_hi <= 0.0:
        return hi, f(hi)
    a, b = lo, hi
    coarse = max(xtol * 256.0, 64.0 * h)
    while b - a > coarse:
        mid = 0.5 * (a + b)
        if central_derivative(f, mid, h) < 0.0:
            a = mid
        else:
            b = mid
    return golden_min(f, a, b, xtol)


def sign_change_brackets(
    f: Callable[[float], float], lo: float, hi: float, n: int
) -> list[tuple[float, float, float, float]]:
    """Scan n+1 equispaced points and return (a, b, fa, fb) sign-change brackets."""
    step = (hi - lo) / n
    xs = [lo + i * step for i in range(n + 1)]
    xs[-1] = hi
    out = []
    f_prev = f(xs[0])
    for i in range(1, len(xs)):
        f_cur = f(xs[i])
        if f_prev == 0.0 or f_prev * f_cur < 0.0:
            out.append((xs[i - 1], xs[i], f_prev, f_cur))
        f_prev = f_cur
    return out
