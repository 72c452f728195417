"""One-dimensional search utilities.

Every optimization in the package reduces to nested scalar problems on a
closed interval: golden-section search for unimodal maxima, bisection for
the crossing of a decreasing and an increasing term, and a grid-then-refine
driver for objectives that may have a kink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-10
GRID_POINTS = 1001

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


class NonFiniteError(ValueError):
    """An objective returned NaN or an infinity."""

    def __init__(self, x, value):
        super().__init__(f"objective is not finite at x={x!r} (value {value!r})")
        self.x = x
        self.value = value


@dataclass(frozen=True)
class OptResult:
    argmax: float
    value: float
    iterations: int
    converged: bool


def _checked(f: Callable[[float], float], x: float) -> float:
    v = float(f(x))
    if not math.isfinite(v):
        raise NonFiniteError(x, v)
    return v


def maximize_unimodal(
    f: Callable[[float], float], lo: float, hi: float, tol: float = DEFAULT_TOL
) -> OptResult:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are compared against the final interior point so that
    boundary maxima are returned exactly. Ties go to the smaller abscissa.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")

    a, b = float(lo), float(hi)
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = _checked(f, c), _checked(f, d)
    it = 0
    while b - a > tol:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = _checked(f, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = _checked(f, d)
        if it > 500:
            break
    x_best, f_best = (c, fc) if fc >= fd else (d, fd)
    for x in (lo, hi):
        fx = _checked(f, x)
        if fx > f_best or (fx == f_best and x < x_best):
            x_best, f_best = x, fx
    return OptResult(x_best, f_best, it, b - a <= tol)


def solve_balance(f, g, lo, hi, tol: float = DEFAULT_TOL):
    """Point on ``[lo, hi]`` where ``f`` and ``g`` meet.

    Intended for ``f`` decreasing and ``g`` increasing (or the reverse), so
    that the crossing maximizes ``min(f, g)``. When ``f - g`` keeps one sign
    the endpoint with the larger ``min(f, g)`` is returned, ``lo`` on ties.

    ``f`` and ``g`` may be numpy-vectorized; ``lo`` and ``hi`` then broadcast
    and one crossing is solved per element.
    """
    if np.ndim(lo) == 0 and np.ndim(hi) == 0:
        return _solve_balance_scalar(f, g, float(lo), float(hi), tol)
    lo_a, hi_a = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    if np.any(lo_a > hi_a):
        raise ValueError("need lo <= hi")
    lo_a, hi_a = lo_a.copy(), hi_a.copy()

    def diff(x):
        fx, gx = np.asarray(f(x), dtype=float), np.asarray(g(x), dtype=float)
        bad = ~(np.isfinite(fx) & np.isfinite(gx))
        if np.any(bad):
            xb = np.broadcast_to(x, bad.shape)[bad].ravel()[0]
            raise NonFiniteError(float(xb), "f or g")
        return fx, gx

    f_lo, g_lo = diff(lo_a)
    f_hi, g_hi = diff(hi_a)
    d_lo, d_hi = f_lo - g_lo, f_hi - g_hi
    crossing = (d_lo * d_hi) <= 0
    endpoint = np.where(np.minimum(f_hi, g_hi) > np.minimum(f_lo, g_lo), hi_a, lo_a)

    a, b = lo_a.copy(), hi_a.copy()
    s_lo = np.sign(d_lo)
    # exact zeros at an end short-circuit the bracket
    b = np.where(d_lo == 0, a, b)
    a = np.where((d_hi == 0) & (d_lo != 0), b, a)
    for _ in range(200):
        if not np.any(crossing & (b - a > tol)):
            break
        m = 0.5 * (a + b)
        fm, gm = diff(m)
        same = np.sign(fm - gm) == s_lo
        a = np.where(crossing & same, m, a)
        b = np.where(crossing & ~same, m, b)
    root = np.where(crossing, 0.5 * (a + b), endpoint)
    if root.ndim == 0:
        return float(root)
    return root


def _solve_balance_scalar(f, g, lo: float, hi: float, tol: float) -> float:
    if lo > hi:
        raise ValueError("need lo <= hi")

    def terms(x):
        fx, gx = float(f(x)), float(g(x))
        if not (math.isfinite(fx) and math.isfinite(gx)):
            raise NonFiniteError(x, (fx, gx))
        return fx, gx

    f_lo, g_lo = terms(lo)
    f_hi, g_hi = terms(hi)
    d_lo, d_hi = f_lo - g_lo, f_hi - g_hi
    if d_lo == 0.0:
        return lo
    if d_hi == 0.0:
        return hi
    if d_lo * d_hi > 0:
        return hi if min(f_hi, g_hi) > min(f_lo, g_lo) else lo
    a, b = lo, hi
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm, gm = terms(m)
        if (fm - gm > 0) == (d_lo > 0):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def grid_then_refine(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    points: int = GRID_POINTS,
    tol: float = DEFAULT_TOL,
) -> OptResult:
    """Maximize ``f`` with a uniform grid followed by golden-section refinement.

    ``f`` must accept both a numpy array and a plain float. The refinement
    runs on the two grid cells around the best grid point; the grid optimum
    is kept when the refinement does not improve on it, so plateaus return
    their smallest grid maximizer.
    """
    xs = np.linspace(lo, hi, points)
    vals = np.asarray(f(xs), dtype=float)
    if not np.all(np.isfinite(vals)):
        i = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise NonFiniteError(float(xs[i]), vals[i])
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, points - 1)]
    scalar = lambda x: float(f(x))
    res = maximize_unimodal(scalar, a, b, tol)
    if res.value > vals[i]:
        return OptResult(res.argmax, res.value, res.iterations + points, res.converged)
    return OptResult(float(xs[i]), float(vals[i]), res.iterations + points, res.converged)
