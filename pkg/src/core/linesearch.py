"""
Scalar root finding and line searches.

- bisect_sign: bisection on a sign predicate, for roots where the function
  itself is best evaluated in log form.
- golden_section_batch: golden-section search run on many independent
  brackets at once (one per p value).
- grid_then_golden: coarse grid followed by golden refinement of the
  bracketing cell, vectorized over rows.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

import numpy as np
from numpy.typing import NDArray

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0          # 1/phi
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0   # 1/phi^2


def bisect_sign(
    positive: Callable[[float], bool],
    a: float,
    b: float,
    tol: float = 1e-14,
    max_iter: int = 200,
) -> float:
    """
    Root of a function that is positive left of the root on [a, b].

    `positive(x)` reports the sign; the caller guarantees positive(a) and
    not positive(b).
    """
    for _ in range(max_iter):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if positive(mid):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def golden_section_batch(
    f: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    lo: NDArray[np.float64],
    hi: NDArray[np.float64],
    tol: float = 1e-12,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Minimize a row-wise unimodal objective on [lo_i, hi_i] for every i.

    `f` maps an array of candidate points (one per row) to objective values.
    Returns (argmin, min) per row.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    width = float(np.max(b - a)) if a.size else 0.0
    if width <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    steps = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * (b - a)
    d = a + INV_PHI * (b - a)
    yc = f(c)
    yd = f(d)
    for _ in range(steps):
        left = yc < yd
        # left: keep [a, d]; right: keep [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = a + INV_PHI_SQUARE * (b - a)
        new_d = a + INV_PHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        yc_prev, yd_prev = yc, yd
        fresh = f(np.where(left, c_next, d_next))
        yc = np.where(left, fresh, yd_prev)
        yd = np.where(left, yc_prev, fresh)
        c, d = c_next, d_next
    x = 0.5 * (a + b)
    return x, f(x)


def grid_then_golden(
    f: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]],
    rows: int,
    lo: float = 0.0,
    hi: float = 1.0,
    grid_points: int = 1001,
    tol: float = 1e-12,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Row-wise minimization over [lo, hi].

    `f(x, idx)` evaluates the objective of rows `idx` at points `x`; both
    arrays share a shape. The grid pass evaluates an (rows, grid_points)
    block, golden refinement then runs on the cell around each grid minimum.
    The better of the grid point and the refined point is returned.
    """
    grid = np.linspace(lo, hi, grid_points)
    idx = np.arange(rows)
    block = f(np.broadcast_to(grid, (rows, grid_points)), np.broadcast_to(idx[:, None], (rows, grid_points)))
    k = np.argmin(block, axis=1)
    best_x = grid[k]
    best_y = block[idx, k]

    cell_lo = grid[np.maximum(k - 1, 0)]
    cell_hi = grid[np.minimum(k + 1, grid_points - 1)]
    ref_x, ref_y = golden_section_batch(lambda x: f(x, idx), cell_lo, cell_hi, tol)

    better = ref_y < best_y
    return np.where(better, ref_x, best_x), np.where(better, ref_y, best_y)
