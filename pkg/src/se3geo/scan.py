"""One-dimensional global minimization: grid scan plus golden-section refine.

Profiles over the fiber circle can switch a stationary point between a
minimum and a maximum, so refinement is only trusted inside the best grid
cell of a full periodic scan.  Failed evaluations are carried as NaN and
treated as +inf.
"""
from __future__ import annotations

import numpy as np

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def _lt(a: float, b: float) -> bool:
    # NaN-tolerant "a < b" with NaN acting as +inf.
    if np.isnan(a):
        return False
    if np.isnan(b):
        return True
    return a < b


def golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    """Golden-section search on [a, b]; returns (x, f(x)) of the best point."""
    c = b - (b - a) * INVPHI
    d = a + (b - a) * INVPHI
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if _lt(fc, fd) else (d, fd)
    while abs(b - a) > xtol:
        if _lt(fc, fd):
            b, d, fd = d, c, fc
            c = b - (b - a) * INVPHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * INVPHI
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if _lt(fx, best_f):
                best_x, best_f = x, fx
    return best_x, best_f


def periodic_argmin(f, n: int, xtol: float, lo: float = -np.pi, hi: float = np.pi
                    ) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Global scan of a (hi - lo)-periodic profile, then local refinement.

    Evaluates f on a uniform n-point grid over [lo, hi), refines inside the
    cell around the best sample (wrapping across the period boundary), and
    returns (x*, f*, grid, values).  Raises ValueError when every sample
    failed.
    """
    grid = lo + (hi - lo) * np.arange(n) / n
    values = np.array([f(x) for x in grid], dtype=float)
    if np.all(np.isnan(values)):
        raise ValueError("all grid samples failed")
    j = int(np.nanargmin(values))
    period = hi - lo
    step = period / n
    a = grid[j] - step
    b = grid[j] + step

    def f_wrapped(x):
        return f(lo + (x - lo) % period)

    x_ref, f_ref = golden_min(f_wrapped, a, b, xtol)
    if _lt(values[j], f_ref):
        x_ref, f_ref = grid[j], values[j]
    x_ref = lo + (x_ref - lo) % period
    return float(x_ref), float(f_ref), grid, values


def grid_local_minima(values: np.ndarray) -> list[int]:
    """Indices of periodic local minima (NaN-tolerant, plateaus collapse)."""
    n = len(values)
    out = []
    for i in range(n):
        v = values[i]
        if np.isnan(v):
            continue
        left = values[(i - 1) % n]
        right = values[(i + 1) % n]
        if not _lt(left, v) and not _lt(right, v):
            if not (np.isnan(left) and np.isnan(right)):
                out.append(i)
    return out
