"""Exhaustive boundary-pair scan, the O(k(n-k)) baseline engine.

Scans k1 = k..n in the outer loop and k0 = k-1..0 descending in the inner
loop, solving each candidate system in O(1) via incrementally maintained
block sums and returning the first pair that passes all five optimality
conditions.  That pair is unique; the scan order just fixes which one is
met first.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .core import METHOD_GRID, ProjectionResult
from .esgs import _check_sorted_args


@njit(cache=True)
def _grid_kernel(values, k, r):
    n = values.size
    sa0 = 0.0
    for i in range(k - 1):
        sa0 += values[i]
    sb_base = values[k - 1]
    visited = 0
    for k1 in range(k, n + 1):
        sa = sa0
        sb = sb_base
        for k0 in range(k - 1, -1, -1):
            visited += 1
            kk0 = k - k0
            # Both sides of each condition are scaled by rho > 0 so no
            # division roundoff can flip a boundary-equality comparison.
            rho = float(k0 * (k1 - k0) + kk0 * kk0)
            num_theta = k0 * sb - kk0 * (sa - r)
            num_lam = kk0 * sb + (k1 - k0) * (sa - r)
            num_tpl = k * sb + (k1 - k) * (sa - r)
            ok = num_lam > 0.0
            if ok and k0 > 0:
                ok = values[k0 - 1] * rho > num_tpl
            if ok:
                ok = num_tpl >= rho * values[k0]
            if ok:
                ok = rho * values[k1 - 1] >= num_theta
            if ok and k1 < n:
                ok = num_theta > rho * values[k1]
            if ok:
                theta = num_theta / rho
                lam = num_lam / rho
                x = np.empty(n)
                for i in range(k0):
                    x[i] = values[i] - lam
                for i in range(k0, k1):
                    x[i] = theta
                for i in range(k1, n):
                    x[i] = values[i]
                return x, lam, theta, k0, k1, visited
            if k0 > 0:
                sa -= values[k0 - 1]
                sb += values[k0 - 1]
        if k1 < n:
            sb_base += values[k1]
    return np.empty(0), 0.0, 0.0, -1, -1, visited


def project_sorted_grid(values: np.ndarray, k: int, r: float) -> ProjectionResult:
    """Project sorted values; iterations counts boundary pairs visited."""
    values = _check_sorted_args(values, k, r)
    x, lam, theta, k0, k1, visited = _grid_kernel(values, k, float(r))
    if k0 < 0:
        raise RuntimeError("no boundary pair satisfied the optimality "
                           "conditions; input is likely not sorted")
    return ProjectionResult(x=x, lam=float(lam), theta=float(theta),
                            k0=int(k0), k1=int(k1), iterations=int(visited),
                            method=METHOD_GRID)
