"""Parametric pivoting engine on the sorted-order complementarity system.

The sorted projection is the solution of a linear complementarity problem
parametrized by the budget multiplier lam:

    w = q + M z + lam d,   w >= 0,  z >= 0,  w'z = 0,

where q holds the consecutive differences of the sorted input, M is the
tridiagonal second-difference matrix (2 on the diagonal, -1 off it) and
d = -e_k.  Because the input is sorted the basis stays a contiguous index
window [a, b] containing k, so the basic solution is tracked with three
scalars (the basic z values at a, k and b) using the closed-form inverse
of M restricted to a window of size m:

    minv(m, i, j) = (m + 1 - max(i, j)) * min(i, j) / (m + 1).

Each pivot grows the window by one index, so at most n - 1 pivots occur,
and the breakpoint values of lam are nondecreasing along the run.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .core import METHOD_PLCP, ProjectionResult
from .esgs import _check_sorted_args


def minv(m: int, i: int, j: int) -> float:
    """Entry (i, j) of the inverse of the size-m window matrix, 1-based."""
    if not (1 <= i <= m and 1 <= j <= m):
        raise ValueError(f"indices must be in [1, {m}], got ({i}, {j})")
    return (m + 1 - max(i, j)) * min(i, j) / (m + 1)


@njit(cache=True)
def _apply_dtz(y, values, a, b, pos_k, lam):
    # Adds D'z(lam) for the contiguous basis [a, b] into y in O(m):
    # a reverse-weighted pass accumulates the first affected entry, then a
    # forward difference pass peels one rhs component per entry.
    m = b - a + 1
    c = 0.0
    for i in range(1, m + 1):
        j = b - i + 1
        vj = -(values[j - 1] - values[j])
        if j - a + 1 == pos_k:
            vj += lam
        c += i * vj
    c /= m + 1
    y[a - 1] += c
    for pos in range(1, m + 1):
        j = a + pos - 1
        vj = -(values[j - 1] - values[j])
        if pos == pos_k:
            vj += lam
        c -= vj
        y[j] += c
    return y


def apply_dtz(y: np.ndarray, values: np.ndarray, a: int, b: int,
              pos_k: int, lam: float) -> np.ndarray:
    """Add D'z(lam) for basis window [a, b] (1-based, inclusive) into y."""
    n = np.asarray(values).size
    if not (1 <= a <= b <= n - 1):
        raise ValueError(f"need 1 <= a <= b <= n-1, got a={a}, b={b}, n={n}")
    if not 1 <= pos_k <= b - a + 1:
        raise ValueError(f"pos_k out of range: {pos_k}")
    return _apply_dtz(np.asarray(y, dtype=np.float64),
                      np.ascontiguousarray(np.asarray(values, dtype=np.float64)),
                      int(a), int(b), int(pos_k), float(lam))


def recover_index_pair(a: int, b: int, solved_at_init: bool,
                       k: int, n: int) -> tuple[int, int]:
    """Boundary pair implied by the final basis window."""
    if solved_at_init:
        return k - 1, k
    return max(a - 1, 0), min(b + 1, n)


@njit(cache=True)
def _plcp_kernel(values, k, r, bp):
    n = values.size
    s0 = 0.0
    for i in range(k):
        s0 += values[i]
    qk = values[k - 1] - values[k]
    if s0 - k * qk <= r:
        lam = (s0 - r) / k
        x = values.copy()
        for i in range(k):
            x[i] -= lam
        return x, lam, values[k - 1] - lam, k - 1, k, 0
    a = k
    b = k
    pos_k = 1
    za = -qk / 2.0
    zk = za
    zb = za
    m = 1
    t = 0
    record = bp.size > 0
    while True:
        mp1 = m + 1.0
        mv_ka = (mp1 - pos_k) / mp1
        mv_kb = pos_k / mp1
        mv_kk = (mp1 - pos_k) * pos_k / mp1
        mv_ab = 1.0 / mp1
        lam_a = np.inf
        if a > 1:
            lam_a = (values[a - 2] - values[a - 1] - za) / mv_ka
        lam_b = np.inf
        if b + 1 <= n - 1:
            lam_b = (values[b] - values[b + 1] - zb) / mv_kb
        lam = min(lam_a, lam_b)
        big_t = s0 + zk + (mv_kk - k) * lam
        if big_t <= r:
            lam_bar = (s0 - r + zk) / (k - mv_kk)
            x = values.copy()
            for i in range(k):
                x[i] -= lam_bar
            _apply_dtz(x, values, a, b, pos_k, lam_bar)
            k0 = a - 1
            k1 = b + 1
            return x, lam_bar, x[k0], k0, k1, t
        if record and t < bp.size:
            bp[t] = lam
        sigma = (m + 2.0) / mp1
        if lam_a <= lam_b:
            za = (za - (values[a - 2] - values[a - 1])) / sigma
            zk += za * mv_ka
            zb += za * mv_ab
            a -= 1
            pos_k += 1
        else:
            zb = (zb - (values[b] - values[b + 1])) / sigma
            za += zb * mv_ab
            zk += zb * mv_kb
            b += 1
        m += 1
        t += 1
        if t > n:
            return np.empty(0), np.nan, np.nan, -1, -1, t


def _run(values: np.ndarray, k: int, r: float,
         bp: np.ndarray) -> ProjectionResult:
    x, lam, theta, k0, k1, t = _plcp_kernel(values, k, float(r), bp)
    if k0 < 0:
        raise RuntimeError("pivoting did not terminate; input is likely "
                           "not sorted")
    return ProjectionResult(x=x, lam=float(lam), theta=float(theta),
                            k0=int(k0), k1=int(k1), iterations=int(t),
                            method=METHOD_PLCP)


def project_sorted_plcp(values: np.ndarray, k: int, r: float) -> ProjectionResult:
    """Project sorted values; iterations counts pivots (0 if solved at once)."""
    values = _check_sorted_args(values, k, r)
    return _run(values, k, r, np.empty(0))


def project_sorted_plcp_debug(values: np.ndarray, k: int,
                              r: float) -> tuple[ProjectionResult, np.ndarray]:
    """As project_sorted_plcp, also returning the breakpoint sequence."""
    values = _check_sorted_args(values, k, r)
    bp = np.empty(values.size)
    res = _run(values, k, r, bp)
    return res, bp[:res.iterations]
