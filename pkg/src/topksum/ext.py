"""Extensions: partial-sort safeguard, translation, tail bounds, the
support function of the constraint set, and projection onto the vector
k-norm ball (sum of the k largest magnitudes at most r).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (METHOD_ESGS, METHOD_PLCP, METHOD_TRIVIAL,
                   ProjectionInstance, ProjectionResult, find_index_pair,
                   project_trivial, sort_desc, top_k_sum)
from .esgs import _esgs_kernel


@dataclass(frozen=True)
class PartialSortHint:
    """Initial sorted-prefix length L and a slack added when chaining."""

    L: int
    buffer: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be positive")
        if self.buffer < 0:
            raise ValueError("buffer must be nonnegative")


def next_hint(result: ProjectionResult, buffer: int = 0) -> PartialSortHint:
    """Hint for a nearby follow-up instance: previous k1 plus slack."""
    return PartialSortHint(L=result.k1 + buffer, buffer=buffer)


def project_partial_sort(inst: ProjectionInstance,
                         hint: PartialSortHint) -> tuple[ProjectionResult, int]:
    """Project by sorting only the L largest entries, with certification.

    Runs the early-stopping engine on the partially arranged vector and
    accepts only if the solved plateau stayed inside the sorted prefix and
    strictly dominates every unsorted tail entry; otherwise L is doubled
    (capped at n, a full sort).  Returns (result, L used); the result is
    bit-identical to the full-sort projection.  Trivial instances return
    L = 0.
    """
    triv = project_trivial(inst)
    if triv is not None:
        return triv, 0
    x0, k, r, n = inst.x0, inst.k, inst.r, inst.n
    L = min(max(hint.L, k), n)
    while True:
        if L == n:
            top = np.argsort(-x0, kind="stable")
        else:
            top = np.argpartition(-x0, L - 1)[:L]
            top = top[np.argsort(-x0[top], kind="stable")]
        mask = np.ones(n, dtype=bool)
        mask[top] = False
        perm = np.concatenate([top, np.flatnonzero(mask)])
        arranged = x0[perm]
        xs, lam, theta, k0, k1, iters = _esgs_kernel(arranged, k, float(r))
        ok = k1 <= L and (k1 == n or xs[k1 - 1] > arranged[k1:].max())
        if ok or L == n:
            x = np.empty_like(x0)
            x[perm] = xs
            return ProjectionResult(x=x, lam=float(lam), theta=float(theta),
                                    k0=int(k0), k1=int(k1),
                                    iterations=int(iters),
                                    method=METHOD_ESGS), L
        L = min(2 * L, n)


def translate_to_zero_budget(
        inst: ProjectionInstance) -> tuple[ProjectionInstance, float]:
    """Shift the instance so the budget becomes 0; returns (instance, delta).

    Projecting the shifted instance and adding delta back to every entry
    recovers the original projection.
    """
    delta = inst.r / inst.k
    return ProjectionInstance(x0=inst.x0 - delta, k=inst.k, r=0.0), delta


def k1_upper_bound(values: np.ndarray, k: int, p: int | None = None) -> float:
    """Lower bound on the smallest plateau entry for a zero-budget instance.

    values must be nonincreasing with top-k sum positive (budget 0).  The
    count of entries >= the returned bound upper-bounds the final plateau
    extent k1.  Supplying p > k such that the top-p sum is nonpositive can
    tighten the bound for skewed data.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    gap = float(values[0] - values[k - 1])
    if p is None:
        term = (1 - k) * gap
    else:
        if p <= k:
            raise ValueError(f"p must exceed k, got p={p}, k={k}")
        if p > n:
            raise ValueError(f"p must be at most n, got p={p}, n={n}")
        if float(values[:p].sum()) > 0:
            raise ValueError("improved bound needs a nonpositive top-p sum")
        term = -p / (p - k) * gap
    return float(max(term, values[-1]))


def count_at_least(values: np.ndarray, bound: float) -> int:
    """Number of entries >= bound."""
    return int(np.count_nonzero(np.asarray(values) >= bound))


def support_function(c: np.ndarray, k: int, r: float) -> float:
    """Support function of {x : top_k_sum(x, k) <= r} at c.

    Finite iff c is componentwise nonnegative and k * max(c) <= sum(c),
    in which case the value is (r / k) * sum(c); otherwise +inf.
    """
    c = np.asarray(c, dtype=np.float64)
    n = c.size
    if c.ndim != 1 or n == 0:
        raise ValueError("c must be a nonempty 1-d array")
    if not np.all(np.isfinite(c)):
        raise ValueError("c must be finite")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if np.any(c < 0):
        return float("inf")
    s = float(c.sum())
    if k * float(c.max()) > s:
        return float("inf")
    return (r / k) * s


@njit(cache=True)
def _mv(m, i, j, corner):
    # Inverse entry of the size-m window matrix, 1-based.  With the corner
    # row active (window touching the last sign constraint) the inverse is
    # simply min(i, j).
    if corner:
        return float(min(i, j))
    return (m + 1.0 - max(i, j)) * min(i, j) / (m + 1.0)


@njit(cache=True)
def _q_at(w, i, n):
    # Constraint row i of the sorted magnitude vector: consecutive
    # difference for i < n, the last entry itself for i == n (1-based).
    if i < n:
        return w[i - 1] - w[i]
    return w[n - 1]


@njit(cache=True)
def _knorm_kernel(w, k, r):
    n = w.size
    s0 = 0.0
    for i in range(k):
        s0 += w[i]
    qk = _q_at(w, k, n)
    if s0 - k * qk <= r:
        lam = (s0 - r) / k
        x = w.copy()
        for i in range(k):
            x[i] -= lam
        return x, lam, w[k - 1] - lam, k - 1, k, 0
    a = k
    b = k
    pos_k = 1
    corner = k == n
    za = -qk / (1.0 if corner else 2.0)
    zk = za
    zb = za
    m = 1
    t = 0
    last_lam = 0.0
    while True:
        mv_ka = _mv(m, pos_k, 1, corner)
        mv_kb = _mv(m, pos_k, m, corner)
        mv_kk = _mv(m, pos_k, pos_k, corner)
        mv_ab = _mv(m, 1, m, corner)
        lam_a = np.inf
        if a > 1:
            lam_a = (_q_at(w, a - 1, n) - za) / mv_ka
        lam_b = np.inf
        if b < n:
            lam_b = (_q_at(w, b + 1, n) - zb) / mv_kb
        lam = min(lam_a, lam_b)
        coef = mv_kk - k
        if lam == np.inf:
            # Full basis: no further pivot exists, the budget is constant
            # (coef == 0) or unbounded below, so terminate here.
            big_t = -np.inf if coef < 0 else s0 + zk
        else:
            big_t = s0 + zk + coef * lam
        if big_t <= r or lam == np.inf:
            denom = k - mv_kk
            if denom > 1e-12:
                lam_bar = (s0 - r + zk) / denom
            else:
                # Budget is constant on this basis; any multiplier past the
                # last breakpoint is valid.
                lam_bar = last_lam
            x = _reconstruct(w, k, a, b, pos_k, corner, lam_bar)
            k0 = a - 1
            k1 = min(b + 1, n)
            return x, lam_bar, x[k0], k0, k1, t
        last_lam = lam
        if lam_a <= lam_b:
            sigma = 2.0 - _mv(m, 1, 1, corner)
            za = (za - _q_at(w, a - 1, n)) / sigma
            zk += za * mv_ka
            zb += za * mv_ab
            a -= 1
            pos_k += 1
        else:
            m_ss = 1.0 if b + 1 == n else 2.0
            sigma = m_ss - _mv(m, m, m, corner)
            zb = (zb - _q_at(w, b + 1, n)) / sigma
            za += zb * mv_ab
            zk += zb * mv_kb
            b += 1
            if b == n:
                corner = True
        m += 1
        t += 1
        if t > n + 1:
            return np.empty(0), np.nan, np.nan, -1, -1, t


@njit(cache=True)
def _reconstruct(w, k, a, b, pos_k, corner, lam):
    # Solve the window system directly (tridiagonal, O(m)) and assemble
    # x = w - lam on the top-k block plus the transposed constraint rows.
    n = w.size
    m = b - a + 1
    diag = np.empty(m)
    rhs = np.empty(m)
    for pos in range(1, m + 1):
        j = a + pos - 1
        diag[pos - 1] = 1.0 if (corner and j == n) else 2.0
        rhs[pos - 1] = -_q_at(w, j, n)
        if pos == pos_k:
            rhs[pos - 1] += lam
    # Thomas elimination with unit off-diagonal -1.
    for pos in range(1, m):
        f = -1.0 / diag[pos - 1]
        diag[pos] -= f * -1.0
        rhs[pos] -= f * rhs[pos - 1]
    z = np.empty(m)
    z[m - 1] = rhs[m - 1] / diag[m - 1]
    for pos in range(m - 2, -1, -1):
        z[pos] = (rhs[pos] + z[pos + 1]) / diag[pos]
    x = w.copy()
    for i in range(k):
        x[i] -= lam
    for pos in range(m):
        j = a + pos
        if j < n:
            x[j - 1] += z[pos]
            x[j] -= z[pos]
        else:
            x[n - 1] += z[pos]
    return x


def project_vector_k_norm(z0: np.ndarray, k: int, r: float) -> ProjectionResult:
    """Project z0 onto {z : sum of the k largest |z_i| <= r}, r >= 0."""
    z0 = np.ascontiguousarray(np.asarray(z0, dtype=np.float64))
    n = z0.size
    if z0.ndim != 1 or n == 0:
        raise ValueError("z0 must be a nonempty 1-d array")
    if not np.all(np.isfinite(z0)):
        raise ValueError("z0 must be finite")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    r = float(r)
    if not r >= 0:
        raise ValueError("r must be nonnegative")
    w = np.abs(z0)
    if top_k_sum(w, k) <= r:
        values = np.sort(w)[::-1]
        k0, k1 = find_index_pair(values, k)
        return ProjectionResult(x=z0.copy(), lam=0.0, theta=float("nan"),
                                k0=k0, k1=k1, iterations=0,
                                method=METHOD_TRIVIAL)
    if k == 1:
        x = np.sign(z0) * np.minimum(w, r)
        above = w > r
        lam = float((w[above] - r).sum())
        return ProjectionResult(x=x, lam=lam, theta=float(r), k0=0,
                                k1=int(np.count_nonzero(above)),
                                iterations=0, method=METHOD_TRIVIAL)
    sv = sort_desc(w)
    xs, lam, theta, k0, k1, t = _knorm_kernel(sv.values, k, r)
    if k0 < 0:
        raise RuntimeError("pivoting did not terminate")
    mags = np.empty(n)
    mags[sv.perm] = xs
    return ProjectionResult(x=np.sign(z0) * mags, lam=float(lam),
                            theta=float(theta), k0=int(k0), k1=int(k1),
                            iterations=int(t), method=METHOD_PLCP)
