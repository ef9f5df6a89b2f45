"""Core types and entry points for Euclidean projection onto the top-k-sum set.

The feasible set is {x in R^n : sum of the k largest entries of x <= r}.
The projection is computed exactly (up to floating point roundoff) in a
finite number of steps: the input is sorted into nonincreasing order, a
sorted-input engine locates the optimal plateau structure, and the result
is mapped back through the sorting permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METHOD_ESGS = "esgs"
METHOD_PLCP = "plcp"
METHOD_GRID = "grid"
METHOD_TRIVIAL = "trivial"

SORTED_METHODS = (METHOD_ESGS, METHOD_PLCP, METHOD_GRID)


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances. feas_tol = 0 means exact comparisons."""

    feas_tol: float = 0.0
    agree_tol: float = 1e-10

    def __post_init__(self):
        if self.feas_tol < 0 or self.agree_tol < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass(frozen=True)
class ProjectionInstance:
    """A projection problem: point x0, rank k, budget r."""

    x0: np.ndarray
    k: int
    r: float

    def __post_init__(self):
        x0 = np.ascontiguousarray(np.asarray(self.x0, dtype=np.float64))
        if x0.ndim != 1 or x0.size == 0:
            raise ValueError("x0 must be a nonempty 1-d array")
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")
        object.__setattr__(self, "x0", x0)
        k = int(self.k)
        if not 1 <= k <= x0.size:
            raise ValueError(f"k must be in [1, {x0.size}], got {k}")
        object.__setattr__(self, "k", k)
        r = float(self.r)
        if not np.isfinite(r):
            raise ValueError("r must be finite")
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.x0.size


@dataclass(frozen=True)
class SortedView:
    """Nonincreasing values and the permutation mapping sorted to original."""

    values: np.ndarray
    perm: np.ndarray


@dataclass(frozen=True)
class ProjectionResult:
    """Projection output.

    x is in the same index order as the input point.  lam is the budget
    multiplier (0 iff the input was feasible), theta the plateau value
    (nan when lam == 0), (k0, k1) the plateau boundary indices in sorted
    order (1-based: entries k0+1..k1 of the sorted solution equal theta),
    iterations the engine-specific work count.
    """

    x: np.ndarray
    lam: float
    theta: float
    k0: int
    k1: int
    iterations: int
    method: str


def top_k_sum(x: np.ndarray, k: int) -> float:
    """Sum of the k largest entries of x, O(n) expected via selection."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if k == n:
        return float(x.sum())
    return float(np.partition(x, n - k)[n - k:].sum())


def sort_desc(x: np.ndarray) -> SortedView:
    """Stable nonincreasing sort; ties keep original relative order."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x must be a nonempty 1-d array")
    perm = np.argsort(-x, kind="stable")
    return SortedView(values=np.ascontiguousarray(x[perm]), perm=perm)


def find_index_pair(values: np.ndarray, k: int) -> tuple[int, int]:
    """Plateau boundaries (k0, k1) of sorted values around position k.

    values must be nonincreasing. Returns 1-based boundary counts:
    k0 entries strictly above values[k], entries k0+1..k1 equal it.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    vk = values[k - 1]
    neg = -values
    k0 = int(np.searchsorted(neg, -vk, side="left"))
    k1 = int(np.searchsorted(neg, -vk, side="right"))
    return k0, k1


def project_trivial(inst: ProjectionInstance,
                    tol: Tolerances | None = None) -> ProjectionResult | None:
    """Handle the closed-form cases: feasible input, k == 1, k == n.

    Returns None when the instance needs a sorted engine.
    """
    tol = tol or Tolerances()
    x0, k, r, n = inst.x0, inst.k, inst.r, inst.n
    # Sum in sorted-prefix order so the feasibility decision matches the
    # sorted engines bit for bit.
    values = np.sort(x0)[::-1]
    s = float(values[:k].sum())
    if s <= r + tol.feas_tol:
        k0, k1 = find_index_pair(values, k)
        return ProjectionResult(x=x0.copy(), lam=0.0, theta=float("nan"),
                                k0=k0, k1=k1, iterations=0,
                                method=METHOD_TRIVIAL)
    if k == 1:
        x = np.minimum(x0, r)
        above = x0 > r
        lam = float((x0[above] - r).sum())
        return ProjectionResult(x=x, lam=lam, theta=float(r),
                                k0=0, k1=int(np.count_nonzero(above)),
                                iterations=0, method=METHOD_TRIVIAL)
    if k == n:
        shift = (float(x0.sum()) - r) / n
        k0, _ = find_index_pair(values, n)
        return ProjectionResult(x=x0 - shift, lam=shift,
                                theta=float(values[-1] - shift),
                                k0=k0, k1=n, iterations=0,
                                method=METHOD_TRIVIAL)
    return None


def project(inst: ProjectionInstance, method: str = METHOD_ESGS,
            tol: Tolerances | None = None) -> ProjectionResult:
    """Project inst.x0 onto {x : top_k_sum(x, k) <= r}."""
    if method not in SORTED_METHODS:
        raise ValueError(f"unknown method {method!r}")
    triv = project_trivial(inst, tol)
    if triv is not None:
        return triv
    sv = sort_desc(inst.x0)
    res = project_sorted(sv.values, inst.k, inst.r, method)
    x = np.empty_like(inst.x0)
    x[sv.perm] = res.x
    return ProjectionResult(x=x, lam=res.lam, theta=res.theta, k0=res.k0,
                            k1=res.k1, iterations=res.iterations,
                            method=res.method)


def project_sorted(values: np.ndarray, k: int, r: float,
                   method: str = METHOD_ESGS) -> ProjectionResult:
    """Dispatch a sorted-input engine (values nonincreasing, 1 < k < n)."""
    from . import esgs, grid, plcp

    if method == METHOD_ESGS:
        return esgs.project_sorted_esgs(values, k, r)
    if method == METHOD_PLCP:
        return plcp.project_sorted_plcp(values, k, r)
    if method == METHOD_GRID:
        return grid.project_sorted_grid(values, k, r)
    raise ValueError(f"unknown method {method!r}")
