"""Early-stopping grid search over plateau boundary pairs.

Works on nonincreasing values. The optimal solution has the form

    x[1..k0]    = values[1..k0] - lam      (1-based)
    x[k0+1..k1] = theta
    x[k1+1..n]  = values[k1+1..n]

for a unique boundary pair (k0, k1) with 0 <= k0 <= k-1 and k <= k1 <= n.
The search starts at (k-1, k) and moves one step at a time, decrementing
k0 or incrementing k1, so at most n candidate systems are solved and the
running block sums are updated in O(1) per step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import METHOD_ESGS, ProjectionResult


@dataclass(frozen=True)
class Candidate:
    """Closed-form solution of the 2x2 system for a boundary pair."""

    k0: int
    k1: int
    rho: float
    theta: float
    lam: float
    theta_plus_lambda: float


@dataclass(frozen=True)
class KktFlags:
    """The five optimality conditions for a candidate."""

    kkt1: bool  # lam > 0
    kkt2: bool  # values[k0] > theta + lam      (sentinel +inf at k0 == 0)
    kkt3: bool  # theta + lam >= values[k0+1]
    kkt4: bool  # values[k1] >= theta
    kkt5: bool  # theta > values[k1+1]          (sentinel -inf at k1 == n)

    def all(self) -> bool:
        return self.kkt1 and self.kkt2 and self.kkt3 and self.kkt4 and self.kkt5


def prefix_sums(values: np.ndarray) -> np.ndarray:
    """P with P[i] = sum of the first i entries, P[0] = 0."""
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(values.size + 1)
    out[0] = 0.0
    np.cumsum(values, out=out[1:])
    return out


def candidate_solution(psums: np.ndarray, k: int, r: float,
                       k0: int, k1: int) -> Candidate:
    """Solve the boundary-pair system given prefix sums of sorted values."""
    n = psums.size - 1
    if not (0 <= k0 <= k - 1 and k <= k1 <= n):
        raise ValueError(f"invalid pair ({k0}, {k1}) for k={k}, n={n}")
    sa = float(psums[k0])
    sb = float(psums[k1] - psums[k0])
    kk0 = k - k0
    rho = float(k0 * (k1 - k0) + kk0 * kk0)
    theta = (k0 * sb - kk0 * (sa - r)) / rho
    lam = (kk0 * sb + (k1 - k0) * (sa - r)) / rho
    tpl = (k * sb + (k1 - k) * (sa - r)) / rho
    return Candidate(k0=k0, k1=k1, rho=rho, theta=theta, lam=lam,
                     theta_plus_lambda=tpl)


def kkt_flags(values: np.ndarray, cand: Candidate) -> KktFlags:
    """Evaluate the five optimality conditions with exact comparisons."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    k0, k1 = cand.k0, cand.k1
    tpl = cand.theta_plus_lambda
    return KktFlags(
        kkt1=cand.lam > 0.0,
        kkt2=True if k0 == 0 else values[k0 - 1] > tpl,
        kkt3=tpl >= values[k0],
        kkt4=values[k1 - 1] >= cand.theta,
        kkt5=True if k1 == n else cand.theta > values[k1],
    )


@njit(cache=True)
def _esgs_kernel(values, k, r):
    n = values.size
    k0 = k - 1
    k1 = k
    sa = 0.0
    for i in range(k - 1):
        sa += values[i]
    sb = values[k - 1]
    iters = 0
    rho = 1.0
    num_theta = 0.0
    num_tpl = 0.0
    while True:
        iters += 1
        kk0 = k - k0
        # Conditions are tested with both sides scaled by rho > 0; this
        # avoids division roundoff at boundary-equality pairs (at the
        # starting pair, rho * (theta + lam) equals k * values[k-1]
        # identically and must compare as exactly equal).
        rho = float(k0 * (k1 - k0) + kk0 * kk0)
        num_theta = k0 * sb - kk0 * (sa - r)
        num_tpl = k * sb + (k1 - k) * (sa - r)
        kkt2 = True if k0 == 0 else values[k0 - 1] * rho > num_tpl
        kkt5 = True if k1 == n else num_theta > rho * values[k1]
        if kkt2 and kkt5:
            break
        if kkt2:
            sb += values[k1]
            k1 += 1
        else:
            k0 -= 1
            sa -= values[k0]
            sb += values[k0]
    theta = num_theta / rho
    tpl = num_tpl / rho
    lam = tpl - theta
    x = np.empty(n)
    for i in range(k0):
        x[i] = values[i] - lam
    for i in range(k0, k1):
        x[i] = theta
    for i in range(k1, n):
        x[i] = values[i]
    return x, lam, theta, k0, k1, iters


def _check_sorted_args(values: np.ndarray, k: int, r: float) -> np.ndarray:
    values = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    n = values.size
    if not 1 < k < n:
        raise ValueError(f"sorted engines need 1 < k < n, got k={k}, n={n}")
    if float(values[:k].sum()) <= r:
        raise ValueError("instance is feasible; no projection step needed")
    return values


def project_sorted_esgs(values: np.ndarray, k: int, r: float) -> ProjectionResult:
    """Project sorted values; iterations counts candidate systems solved."""
    values = _check_sorted_args(values, k, r)
    x, lam, theta, k0, k1, iters = _esgs_kernel(values, k, float(r))
    return ProjectionResult(x=x, lam=float(lam), theta=float(theta),
                            k0=int(k0), k1=int(k1), iterations=int(iters),
                            method=METHOD_ESGS)


def walk(values: np.ndarray, k: int, r: float):
    """Yield (Candidate, KktFlags) along the search trajectory.

    Diagnostic twin of the compiled kernel, kept in plain Python so tests
    can assert trajectory invariants (kkt1, kkt3, kkt4 hold throughout,
    k0 nonincreasing, k1 nondecreasing).
    """
    values = _check_sorted_args(values, k, r)
    n = values.size
    psums = prefix_sums(values)
    k0, k1 = k - 1, k
    while True:
        cand = candidate_solution(psums, k, float(r), k0, k1)
        flags = kkt_flags(values, cand)
        yield cand, flags
        if flags.kkt2 and flags.kkt5:
            return
        if flags.kkt2:
            k1 += 1
        else:
            k0 -= 1
