"""Independent slow oracles used by the test suite and the check command.

Nothing here is performance sensitive; everything favors transparency:
exhaustive enumeration over boundary pairs, explicit multiplier
reconstruction, and a trailing-zero sweep for the k-norm ball.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import METHOD_GRID, ProjectionResult, top_k_sum

_MAX_EXHAUSTIVE = 256
_MAX_QP = 16


def oracle_project_exhaustive(values: np.ndarray, k: int,
                              r: float) -> ProjectionResult:
    """Enumerate every boundary pair and demand exactly one optimal one.

    All candidate systems and optimality conditions are evaluated in exact
    rational arithmetic (float inputs convert exactly), so the unique
    optimal pair is found regardless of roundoff.  values must be
    nonincreasing with top-k sum above r (infeasible), and n is capped at
    256 to keep the quadratic scan honest.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if n > _MAX_EXHAUSTIVE:
        raise ValueError(f"oracle limited to n <= {_MAX_EXHAUSTIVE}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if top_k_sum(values, k) <= r:
        raise ValueError("instance is feasible; nothing to enumerate")
    vals = [Fraction(float(v)) for v in values]
    rr = Fraction(float(r))
    psums = [Fraction(0)]
    for v in vals:
        psums.append(psums[-1] + v)
    hits = []
    for k1 in range(k, n + 1):
        for k0 in range(k - 1, -1, -1):
            sa = psums[k0]
            sb = psums[k1] - psums[k0]
            kk0 = k - k0
            rho = k0 * (k1 - k0) + kk0 * kk0
            theta = (k0 * sb - kk0 * (sa - rr)) / rho
            lam = (kk0 * sb + (k1 - k0) * (sa - rr)) / rho
            tpl = theta + lam
            ok = (lam > 0
                  and (k0 == 0 or vals[k0 - 1] > tpl)
                  and tpl >= vals[k0]
                  and vals[k1 - 1] >= theta
                  and (k1 == n or theta > vals[k1]))
            if ok:
                hits.append((k0, k1, theta, lam))
    if len(hits) != 1:
        raise RuntimeError(f"expected exactly one optimal pair, found "
                           f"{len(hits)}: {[(h[0], h[1]) for h in hits]}")
    k0, k1, theta, lam = hits[0]
    x = np.empty(n)
    for i in range(k0):
        x[i] = float(vals[i] - lam)
    x[k0:k1] = float(theta)
    x[k1:] = values[k1:]
    return ProjectionResult(x=x, lam=float(lam), theta=float(theta), k0=k0,
                            k1=k1, iterations=k * (n - k + 1),
                            method=METHOD_GRID)


def oracle_kkt_verify(values: np.ndarray, result: ProjectionResult, k: int,
                      r: float, tol: float = 1e-10) -> bool:
    """Verify a sorted-space result by reconstructing the multipliers."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    x = np.asarray(result.x, dtype=np.float64)
    scale = max(1.0, float(np.abs(values).max()), abs(r))
    if np.any(x[:-1] - x[1:] < -tol * scale):
        return False
    lam = result.lam
    if lam <= 0:
        return np.array_equal(x, values) and top_k_sum(x, k) <= r + tol * scale
    if abs(top_k_sum(x, k) - r) > tol * scale:
        return False
    k0, k1 = result.k0, result.k1
    if not (0 <= k0 <= k - 1 and k <= k1 <= n):
        return False
    mu = (values - x) / lam
    if np.any(np.abs(mu[:k0] - 1.0) > tol):
        return False
    if np.any(np.abs(mu[k1:]) > tol):
        return False
    mu_beta = mu[k0:k1]
    if np.any(mu_beta < -tol) or np.any(mu_beta > 1.0 + tol):
        return False
    if abs(float(mu_beta.sum()) - (k - k0)) > tol * max(1, k):
        return False
    if np.any(np.abs(x[k0:k1] - result.theta) > tol * scale):
        return False
    return True


def _head_projection(w: np.ndarray, k: int, r: float) -> np.ndarray | None:
    """Top-k-sum projection of a sorted head, or None when degenerate."""
    p = w.size
    k2 = min(k, p)
    if top_k_sum(w, k2) <= r:
        return w.copy()
    if k2 == 1:
        return np.minimum(w, r)
    if k2 == p:
        return w - (float(w.sum()) - r) / p
    return oracle_project_exhaustive(w, k2, r).x


def oracle_qp_vecknorm(z0: np.ndarray, k: int, r: float) -> np.ndarray:
    """Exact k-norm-ball projection by sweeping the trailing-zero count.

    For each candidate count of trailing zeros in sorted magnitude space,
    the head is projected onto the top-k-sum set; feasible candidates are
    compared by objective.  The optimum is always among them.
    """
    z0 = np.asarray(z0, dtype=np.float64)
    n = z0.size
    if n > _MAX_QP:
        raise ValueError(f"oracle limited to n <= {_MAX_QP}")
    if r < 0:
        raise ValueError("r must be nonnegative")
    w = np.abs(z0)
    perm = np.argsort(-w, kind="stable")
    ws = w[perm]
    best = None
    best_obj = np.inf
    ftol = 1e-12 * max(1.0, abs(r))
    for p in range(n, -1, -1):
        cand = np.zeros(n)
        if p > 0:
            head = _head_projection(ws[:p], k, r)
            if head is None or head[p - 1] < -1e-12:
                continue
            cand[:p] = head
        if top_k_sum(cand, k) > r + ftol:
            continue
        obj = float(((cand - ws) ** 2).sum())
        if obj < best_obj:
            best_obj = obj
            best = cand
    if best is None:
        raise RuntimeError("no feasible candidate found")
    out = np.empty(n)
    out[perm] = best
    return np.sign(z0) * out
