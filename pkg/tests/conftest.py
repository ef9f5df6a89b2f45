"""Shared helpers: random instances and exact-rational reference math."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from topksum import ProjectionInstance, top_k_sum

TAUS = (-8.0, -4.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9, 0.99, 0.999)


def random_instance(rng, n_max=64, n_min=2, tie_prob=0.3,
                    taus=TAUS) -> ProjectionInstance:
    n = int(rng.integers(n_min, n_max + 1))
    k = int(rng.integers(1, n + 1))
    x0 = rng.random(n)
    if rng.random() < tie_prob:
        x0 = np.round(x0 * 8) / 8
    tau = float(rng.choice(taus))
    r = tau * top_k_sum(x0, k)
    return ProjectionInstance(x0=x0, k=k, r=r)


def to_fracs(values, r):
    return [Fraction(float(v)) for v in values], Fraction(float(r))


def exact_candidate(vals, k, r, k0, k1):
    """(theta, lam, theta+lam) in exact rationals for a boundary pair."""
    sa = sum(vals[:k0], Fraction(0))
    sb = sum(vals[k0:k1], Fraction(0))
    kk0 = k - k0
    rho = k0 * (k1 - k0) + kk0 * kk0
    theta = (k0 * sb - kk0 * (sa - r)) / rho
    lam = (kk0 * sb + (k1 - k0) * (sa - r)) / rho
    return theta, lam, theta + lam


def exact_flags(vals, k, r, k0, k1):
    """The five optimality conditions in exact rationals."""
    n = len(vals)
    theta, lam, tpl = exact_candidate(vals, k, r, k0, k1)
    return (lam > 0,
            k0 == 0 or vals[k0 - 1] > tpl,
            tpl >= vals[k0],
            vals[k1 - 1] >= theta,
            k1 == n or theta > vals[k1])
