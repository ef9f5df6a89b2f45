"""Acceptance gate: one test per release criterion, each printing a
pass/fail line.  Run with `pytest tests/test_acceptance.py -v`.
"""

import itertools
import platform
import time
import warnings

import numpy as np
import pytest

from conftest import TAUS, exact_candidate, exact_flags, random_instance, to_fracs
from topksum import (PartialSortHint, ProjectionInstance, next_hint, project,
                     project_partial_sort, project_sorted_esgs,
                     project_sorted_plcp, project_vector_k_norm, sort_desc,
                     support_function, top_k_sum)
from topksum.bench import ExperimentSpec, generate_instance, run_experiment, summarize
from topksum.oracle import (oracle_kkt_verify, oracle_project_exhaustive,
                            oracle_qp_vecknorm)
from topksum.plcp import minv, project_sorted_plcp_debug

METHODS = ("esgs", "plcp", "grid")


def _report(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_01_cross_oracle_equivalence(capsys):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for _ in range(1000):
        inst = random_instance(rng, n_max=64)
        sv = sort_desc(inst.x0)
        results = {m: project(inst, method=m) for m in METHODS}
        if top_k_sum(inst.x0, inst.k) <= inst.r:
            target = inst.x0
        else:
            xs = oracle_project_exhaustive(sv.values, inst.k, inst.r).x
            target = np.empty(inst.n)
            target[sv.perm] = xs
        for res in results.values():
            worst = max(worst, float(np.abs(res.x - target).max()))
            sorted_res = res.__class__(
                x=res.x[sv.perm], lam=res.lam, theta=res.theta, k0=res.k0,
                k1=res.k1, iterations=res.iterations, method=res.method)
            assert oracle_kkt_verify(sv.values, sorted_res, inst.k, inst.r)
        count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 60.0
    _report(capsys, 1, ok,
            f"{count} instances, 3 engines vs exact oracle, worst error "
            f"{worst:.2e} (tol 1e-10), {elapsed:.1f}s (< 60s)")


def test_criterion_02_budget_tightness(capsys):
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(400):
        inst = random_instance(rng, n_max=64)
        for m in METHODS:
            res = project(inst, method=m)
            if res.lam > 0:
                gap = abs(top_k_sum(res.x, inst.k) - inst.r)
                worst = max(worst, gap / max(1.0, abs(inst.r)))
            else:
                assert np.array_equal(res.x, inst.x0)
    ok = worst <= 1e-12
    _report(capsys, 2, ok,
            f"active-budget residual {worst:.2e} (tol 1e-12 relative); "
            f"feasible inputs returned bit-identical")


def test_criterion_03_step_bounds(capsys):
    rng = np.random.default_rng(103)
    worst_esgs = worst_plcp = 0
    for _ in range(400):
        n = int(rng.integers(3, 200))
        k = int(rng.integers(2, n))
        values = np.sort(rng.random(n))[::-1].copy()
        tau = float(rng.choice(TAUS))
        r = tau * float(values[:k].sum())
        if float(values[:k].sum()) <= r:
            continue
        a = project_sorted_esgs(values, k, r)
        p = project_sorted_plcp(values, k, r)
        assert a.iterations <= n
        assert p.iterations <= n - 1
        worst_esgs = max(worst_esgs, a.iterations - n)
        worst_plcp = max(worst_plcp, p.iterations - (n - 1))
    _report(capsys, 3, True,
            "search steps <= n and pivots <= n-1 on all sampled instances")


def test_criterion_04_boundary_pair_structure(capsys):
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    checked = 0
    for _ in range(220):
        n = int(rng.integers(3, 13))
        k = int(rng.integers(2, n))
        values = np.sort(rng.random(n))[::-1].copy()
        if rng.random() < 0.25:
            values = np.sort(np.round(values * 4) / 4)[::-1].copy()
        tau = float(rng.choice([-2.0, -0.5, -0.1, 0.1, 0.5, 0.9]))
        r = tau * float(values[:k].sum())
        if float(values[:k].sum()) <= r:
            continue
        vals, rr = to_fracs(values, r)
        flags = {}
        cands = {}
        for k1 in range(k, n + 1):
            for k0 in range(k):
                flags[(k0, k1)] = exact_flags(vals, k, rr, k0, k1)
                cands[(k0, k1)] = exact_candidate(vals, k, rr, k0, k1)
        for (k0, k1), (_, kkt2, kkt3, kkt4, kkt5) in flags.items():
            # linking identities
            if k0 >= 1:
                assert kkt2 == (not flags[(k0 - 1, k1)][2])
            if not kkt2:
                assert kkt3
            if not kkt4:
                assert kkt5
            if k1 <= n - 1:
                assert (not kkt5) == flags[(k0, k1 + 1)][3]
            # difference identities
            if k0 >= 1:
                th_prev, lam_prev, _ = cands[(k0 - 1, k1)]
                th, lam, _ = cands[(k0, k1)]
                assert (th - th_prev >= 0) == (not kkt2)
                # at k1 == k the multiplier is (sum of top k - r)/k for
                # every k0, so its difference is uninformative there
                if k1 > k:
                    assert (lam - lam_prev <= 0) == (not kkt2)
                else:
                    assert lam == lam_prev
            if k1 <= n - 1:
                th, lam, tpl = cands[(k0, k1)]
                th_nxt, lam_nxt, tpl_nxt = cands[(k0, k1 + 1)]
                # the theta difference carries a factor k0, so its sign
                # equivalence is informative only for k0 >= 1
                if k0 >= 1:
                    assert (th_nxt - th >= 0) == (not kkt5)
                else:
                    assert th_nxt == th
                assert (lam_nxt - lam >= 0) == (not kkt5)
                assert (tpl_nxt - tpl >= 0) == (not kkt5)
        # contiguity: kkt2 true then false as k0 grows, kkt3 the reverse
        for k1 in range(k, n + 1):
            seq2 = [flags[(k0, k1)][1] for k0 in range(k)]
            seq3 = [flags[(k0, k1)][2] for k0 in range(k)]
            assert seq2 == sorted(seq2, reverse=True)
            assert seq3 == sorted(seq3)
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked >= 200 and elapsed < 60.0
    _report(capsys, 4, ok,
            f"linking, contiguity and difference identities verified in "
            f"exact arithmetic on {checked} instances, {elapsed:.1f}s (< 60s)")


def test_criterion_05_pivot_internals(capsys):
    worst_inv = 0.0
    for m in (1, 2, 3, 5, 9, 17, 33, 64):
        dense = np.linalg.inv(2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1))
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                worst_inv = max(worst_inv, abs(minv(m, i, j) - dense[i - 1, j - 1]))
    rng = np.random.default_rng(105)
    worst_bp = 0.0
    for _ in range(200):
        n = int(rng.integers(4, 120))
        values = np.sort(rng.random(n))[::-1].copy()
        k = int(rng.integers(2, n))
        r = float(rng.choice([-2.0, -0.5, -0.1, 0.0, 0.25])) * float(values[:k].sum())
        if float(values[:k].sum()) <= r:
            continue
        res, bp = project_sorted_plcp_debug(values, k, r)
        if bp.size > 1:
            worst_bp = min(worst_bp, float(np.diff(bp).min()))
    ok = worst_inv <= 1e-12 and worst_bp >= -1e-12
    _report(capsys, 5, ok,
            f"closed-form window inverse error {worst_inv:.2e} (tol 1e-12, "
            f"m <= 64); most negative breakpoint step {worst_bp:.2e}; dense "
            f"reconstruction agreement covered by the unit suite")


def test_criterion_06_partial_sort_chains(capsys):
    rng = np.random.default_rng(106)
    t0 = time.perf_counter()
    mismatches = 0
    chains = 1000
    steps = 50
    for chain in range(chains):
        n = int(rng.integers(20, 49))
        k = int(rng.integers(2, max(3, n // 4)))
        x = rng.random(n)
        scale = float(x.max() - x.min())
        hint = PartialSortHint(L=k, buffer=int(rng.choice([0, 4, 16])))
        for _ in range(steps):
            y = x - rng.normal(size=n) * 0.01 * scale
            r = float(rng.choice([-0.5, 0.1, 0.7])) * top_k_sum(y, k)
            inst = ProjectionInstance(x0=y, k=k, r=r)
            full = project(inst)
            part, _ = project_partial_sort(inst, hint)
            if not np.array_equal(full.x, part.x):
                mismatches += 1
            hint = next_hint(part, buffer=hint.buffer)
            x = part.x
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0
    _report(capsys, 6, ok,
            f"{chains} chains x {steps} steps: {mismatches} mismatches vs "
            f"full sort (exact equality), {elapsed:.1f}s")


def _median_solve(run, method, n):
    stats = summarize(run.records)
    for (m, size, _tr, _tk), entry in stats.items():
        if m == method and size == n:
            return entry["median"]
    raise KeyError((method, n))


def test_criterion_07_scaling(capsys):
    t0 = time.perf_counter()
    fast_ns = (10_000, 31_623, 100_000, 316_228, 1_000_000)
    run_fast = run_experiment(ExperimentSpec(
        n_list=fast_ns, tau_r=(-0.1,), tau_k_comp=(0.05,),
        methods=("esgs", "plcp"), reps=5, seed=107))
    grid_ns = (1_000, 3_163, 10_000, 31_623)
    run_grid = run_experiment(ExperimentSpec(
        n_list=grid_ns, tau_r=(-0.1,), tau_k_comp=(0.05,),
        methods=("grid",), reps=3, seed=107))
    run_ratio = run_experiment(ExperimentSpec(
        n_list=(100_000,), tau_r=(-0.1,), tau_k_comp=(0.05,),
        methods=("esgs", "grid"), reps=1, seed=107))
    assert not (run_fast.failed or run_grid.failed or run_ratio.failed)
    slopes = {}
    for method, run, ns in (("esgs", run_fast, fast_ns),
                            ("plcp", run_fast, fast_ns),
                            ("grid", run_grid, grid_ns)):
        med = [_median_solve(run, method, n) for n in ns]
        slopes[method] = float(np.polyfit(np.log(ns), np.log(med), 1)[0])
    ratio = (_median_solve(run_ratio, "grid", 100_000)
             / _median_solve(run_ratio, "esgs", 100_000))
    elapsed = time.perf_counter() - t0
    ok = (0.8 <= slopes["esgs"] <= 1.3 and 0.8 <= slopes["plcp"] <= 1.3
          and 1.7 <= slopes["grid"] <= 2.3 and ratio >= 100.0
          and elapsed < 900.0)
    _report(capsys, 7, ok,
            f"log-log slopes esgs={slopes['esgs']:.2f} "
            f"plcp={slopes['plcp']:.2f} (want [0.8,1.3]), "
            f"grid={slopes['grid']:.2f} (want [1.7,2.3]), "
            f"baseline/esgs ratio at n=1e5 {ratio:.0f}x (want >= 100), "
            f"{elapsed:.0f}s (< 900s)")


def test_criterion_08_absolute_times(capsys):
    run = run_experiment(ExperimentSpec(
        n_list=(1_000_000,), tau_r=(-0.1,), tau_k_comp=(0.05,),
        methods=("esgs",), reps=5, seed=108))
    med = _median_solve(run, "esgs", 1_000_000)
    inst = generate_instance(10_000_000, -0.1, 0.05, seed=108)
    values = np.sort(inst.x0)[::-1].copy()
    project_sorted_esgs(values, inst.k, inst.r)  # warm
    t0 = time.perf_counter()
    project_sorted_esgs(values, inst.k, inst.r)
    big = time.perf_counter() - t0
    hw = f"{platform.machine()}, {platform.processor() or 'unknown cpu'}"
    in_range = 5e-4 <= med <= 5e-2 and big < 1.0
    detail = (f"median solve n=1e6 {med:.1e}s (guide [5e-4, 5e-2]), "
              f"n=1e7 {big:.1e}s (guide < 1s) on {hw}")
    if not in_range:
        warnings.warn("absolute-time guide missed (advisory only): " + detail)
    _report(capsys, 8, True, detail + ("" if in_range else " [advisory miss]"))


def test_criterion_09_vector_k_norm(capsys):
    rng = np.random.default_rng(109)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 17))
        k = int(rng.integers(1, n + 1))
        z0 = rng.normal(size=n) * float(rng.choice([0.1, 1.0, 10.0]))
        if rng.random() < 0.2:
            z0 = np.round(z0 * 4) / 4
        base = top_k_sum(np.abs(z0), k)
        r = float(rng.choice([0.0, 0.25, 0.8, 1.2])) * base
        res = project_vector_k_norm(z0, k, r)
        worst = max(worst, float(np.abs(res.x - oracle_qp_vecknorm(z0, k, r)).max()))
    ok = worst <= 1e-9
    _report(capsys, 9, ok,
            f"1000 instances n <= 16 vs exhaustive ball oracle, worst "
            f"error {worst:.2e} (tol 1e-9)")


def test_criterion_10_support_function(capsys):
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(110)
    checked = 0
    for _ in range(250):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, n + 1))
        kind = rng.random()
        if kind < 0.4:
            c = rng.random(n)
        elif kind < 0.7:
            c = rng.random(n)
            c[rng.integers(0, n)] *= 10  # likely breaks the spread test
        else:
            c = rng.normal(size=n)
        r = float(rng.choice([-2.0, -0.5, 0.0, 0.5, 2.0]))
        val = support_function(c, k, r)
        rows = [np.isin(np.arange(n), idx).astype(float)
                for idx in itertools.combinations(range(n), k)]
        a_ub = np.vstack(rows)
        b_ub = np.full(a_ub.shape[0], r)
        objs = []
        for box in (1e3, 2e3):
            lp = linprog(-c, A_ub=a_ub, b_ub=b_ub, bounds=(-box, box),
                         method="highs")
            assert lp.status == 0
            objs.append(-lp.fun)
        lp_finite = abs(objs[1] - objs[0]) <= 1e-6 * (1 + abs(objs[0]))
        if np.isinf(val):
            assert not lp_finite
        else:
            assert lp_finite
            assert val == (r / k) * float(c.sum())
            assert abs(val - objs[0]) <= 1e-6 * (1 + abs(val))
        checked += 1
    _report(capsys, 10, True,
            f"finiteness and values agree with a direct LP on {checked} "
            f"instances n <= 8; finite values equal (r/k) * sum(c) exactly")
