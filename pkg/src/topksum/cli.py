"""Command line interface: project, check, bench.

Exit codes: 0 success, 1 I/O failure, 2 argument error, 3 check found a
disagreement (the offending instance is dumped alongside).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from . import ext, oracle
from .core import (METHOD_ESGS, SORTED_METHODS, ProjectionInstance, project,
                   sort_desc, top_k_sum)
from .vecio import read_vector, write_vector


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topksum",
        description="Euclidean projection onto the top-k-sum constraint set")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a vector read from a file")
    p.add_argument("--input", required=True, help="vector file (.txt or .f64)")
    p.add_argument("--k", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=float, help="budget value")
    group.add_argument("--tau-r", type=float,
                       help="budget as a fraction of the input top-k sum")
    p.add_argument("--method", choices=SORTED_METHODS, default=METHOD_ESGS)
    p.add_argument("--partial-sort", type=int, metavar="L",
                   help="sort only the L largest entries, with safeguard")
    p.add_argument("--output", help="write the projection to this file")

    c = sub.add_parser("check", help="cross-validate engines against oracles")
    c.add_argument("--trials", type=int, default=200)
    c.add_argument("--n-max", type=int, default=64)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--dump", default="check_failure.json",
                   help="file for the offending instance on disagreement")

    b = sub.add_parser("bench", help="run the timing protocol")
    b.add_argument("--n", required=True,
                   help="comma-separated problem sizes")
    b.add_argument("--tau-r", default="-0.1,0.1,0.99",
                   help="comma-separated budget fractions")
    b.add_argument("--tau-k-comp", default="0.001,0.05",
                   help="comma-separated k fractions")
    b.add_argument("--methods", default="esgs,plcp,grid")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sort-mode", choices=("presorted", "unsorted", "partial"),
                   default="presorted")
    b.add_argument("--time-limit", type=float, default=None,
                   help="per-solve cap in seconds; slower methods are "
                        "skipped for the rest of the cell")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--output", required=True)
    b.add_argument("--jobs", type=int, default=1)
    return parser


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def cmd_project(args) -> int:
    try:
        x0 = read_vector(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        r = args.r
        if r is None:
            r = args.tau_r * top_k_sum(x0, args.k)
        inst = ProjectionInstance(x0=x0, k=args.k, r=r)
        if args.partial_sort is not None:
            if args.partial_sort < 1:
                raise ValueError("--partial-sort must be positive")
            hint = ext.PartialSortHint(L=args.partial_sort)
            res, _ = ext.project_partial_sort(inst, hint)
        else:
            res = project(inst, method=args.method)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        try:
            write_vector(args.output, res.x)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    print(f"lambda={_fmt(res.lam)} theta={_fmt(res.theta)} "
          f"k0={res.k0} k1={res.k1} iters={res.iterations}")
    return 0


def cmd_check(args) -> int:
    if args.trials < 1 or args.n_max < 2:
        print("error: --trials must be >= 1 and --n-max >= 2", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    checked = 0
    for trial in range(args.trials):
        n = int(rng.integers(2, args.n_max + 1))
        k = int(rng.integers(1, n + 1))
        x0 = rng.random(n)
        if rng.random() < 0.3:
            x0 = np.round(x0 * 8) / 8  # provoke ties
        tau_r = float(rng.choice(bench_mod.TAU_R_GRID))
        r = tau_r * top_k_sum(x0, k)
        inst = ProjectionInstance(x0=x0, k=k, r=r)
        sv = sort_desc(x0)
        results = {m: project(inst, method=m) for m in SORTED_METHODS}
        ref = results[METHOD_ESGS]
        bad = None
        for m, res in results.items():
            if float(np.abs(res.x - ref.x).max()) > 1e-10:
                bad = f"{m} disagrees with esgs"
                break
            xs = res.x[sv.perm]
            sorted_res = res.__class__(x=xs, lam=res.lam, theta=res.theta,
                                       k0=res.k0, k1=res.k1,
                                       iterations=res.iterations,
                                       method=res.method)
            if not oracle.oracle_kkt_verify(sv.values, sorted_res, k, r):
                bad = f"{m} failed multiplier verification"
                break
        if bad is None and top_k_sum(x0, k) > r:
            ox = oracle.oracle_project_exhaustive(sv.values, k, r).x
            xo = np.empty(n)
            xo[sv.perm] = ox
            if float(np.abs(ref.x - xo).max()) > 1e-10:
                bad = "esgs disagrees with the exhaustive oracle"
        if bad is not None:
            with open(args.dump, "w") as f:
                json.dump({"x0": x0.tolist(), "k": k, "r": r,
                           "reason": bad, "trial": trial}, f, indent=1)
            print(f"check failed at trial {trial}: {bad} "
                  f"(instance dumped to {args.dump})", file=sys.stderr)
            return 3
        checked += 1
    print(f"check passed: {checked} instances, engines and oracles agree")
    return 0


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v)


def cmd_bench(args) -> int:
    try:
        spec = bench_mod.ExperimentSpec(
            n_list=tuple(int(v) for v in args.n.split(",") if v),
            tau_r=_float_list(args.tau_r),
            tau_k_comp=_float_list(args.tau_k_comp),
            methods=tuple(m for m in args.methods.split(",") if m),
            reps=args.reps, seed=args.seed, sort_mode=args.sort_mode,
            time_limit=args.time_limit)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    run = bench_mod.run_experiment(spec, jobs=max(1, args.jobs))
    try:
        bench_mod.emit_results(run.records, args.format, args.output)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for method, n, tau_r, tau_k in run.timed_out:
        print(f"timed out: {method} at n={n} tau_r={tau_r} "
              f"tau_k_comp={tau_k}; remaining reps skipped")
    for key, stats in sorted(bench_mod.summarize(run.records).items()):
        method, n, tau_r, tau_k = key
        print(f"{method} n={n} tau_r={tau_r} tau_k_comp={tau_k} "
              f"median={stats['median']:.3e}s reps={int(stats['count'])}")
    if run.failed:
        for line in run.disagreements:
            print(f"error: {line}", file=sys.stderr)
        return 1
    print(f"wrote {len(run.records)} records to {args.output}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "project":
        return cmd_project(args)
    if args.command == "check":
        return cmd_check(args)
    return cmd_bench(args)


if __name__ == "__main__":
    sys.exit(main())
