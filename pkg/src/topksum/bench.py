"""Benchmark harness: seeded instance generation, timed solves, and
delimited result emission.

Instances follow a fixed protocol: x0 is uniform on [0, 1]^n drawn from
NumPy's default_rng (PCG64), k = max(1, floor(tau_k_comp * n)), and
r = tau_r * top_k_sum(x0, k).  Solve times are wall-clock monotonic and
exclude sorting, which is timed separately.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (METHOD_ESGS, METHOD_GRID, METHOD_PLCP, METHOD_TRIVIAL,
                   ProjectionInstance, ProjectionResult, find_index_pair,
                   project, top_k_sum)
from .esgs import project_sorted_esgs
from .ext import PartialSortHint, next_hint, project_partial_sort
from .grid import project_sorted_grid
from .plcp import project_sorted_plcp

TAU_R_GRID = (-8.0, -4.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9,
              0.99, 0.999)
TAU_K_COMP_GRID = (1e-4, 1e-3, 1e-2, 5e-2, 1e-1, 0.5, 0.9, 0.99, 0.9999)

CSV_FIELDS = ("method", "n", "k", "tau_r", "tau_k_comp", "rep",
              "solve_seconds", "sort_seconds", "iterations", "k0", "k1",
              "feas_residual")


@dataclass(frozen=True)
class ExperimentSpec:
    n_list: tuple[int, ...]
    tau_r: tuple[float, ...] = (-0.1, 0.1, 0.99)
    tau_k_comp: tuple[float, ...] = (1e-3, 5e-2)
    methods: tuple[str, ...] = (METHOD_ESGS, METHOD_PLCP, METHOD_GRID)
    reps: int = 3
    seed: int = 0
    sort_mode: str = "presorted"
    time_limit: float | None = None
    agree_tol: float = 1e-10
    feas_tol: float = 1e-9

    def __post_init__(self):
        if not self.n_list or any(n < 2 for n in self.n_list):
            raise ValueError("n_list must hold integers >= 2")
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if self.sort_mode not in ("presorted", "unsorted", "partial"):
            raise ValueError(f"unknown sort_mode {self.sort_mode!r}")
        bad = [m for m in self.methods
               if m not in (METHOD_ESGS, METHOD_PLCP, METHOD_GRID)]
        if bad or not self.methods:
            raise ValueError(f"unknown methods {bad}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass(frozen=True)
class BenchRecord:
    method: str
    n: int
    k: int
    tau_r: float
    tau_k_comp: float
    rep: int
    solve_seconds: float
    sort_seconds: float
    iterations: int
    k0: int
    k1: int
    feas_residual: float


@dataclass
class BenchRun:
    records: list[BenchRecord] = field(default_factory=list)
    timed_out: list[tuple[str, int, float, float]] = field(default_factory=list)
    disagreements: list[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return bool(self.disagreements)


def generate_instance(n: int, tau_r: float, tau_k_comp: float,
                      seed: int) -> ProjectionInstance:
    """Deterministic instance for (n, tau_r, tau_k_comp, seed)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    x0 = rng.random(n)
    k = max(1, int(math.floor(tau_k_comp * n)))
    if k > n:
        raise ValueError(f"tau_k_comp {tau_k_comp} gives k > n")
    r = tau_r * top_k_sum(x0, k)
    return ProjectionInstance(x0=x0, k=k, r=r)


def _cell_seed(seed: int, cell: int, rep: int) -> int:
    ss = np.random.SeedSequence((seed, cell, rep))
    return int(ss.generate_state(1, np.uint64)[0])


def _solve_sorted(values: np.ndarray, k: int, r: float,
                  method: str) -> ProjectionResult:
    n = values.size
    if float(values[:k].sum()) <= r:
        k0, k1 = find_index_pair(values, k)
        return ProjectionResult(x=values.copy(), lam=0.0, theta=float("nan"),
                                k0=k0, k1=k1, iterations=0,
                                method=METHOD_TRIVIAL)
    if k == 1:
        x = np.minimum(values, r)
        k1 = int(np.count_nonzero(values > r))
        lam = float((values[:k1] - r).sum())
        return ProjectionResult(x=x, lam=lam, theta=float(r), k0=0, k1=k1,
                                iterations=0, method=METHOD_TRIVIAL)
    if k == n:
        shift = (float(values.sum()) - r) / n
        k0, _ = find_index_pair(values, n)
        return ProjectionResult(x=values - shift, lam=shift,
                                theta=float(values[-1] - shift), k0=k0, k1=n,
                                iterations=0, method=METHOD_TRIVIAL)
    if method == METHOD_ESGS:
        return project_sorted_esgs(values, k, r)
    if method == METHOD_PLCP:
        return project_sorted_plcp(values, k, r)
    return project_sorted_grid(values, k, r)


def _cells(spec: ExperimentSpec) -> list[tuple[int, float, float]]:
    return [(n, tr, tk) for n in spec.n_list for tr in spec.tau_r
            for tk in spec.tau_k_comp]


def _run_cell(spec: ExperimentSpec, ci: int) -> BenchRun:
    n, tau_r, tau_k = _cells(spec)[ci]
    run = BenchRun()
    aborted: set[str] = set()
    hints: dict[str, PartialSortHint] = {}
    for rep in range(spec.reps):
        inst = generate_instance(n, tau_r, tau_k, _cell_seed(spec.seed, ci, rep))
        t0 = time.perf_counter()
        values = np.sort(inst.x0)
        values = values[::-1].copy()
        sort_seconds = time.perf_counter() - t0
        if rep == 0:
            # warm-up solve per method, untimed (also absorbs JIT compile)
            for method in spec.methods:
                if spec.sort_mode == "partial":
                    project_partial_sort(inst, PartialSortHint(L=inst.k))
                else:
                    _solve_sorted(values, inst.k, inst.r, method)
        x_ref = None
        for method in spec.methods:
            if method in aborted:
                continue
            if spec.sort_mode == "presorted":
                t0 = time.perf_counter()
                res = _solve_sorted(values, inst.k, inst.r, method)
                solve_seconds = time.perf_counter() - t0
                x_sol = res.x
                feas = max(0.0, top_k_sum(x_sol, inst.k) - inst.r)
            elif spec.sort_mode == "unsorted":
                t0 = time.perf_counter()
                full = project(inst, method=method)
                solve_seconds = time.perf_counter() - t0
                res = full
                x_sol = np.sort(full.x)[::-1]
                feas = max(0.0, top_k_sum(full.x, inst.k) - inst.r)
            else:
                hint = hints.get(method, PartialSortHint(L=inst.k, buffer=32))
                t0 = time.perf_counter()
                full, used_l = project_partial_sort(inst, hint)
                solve_seconds = time.perf_counter() - t0
                hints[method] = next_hint(full, buffer=32)
                res = full
                x_sol = np.sort(full.x)[::-1]
                feas = max(0.0, top_k_sum(full.x, inst.k) - inst.r)
            run.records.append(BenchRecord(
                method=method, n=n, k=inst.k, tau_r=tau_r, tau_k_comp=tau_k,
                rep=rep, solve_seconds=solve_seconds,
                sort_seconds=sort_seconds, iterations=res.iterations,
                k0=res.k0, k1=res.k1, feas_residual=feas))
            if feas > spec.feas_tol * max(1.0, abs(inst.r)):
                run.disagreements.append(
                    f"feasibility residual {feas:g} for {method} at cell "
                    f"(n={n}, tau_r={tau_r}, tau_k_comp={tau_k}, rep={rep})")
            if x_ref is None:
                x_ref = x_sol
            elif float(np.abs(x_sol - x_ref).max()) > spec.agree_tol:
                run.disagreements.append(
                    f"method disagreement for {method} at cell "
                    f"(n={n}, tau_r={tau_r}, tau_k_comp={tau_k}, rep={rep})")
            if (spec.time_limit is not None
                    and solve_seconds > spec.time_limit):
                aborted.add(method)
                run.timed_out.append((method, n, tau_r, tau_k))
    return run


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> BenchRun:
    """Run every cell; returns records plus timed-out cells and problems."""
    cells = range(len(_cells(spec)))
    out = BenchRun()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_cell, [spec] * len(_cells(spec)), cells))
    else:
        parts = [_run_cell(spec, ci) for ci in cells]
    for part in parts:
        out.records.extend(part.records)
        out.timed_out.extend(part.timed_out)
        out.disagreements.extend(part.disagreements)
    return out


def summarize(records: list[BenchRecord]) -> dict[tuple, dict[str, float]]:
    """Per-cell solve-time stats keyed by (method, n, tau_r, tau_k_comp)."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.n, rec.tau_r, rec.tau_k_comp),
                          []).append(rec.solve_seconds)
    out = {}
    for key, times in groups.items():
        arr = np.asarray(times)
        out[key] = {"median": float(np.median(arr)),
                    "mean": float(arr.mean()),
                    "std": float(arr.std()),
                    "count": float(arr.size)}
    return out


def emit_results(records: list[BenchRecord], fmt: str, path: str) -> None:
    """Write records as csv or json; refuses an empty record list."""
    if not records:
        raise ValueError("no records to emit")
    rows = [dataclasses.asdict(rec) for rec in records]
    if fmt == "csv":
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
        return
    if fmt == "json":
        with open(path, "w") as f:
            json.dump(rows, f, indent=1)
        return
    raise ValueError(f"unknown format {fmt!r}")


def parse_results(path: str) -> list[BenchRecord]:
    """Read records back from a csv or json file written by emit_results."""
    if path.endswith(".json"):
        with open(path) as f:
            rows = json.load(f)
    else:
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
    out = []
    for row in rows:
        out.append(BenchRecord(
            method=row["method"], n=int(row["n"]), k=int(row["k"]),
            tau_r=float(row["tau_r"]), tau_k_comp=float(row["tau_k_comp"]),
            rep=int(row["rep"]), solve_seconds=float(row["solve_seconds"]),
            sort_seconds=float(row["sort_seconds"]),
            iterations=int(row["iterations"]), k0=int(row["k0"]),
            k1=int(row["k1"]), feas_residual=float(row["feas_residual"])))
    return out
