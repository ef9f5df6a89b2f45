import numpy as np
import pytest

from topksum.bench import (CSV_FIELDS, ExperimentSpec, emit_results,
                           generate_instance, parse_results, run_experiment,
                           summarize)


def test_generate_instance_deterministic():
    a = generate_instance(500, -0.1, 0.05, seed=42)
    b = generate_instance(500, -0.1, 0.05, seed=42)
    assert np.array_equal(a.x0, b.x0)
    assert (a.k, a.r) == (b.k, b.r)
    c = generate_instance(500, -0.1, 0.05, seed=43)
    assert not np.array_equal(a.x0, c.x0)


def test_generate_instance_protocol():
    inst = generate_instance(1000, 0.5, 0.05, seed=0)
    assert inst.k == 50
    assert np.all((inst.x0 >= 0) & (inst.x0 < 1))
    top = np.sort(inst.x0)[::-1][:50].sum()
    assert inst.r == pytest.approx(0.5 * top, rel=1e-15)
    tiny = generate_instance(10, 0.5, 1e-4, seed=0)
    assert tiny.k == 1


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(n_list=())
    with pytest.raises(ValueError):
        ExperimentSpec(n_list=(100,), reps=0)
    with pytest.raises(ValueError):
        ExperimentSpec(n_list=(100,), methods=("nope",))
    with pytest.raises(ValueError):
        ExperimentSpec(n_list=(100,), sort_mode="quick")
    with pytest.raises(ValueError):
        ExperimentSpec(n_list=(100,), time_limit=0.0)


def test_run_experiment_structure():
    spec = ExperimentSpec(n_list=(64, 128), tau_r=(-0.1, 0.5),
                          tau_k_comp=(0.05,), reps=2, seed=1)
    run = run_experiment(spec)
    assert not run.failed
    assert len(run.records) == 2 * 2 * 1 * 2 * 3  # n x tau_r x tau_k x reps x methods
    for rec in run.records:
        assert rec.solve_seconds >= 0
        assert rec.sort_seconds >= 0
        assert rec.feas_residual <= 1e-9 * max(1.0, abs(rec.tau_r) * rec.k)
        assert 0 <= rec.k0 < rec.k <= rec.k1 <= rec.n
    stats = summarize(run.records)
    assert len(stats) == 2 * 2 * 1 * 3
    for entry in stats.values():
        assert entry["count"] == 2


def test_run_experiment_sort_modes():
    for mode in ("unsorted", "partial"):
        spec = ExperimentSpec(n_list=(64,), tau_r=(-0.1,), tau_k_comp=(0.1,),
                              methods=("esgs",), reps=2, seed=3,
                              sort_mode=mode)
        run = run_experiment(spec)
        assert not run.failed
        assert len(run.records) == 2


def test_time_limit_skips_remaining_reps():
    spec = ExperimentSpec(n_list=(256,), tau_r=(-0.1,), tau_k_comp=(0.2,),
                          methods=("esgs", "grid"), reps=3, seed=5,
                          time_limit=1e-9)
    run = run_experiment(spec)
    assert run.timed_out
    methods = [rec.method for rec in run.records]
    # every method records at least its first rep, then gets cut off
    assert methods.count("esgs") >= 1
    assert methods.count("grid") >= 1
    assert len(run.records) < 6


def test_emit_parse_round_trip(tmp_path):
    spec = ExperimentSpec(n_list=(64,), tau_r=(-0.1,), tau_k_comp=(0.05,),
                          methods=("esgs", "plcp"), reps=2, seed=7)
    run = run_experiment(spec)
    for fmt, name in (("csv", "out.csv"), ("json", "out.json")):
        path = str(tmp_path / name)
        emit_results(run.records, fmt, path)
        back = parse_results(path)
        assert back == run.records
    header = (tmp_path / "out.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_FIELDS)
    with pytest.raises(ValueError):
        emit_results([], "csv", str(tmp_path / "empty.csv"))
    with pytest.raises(ValueError):
        emit_results(run.records, "xml", str(tmp_path / "bad.xml"))
