import math

import numpy as np
import pytest

from mezzopt.bench import (RAW_HEADER, SUMMARY_HEADER, ExperimentPlan, ResultTable, cell_seed, pool_size,
                           run_interaction, run_setting, summarize)
from mezzopt.errors import ConfigurationError

from conftest import TINY

SPEC = {k: v for k, v in TINY.items() if k != "size"}
FAST_NSGA = {"parent_pop_size": 8, "max_generations": 4}
FAST_ACO = {"max_iter": 10, "max_cons_iter_wo_impr": 3}


def test_summary_header_golden(tmp_path):
    table = ResultTable("x", [], [])
    paths = summarize(table, tmp_path)
    assert paths["summary"].read_text() == (
        "setting,policy,n,C_mean,C_std,GD_mean,GD_std,ED_mean,ED_std,PFS_mean,PFS_std,GS_mean,GS_std,"
        "IGD_mean,IGD_std\n")
    assert paths["raw"].read_text().splitlines()[0] == ",".join(RAW_HEADER)
    assert SUMMARY_HEADER[:3] == ["setting", "policy", "n"]


def test_mean_std_arithmetic():
    rows = [{"policy": "a", "C": 0.8}, {"policy": "a", "C": 1.0}, {"policy": "a", "C": math.nan}]
    t = ResultTable("x", rows, [])
    assert t.mean("a", "C") == pytest.approx(0.9)
    assert t.std("a", "C") == pytest.approx(0.1)


def test_plan_validation():
    with pytest.raises(ConfigurationError):
        ExperimentPlan("1.a", algorithms=())
    with pytest.raises(ConfigurationError):
        ExperimentPlan("1.a", algorithms=("aco3",))
    with pytest.raises(ConfigurationError):
        ExperimentPlan.from_dict({"setting": "1.a", "colour": 1})
    with pytest.raises(ConfigurationError):
        run_interaction(ExperimentPlan("3.a", kind="picking", algorithms=("aco3",)))


def test_cell_seeds_distinct():
    seeds = {cell_seed(0, t, r) for t in range(5) for r in range(10)}
    assert len(seeds) == 50


def test_pool_size_env(monkeypatch):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    assert pool_size(10) == 1
    monkeypatch.setenv("MEZZOPT_THREADS", "many")
    with pytest.raises(ConfigurationError):
        pool_size(10)


def test_single_policy_gets_full_coverage(monkeypatch):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    plan = ExperimentPlan("1.x", spec=SPEC, algorithms=("random",), n_tasks=2, repetitions=1, nsga=FAST_NSGA)
    t = run_setting(plan)
    assert t.rows and all(r["C"] == 1.0 for r in t.rows)


def test_deterministic_policy_has_zero_spread(monkeypatch, tmp_path):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    plan = ExperimentPlan("1.y", spec=SPEC, algorithms=("closest", "random"), n_tasks=2, repetitions=3,
                          nsga=FAST_NSGA)
    t = run_setting(plan)
    assert len(t.values("closest", "C")) == len(t.values("random", "C"))
    # the deterministic front is replicated, so within a task sigma is zero
    for task in range(2):
        t1 = ResultTable("1.y", [r for r in t.rows if r["task"] == task], [])
        assert t1.std("closest", "C") == 0.0 and t1.std("closest", "IGD") == 0.0
    a = summarize(t, tmp_path / "a")
    b = summarize(run_setting(plan), tmp_path / "b")
    assert a["summary"].read_bytes() == b["summary"].read_bytes()
    assert a["raw"].read_bytes() == b["raw"].read_bytes()


def test_reference_front_not_beaten(monkeypatch):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    plan = ExperimentPlan("2.x", kind="picking", spec=SPEC, algorithms=("aco3", "sshape"), n_tasks=2,
                          repetitions=2, aco=FAST_ACO)
    t = run_setting(plan)
    assert set(t.policies()) == {"aco3", "sshape"}
    for task in range(2):
        cs = [r["C"] for r in t.rows if r["task"] == task and r["repetition"] == 0]
        assert all(0.0 <= c <= 1.0 for c in cs)


def test_identical_warehouses_are_indistinguishable(monkeypatch):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    plan = ExperimentPlan("3.x", kind="picking", spec=SPEC, algorithms=("aco3",), warehouses=("random", "nsga2"),
                          n_tasks=2, repetitions=1, aco=FAST_ACO)
    from mezzopt.bench import prepare_instances
    inst = prepare_instances(ExperimentPlan("3.x", kind="picking", spec=SPEC, algorithms=("aco3",)))["random"]
    t = run_interaction(plan, {"random": inst, "nsga2": inst})
    for k in ("C", "GD", "IGD"):
        assert np.allclose(t.values("random+aco3", k), t.values("nsga2+aco3", k), equal_nan=True)


def test_parallel_matches_serial(monkeypatch):
    plan = ExperimentPlan("2.p", kind="picking", spec=SPEC, algorithms=("aco4",), n_tasks=2, repetitions=2,
                          aco=FAST_ACO)
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    serial = run_setting(plan).rows
    monkeypatch.setenv("MEZZOPT_THREADS", "2")
    parallel = run_setting(plan).rows
    assert [tuple(r.values()) for r in serial] == [tuple(r.values()) for r in parallel] or \
        np.allclose([[r[k] for k in ("C", "GD")] for r in serial], [[r[k] for k in ("C", "GD")] for r in parallel],
                    equal_nan=True)
