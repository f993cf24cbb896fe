import json

import numpy as np
import pytest

from abcde import ContractViolation
from abcde.bench.experiment import (
    ExperimentPlan,
    ExperimentResult,
    emit_plot_data,
    load_plan,
    run_experiment,
    run_seed,
)
from abcde.io import read_trace, split_header

SMALL = {"topology": {"kind": "er", "n": 6, "p": 0.5}, "S": 4, "M": 2, "max_iter": 5, "base_seed": 3}


def _plan(**overrides):
    return ExperimentPlan(**{**SMALL, **overrides})


def test_one_instance_both_variants(tmp_path):
    res = run_experiment(_plan(), tmp_path)
    traces = sorted(tmp_path.glob("trace_*.csv"))
    assert len(traces) == 2
    assert sorted(r["variant"] for r in res.aggregate) == ["abcd-c", "abcd-e"]
    assert (tmp_path / "instance_000.json").exists()


def test_aggregate_is_byte_identical_across_runs(tmp_path):
    plan = _plan(instances=2, repeats=2)
    run_experiment(plan, tmp_path / "a")
    run_experiment(plan, tmp_path / "b")
    assert (tmp_path / "a" / "aggregate.csv").read_bytes() == (tmp_path / "b" / "aggregate.csv").read_bytes()


def test_aggregate_recomputable_from_traces(tmp_path):
    res = run_experiment(_plan(instances=2, repeats=3), tmp_path)
    for row in res.aggregate:
        finals = []
        for r in res.select(row["variant"], row["S"], row["M"]):
            if r.instance == row["instance"]:
                _, rows = read_trace(r.trace_path)
                finals.append(rows[-1]["gbest_utility"])
        assert row["runs"] == len(finals) == 3
        assert row["mean_final"] == np.mean(finals)
        assert row["std_final"] == np.std(finals)


def test_output_files_carry_config_headers(tmp_path):
    run_experiment(_plan(), tmp_path)
    for path in tmp_path.iterdir():
        header, _ = split_header(path.read_text())
        assert header, path
    header, _ = read_trace(next(tmp_path.glob("trace_*abcd-e*.csv")))
    assert header["plan"]["base_seed"] == 3 and "seed" in header["config"]


def test_run_seeds_depend_only_on_their_cell():
    plan = _plan(variants=["abcd-e"])
    wider = _plan(variants=["abcd-c", "abcd-e"])
    a = {r.seed: r.final for r in run_experiment(plan).runs}
    b = {r.seed: r.final for r in run_experiment(wider).select("abcd-e")}
    assert a == b
    assert run_seed(0, 1, 2, "abcd-e") != run_seed(0, 1, 2, "abcd-c")


def test_plot_data_axes(tmp_path):
    res = run_experiment(_plan(S=[2, 4], M=[1, 2], variants=["abcd-e"], instances=2))
    path = emit_plot_data(res, "iteration-vs-utility", tmp_path / "it.csv")
    header, body = split_header(path.read_text())
    lines = body.strip().splitlines()
    assert lines[0] == "x,mean_utility,std_utility"
    assert len(lines) - 1 == 5 and header["axis"] == "iteration-vs-utility"
    means = [float(l.split(",")[1]) for l in lines[1:]]
    assert means == sorted(means)
    body = split_header(emit_plot_data(res, "S-vs-utility", tmp_path / "s.csv").read_text())[1]
    assert [l.split(",")[0] for l in body.strip().splitlines()[1:]] == ["2", "4"]
    body = split_header(emit_plot_data(res, "M-vs-utility", tmp_path / "m.csv").read_text())[1]
    assert [l.split(",")[0] for l in body.strip().splitlines()[1:]] == ["1", "2"]


def test_plot_data_errors(tmp_path):
    empty = ExperimentResult(_plan(), [], [])
    with pytest.raises(ContractViolation):
        emit_plot_data(empty, "S-vs-utility", tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()
    res = run_experiment(_plan(variants=["abcd-e"]))
    with pytest.raises(ContractViolation, match="axis"):
        emit_plot_data(res, "time-vs-utility", tmp_path / "x.csv")


def test_plan_file_loading(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(SMALL))
    assert load_plan(path) == _plan()
    path.write_text(json.dumps({**SMALL, "colour": "red"}))
    with pytest.raises(ContractViolation, match="unknown"):
        load_plan(path)
    with pytest.raises(ContractViolation):
        load_plan(tmp_path / "nope.json")


@pytest.mark.parametrize(
    "overrides",
    [{"repeats": 0}, {"instances": 0}, {"variants": ["abcd-x"]}, {"S": [2], "M": [3]}, {"engine": "gpu"}],
)
def test_invalid_plans(overrides):
    with pytest.raises(ContractViolation):
        _plan(**overrides)


def test_unwritable_output_is_reported(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ContractViolation, match=str(blocker)):
        run_experiment(_plan(), blocker / "sub")


def test_engines_agree():
    a = run_experiment(_plan(engine="replica"))
    b = run_experiment(_plan(engine="distributed"))
    assert a.aggregate == b.aggregate
