import json
import subprocess
import sys

import numpy as np
import pytest

from seqbudget.core import ConfigError, InvariantViolation, RunTrace
from seqbudget.harness import (checkpoints, emit_outputs, from_dict, run_experiment, summarize,
                               trace_csv)
from seqbudget.harness import cli
from seqbudget.harness.plotting import render_svg

BASE = {
    "name": "t",
    "environment": {"kind": "mab", "means": [0.3, 0.5, 0.7]},
    "algorithm": {"name": "cbm-ucb"},
    "budget": {"kind": "linear", "epsilon": 0.3},
    "horizon": 10,
    "replications": 1,
    "seed": 0,
}


def cfg(**over):
    data = json.loads(json.dumps(BASE))
    for k, v in over.items():
        data[k] = v
    return from_dict(data)


def test_row_count():
    traces, summary = run_experiment(cfg())
    assert len(traces) == 1 and len(traces[0]) == 10
    assert summary.t[-1] == 10 and summary.replications == 1


def test_zero_budget_no_queries():
    traces, _ = run_experiment(cfg(budget={"kind": "fixed", "b0": 0}, replications=3))
    assert all(tr.query.sum() == 0 for tr in traces)


@pytest.mark.parametrize("bad", [
    {"horizon": 0},
    {"replications": 0},
    {"algorithm": {"name": "nope"}},
    {"environment": {"kind": "linear", "theta": [1.0], "action_sets": [[[1.0]]]}},
    {"budget": {"kind": "linear"}},
    {"budget": {"kind": "polynomial", "c": 2}},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        cfg(**bad)


def test_greedy_needs_initial_budget():
    with pytest.raises(ConfigError):
        cfg(algorithm={"name": "greedy"}, budget={"kind": "linear", "epsilon": 0.5})


def test_unknown_key():
    data = dict(BASE, extra=1)
    with pytest.raises(ConfigError):
        from_dict(data)


def test_headers(tmp_path):
    traces, summary = run_experiment(cfg())
    emit_outputs(tmp_path, traces, summary, svg=False)
    assert (tmp_path / "summary.csv").read_text().splitlines()[0] == \
        "t,regret_mean,regret_std,regret_min,regret_max,budget_used_mean"
    assert (tmp_path / "traces" / "rep_0000.csv").read_text().splitlines()[0] == \
        "t,context,action,query,budget,budget_used,regret_inst,regret_cum"
    assert not list(tmp_path.rglob("*.tmp"))


def test_float_round_trip():
    traces, _ = run_experiment(cfg(horizon=50))
    rows = trace_csv(traces[0]).splitlines()[1:]
    cum = np.array([float(r.split(",")[-1]) for r in rows])
    assert np.array_equal(cum, traces[0].regret_cum)


def test_summary_statistics():
    traces, summary = run_experiment(cfg(horizon=300, replications=4))
    reg = np.stack([tr.regret_cum for tr in traces])
    i = list(summary.t).index(300)
    assert summary.regret_mean[i] == pytest.approx(reg[:, -1].mean())
    assert summary.regret_std[i] == pytest.approx(reg[:, -1].std())
    assert summary.regret_max[i] == reg[:, -1].max()
    assert list(checkpoints(10**6))[-1] == 10**6 and len(checkpoints(10**6)) < 80


def test_invalid_trace_rejected_at_write(tmp_path):
    tr = RunTrace.empty(3)
    tr.budget[:] = [1, 1, 1]
    tr.budget_used[:] = [0, 1, 2]
    tr.finalize()
    with pytest.raises(InvariantViolation):
        emit_outputs(tmp_path, [tr], None, svg=False)
    assert not (tmp_path / "traces").exists()


def test_empty_svg():
    svg = render_svg(None, ())
    assert svg.startswith(b"<?xml") and b"<svg" in svg
    assert render_svg(None, ()) == svg


def _files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file()}


def test_parallel_matches_serial(tmp_path):
    c = cfg(horizon=400, replications=3,
            output={"bounds": [{"kind": "profile", "profile": "linear", "A": 3,
                                "params": {"epsilon": 0.3}}]})
    for workers, sub in ((1, "a"), (3, "b")):
        traces, summary = run_experiment(c, workers)
        emit_outputs(tmp_path / sub, traces, summary, cli.build_curves(c.output["bounds"], 400),
                     config=c.to_dict())
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_cli_run_sweep_bounds(tmp_path):
    conf = tmp_path / "c.json"
    data = dict(BASE, horizon=100, replications=2,
                sweep={"budget.epsilon": [1.0, 2.0], "algorithm.name": ["cbm-ucb", "greedy"]})
    data["budget"] = {"kind": "linear", "epsilon": 1.0}
    conf.write_text(json.dumps(data))
    assert cli.main(["run", "--config", str(conf), "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "regret.svg").exists()
    assert cli.main(["sweep", "--config", str(conf), "--out", str(tmp_path / "s")]) == 0
    lines = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
    assert len(lines) == 5
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"horizon": 50, "curves": [
        {"kind": "mab_lb_unit", "params": {"A": 3, "B": 5}},
        {"kind": "profile", "profile": "fixed", "A": 3, "params": {"b0": 5}}]}))
    assert cli.main(["bounds", "--config", str(b), "--out", str(tmp_path / "bd")]) == 0
    assert (tmp_path / "bd" / "bound_01.csv").read_text().startswith("t,value\n1,")


def test_cli_exit_codes(tmp_path, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1
    good = tmp_path / "good.json"
    good.write_text(json.dumps(BASE))

    def boom(*a, **k):
        raise InvariantViolation("B^q(t) > B(t)", round=3, algorithm="x", seed=0)

    monkeypatch.setattr(cli, "run_experiment", boom)
    assert cli.main(["run", "--config", str(good), "--out", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps(BASE))
    proc = subprocess.run([sys.executable, "-m", "seqbudget", "run", "--config", str(conf),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "summary.csv").exists()


def test_rl_and_linear_configs():
    rl = cfg(environment={"kind": "random_mdp", "S": 3, "A": 2, "H": 3, "seed": 4},
             algorithm={"name": "cbm-ulcvi", "delta": 0.2}, budget={"kind": "prop42"},
             horizon=30, replications=2)
    traces, summary = run_experiment(rl)
    assert all(tr.budget_feasible() for tr in traces)
    lin = cfg(environment={"kind": "prop42_linear"}, algorithm={"name": "cbm-oful"},
              budget={"kind": "infinite"}, horizon=30)
    traces, _ = run_experiment(lin)
    assert traces[0].budget[0] == 1e12
    with pytest.raises(ConfigError):
        cfg(environment={"kind": "prop42_linear"}, algorithm={"name": "cbm-ucb"})


def test_summarize_needs_traces():
    with pytest.raises(ValueError):
        summarize([], 10)
