import copy
import csv
import io
import json
import os

import pytest

from cli.app import EXIT_CONFIG, EXIT_OK, main
from cli.schema import config_hash, validate_config, validate_file

ENCOUNTER = {
    "name": "short-encounter",
    "case": "encounter",
    "seed": 3,
    "encounter": {
        "mpc": {"horizon": 6, "robust_horizon": 1, "candidates": 48, "elites": 8, "iterations": 2},
        "ownship": {"start": [0.0, 0.0, 0.0], "target": [6.0, 0.0, 0.0]},
        "intruder": {"start": [0.0, 20.0, 0.0], "target": [30.0, 20.0, 0.0]},
        "t_max": 10,
    },
}

FORMATION = {
    "name": "small-formation",
    "case": "formation",
    "seed": 0,
    "formation": {
        "dt": 0.05,
        "duration": 3.0,
        "agents": [
            {"id": 1, "position": [0.0, 0.0], "input_box": [-1.0, -1.0, 1.0, 1.0],
             "task": "F[0.0,2.0] (norm(x1 - 1.0, x2) <= 0.5)"},
            {"id": 2, "position": [1.1, 0.0], "input_box": [-1.5, -1.5, 1.5, 1.5]},
            {"id": 3, "position": [-0.9, 0.1], "input_box": [-1.5, -1.5, 1.5, 1.5]},
        ],
        "edges": [
            {"leader": 2, "follower": 1, "task": "G[0.5,3.0] (norm(x1 - x3 - 1.0, x2 - x4) <= 0.5)"},
            {"leader": 3, "follower": 1, "task": "G[0.5,3.0] (norm(x1 - x3 + 1.0, x2 - x4) <= 0.5)"},
        ],
    },
}


GENERIC = {
    "name": "two-agents",
    "case": "generic",
    "seed": 2,
    "generic": {
        "world": {"bounds": [-5, -5, 5, 5], "dt": 0.1},
        "channel": {"transport": "inprocess"},
        "agents": [
            {"id": 1,
             "entity": {"pose": [0.0, 0.0], "radius": 0.1,
                        "model": {"kind": "single-integrator", "dim": 2,
                                  "input_low": [-1, -1], "input_high": [1, 1]}},
             "knowledge": {"goal": [1.0, 1.0]},
             "components": [{"type": "perception"}, {"type": "goal-controller"},
                            {"type": "awareness-broadcaster"}]},
            {"id": 2, "require_controller": False, "components": [{"type": "message-receiver"}]},
        ],
        "steps": 20,
    },
}


def _write(tmp_path, data, name="scenario.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def _run(tmp_path, data, out="out", seed=None):
    path = _write(tmp_path, data)
    argv = ["run", path, "--output", str(tmp_path / out)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    return main(argv), path, tmp_path / out


# --------------------
# validate
# --------------------
@pytest.mark.parametrize("name", ["usecase1.json", "usecase2.json", "usecase3.json"])
def test_shipped_scenarios_validate(scenarios_dir, name, capsys):
    assert main(["validate", os.path.join(scenarios_dir, name)]) == EXIT_OK
    assert "ok" in capsys.readouterr().out


def test_robust_horizon_must_be_below_horizon(scenarios_dir, tmp_path, capsys):
    with open(os.path.join(scenarios_dir, "usecase1.json"), encoding="utf-8") as f:
        data = json.load(f)
    data["encounter"]["mpc"]["robust_horizon"] = data["encounter"]["mpc"]["horizon"]
    assert main(["validate", _write(tmp_path, data)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "encounter.mpc" in err
    assert "N_r must be < horizon N" in err


def test_formula_errors_report_the_position(tmp_path, capsys):
    data = copy.deepcopy(FORMATION)
    data["formation"]["edges"][0]["task"] = "G[0.5,3.0] (norm(x1 - x3 +) <= 0.5)"
    assert main(["validate", _write(tmp_path, data)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "formation.edges.0.task" in err
    assert "at position 26" in err


def test_shape_errors_are_collected():
    report = validate_config({"case": "warehouse", "seed": "abc", "bogus": 1})
    assert not report.ok
    assert report.scenario is None
    assert len(report.diagnostics) >= 2


def test_async_only_for_generic():
    data = copy.deepcopy(FORMATION)
    data["mode"] = "async"
    report = validate_config(data)
    assert not report.ok
    assert "async" in str(report.diagnostics[0])


def test_unknown_region_in_warehouse(scenarios_dir, tmp_path):
    with open(os.path.join(scenarios_dir, "usecase3.json"), encoding="utf-8") as f:
        data = json.load(f)
    data["warehouse"]["schedule"][0]["origin"] = "CP-9"
    report = validate_file(_write(tmp_path, data))
    assert [d.path for d in report.diagnostics] == ["warehouse.schedule.0.origin"]


def test_case_block_from_another_file(tmp_path):
    (tmp_path / "formation.json").write_text(json.dumps(FORMATION["formation"]), encoding="utf-8")
    data = dict(FORMATION, formation="formation.json")
    report = validate_file(_write(tmp_path, data))
    assert report.ok
    assert report.raw["formation"] == FORMATION["formation"]
    assert config_hash(report.raw) == config_hash(FORMATION)
    missing = validate_file(_write(tmp_path, dict(FORMATION, formation="nope.json"), "other.json"))
    assert not missing.ok


def test_unreadable_files(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "absent.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json", encoding="utf-8")
    assert main(["validate", str(bad)]) == EXIT_CONFIG
    assert "invalid JSON" in capsys.readouterr().err


def test_bad_arguments_exit_with_config_code():
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main(["replay", "trace.csv"]) == EXIT_CONFIG


# --------------------
# run / replay
# --------------------
def test_run_writes_artifacts(tmp_path):
    code, path, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    for name in ("trace.csv", "metrics.json", "manifest.json"):
        assert (out / name).is_file()
    assert not (out / "task_report.csv").exists()
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert "min_barrier" in metrics
    assert metrics["seed"] == 0 and metrics["case"] == "formation"
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["scenario"] == os.path.abspath(path)
    assert manifest["config_hash"] == metrics["config_hash"]
    header = (out / "trace.csv").read_text(encoding="utf-8").splitlines()[0]
    assert f"config_hash={metrics['config_hash']}" in header


def test_same_seed_gives_identical_traces(tmp_path):
    assert _run(tmp_path, FORMATION, "a", seed=11)[0] == EXIT_OK
    assert _run(tmp_path, FORMATION, "b", seed=11)[0] == EXIT_OK
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    assert "seed=11" in (tmp_path / "a" / "trace.csv").read_text(encoding="utf-8")


def test_replay_barrier_matches_the_run(tmp_path, capsys):
    code, _, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    capsys.readouterr()
    assert main(["replay", str(out / "trace.csv"), "--metric", "barrier"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    series = metrics["barrier"]
    assert {r["barrier"] for r in rows} == set(series)
    for row in rows:
        expected = series[row["barrier"]][int(row["sample"])]
        if expected is None:
            assert row["value"] == "nan"
        else:
            assert float(row["value"]) == pytest.approx(expected, abs=1e-9)


def test_replay_separation_matches_the_metrics(tmp_path, capsys):
    code, _, out = _run(tmp_path, ENCOUNTER)
    assert code == EXIT_OK
    capsys.readouterr()
    assert main(["replay", str(out / "trace.csv"), "--metric", "separation"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert len(rows) == len(metrics["separation"]) == metrics["steps"]
    for row, expected in zip(rows, metrics["separation"]):
        assert abs(float(row["separation"]) - expected) <= 1e-9


def test_replay_rejects_a_metric_of_another_case(tmp_path, capsys):
    code, _, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    assert main(["replay", str(out / "trace.csv"), "--metric", "separation"]) == EXIT_CONFIG
    assert "not available" in capsys.readouterr().err


def test_truncated_trace_is_refused(tmp_path, capsys):
    code, _, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    trace = out / "trace.csv"
    lines = trace.read_text(encoding="utf-8").splitlines(keepends=True)
    trace.write_text("".join(lines[:-3]), encoding="utf-8")
    assert main(["replay", str(trace), "--metric", "barrier"]) == EXIT_CONFIG
    assert "truncated" in capsys.readouterr().err


def test_hash_mismatch_needs_force(tmp_path, capsys):
    code, path, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    changed = dict(FORMATION, seed=99)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(changed, f)
    trace = str(out / "trace.csv")
    assert main(["replay", trace, "--metric", "robustness"]) == EXIT_CONFIG
    assert "hash" in capsys.readouterr().err
    assert main(["replay", trace, "--metric", "robustness", "--force"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["agent_id"] for r in rows] == ["1", "2", "3"]


def test_replay_with_explicit_scenario(tmp_path, capsys):
    code, path, out = _run(tmp_path, FORMATION)
    assert code == EXIT_OK
    os.remove(out / "manifest.json")
    trace = str(out / "trace.csv")
    assert main(["replay", trace, "--metric", "robustness"]) == EXIT_CONFIG
    assert main(["replay", trace, "--metric", "robustness", "--scenario", path]) == EXIT_OK


@pytest.mark.slow
def test_warehouse_run_reports_every_issued_task(scenarios_dir, tmp_path):
    with open(os.path.join(scenarios_dir, "usecase3.json"), encoding="utf-8") as f:
        data = json.load(f)
    data["warehouse"]["n_samples"] = 20
    code, _, out = _run(tmp_path, data)
    assert code == EXIT_OK
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    with open(out / "task_report.csv", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == metrics["issued_tasks"]
    assert {r["kind"] for r in rows} == {"fetch", "home"}


def test_generic_scenario_runs_over_tcp(tmp_path):
    over_tcp = copy.deepcopy(GENERIC)
    over_tcp["generic"]["channel"] = {"transport": "tcp", "host": "127.0.0.1", "port": 0}
    assert _run(tmp_path, GENERIC, "memory")[0] == EXIT_OK
    assert _run(tmp_path, over_tcp, "tcp")[0] == EXIT_OK
    memory = json.loads((tmp_path / "memory" / "metrics.json").read_text(encoding="utf-8"))
    tcp = json.loads((tmp_path / "tcp" / "metrics.json").read_text(encoding="utf-8"))
    assert tcp["messages"] == memory["messages"]
    assert memory["messages"]["sent"] > 0
    assert memory["messages"]["delivered"] == memory["messages"]["sent"]
    assert tcp["belief"] == memory["belief"]


def test_case_header_channel_selects_tcp(tmp_path):
    data = dict(FORMATION, channel={"transport": "tcp"})
    assert validate_config(data).ok
    assert _run(tmp_path, data)[0] == EXIT_OK
    bad = dict(GENERIC, channel={"transport": "tcp"})
    assert not validate_config(bad).ok
    unknown = copy.deepcopy(GENERIC)
    unknown["generic"]["channel"] = {"transport": "carrier-pigeon"}
    assert [d.path for d in validate_config(unknown).diagnostics] == ["generic.channel.transport"]
