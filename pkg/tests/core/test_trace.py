import pytest

from configs.package import CONF
from core.trace import read_trace
from utils.errors import TraceSchemaError


def _write(goal_world, tmp_path, steps=5):
    coord = goal_world(seed=3)
    coord.initialize()
    coord.run_sync(steps)
    path = tmp_path / "trace.csv"
    coord.recorder.write(str(path), 3, "cafe")
    return path, coord


def test_written_trace_reads_back(goal_world, tmp_path):
    path, coord = _write(goal_world, tmp_path)
    trace = read_trace(str(path))
    assert trace.meta["seed"] == "3"
    assert trace.meta["config_hash"] == "cafe"
    assert len(trace.rows) == len(coord.recorder.rows)
    states = trace.world_states(1)
    assert sorted(states) == [0, 1, 2, 3, 4]
    assert tuple(states[4]) == tuple(coord.world.entity(1).pose.tolist())


def test_truncated_trace_rejected(goal_world, tmp_path):
    path, _ = _write(goal_world, tmp_path)
    text = path.read_text(encoding="utf-8")
    path.write_text(text[: len(text) // 2], encoding="utf-8")
    with pytest.raises(TraceSchemaError):
        read_trace(str(path))


def test_unknown_major_version_rejected(goal_world, tmp_path):
    path, _ = _write(goal_world, tmp_path)
    text = path.read_text(encoding="utf-8")
    path.write_text(text.replace(f"schema={CONF.TRACE.SCHEMA_VERSION}", "schema=2.0", 1), encoding="utf-8")
    with pytest.raises(TraceSchemaError) as err:
        read_trace(str(path))
    assert err.value.version == "2.0"


def test_minor_version_bump_accepted(goal_world, tmp_path):
    path, _ = _write(goal_world, tmp_path)
    text = path.read_text(encoding="utf-8")
    path.write_text(text.replace(f"schema={CONF.TRACE.SCHEMA_VERSION}", f"schema={CONF.TRACE.SCHEMA_MAJOR}.7", 1),
                    encoding="utf-8")
    assert read_trace(str(path)).meta["schema"].endswith(".7")


def test_missing_header_rejected(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("step,time\n", encoding="utf-8")
    with pytest.raises(TraceSchemaError):
        read_trace(str(path))
