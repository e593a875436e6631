import dataclasses
import json
import os

import pytest

from tasking.components import HomeCall, ScheduledTask
from tasking.regions import default_warehouse
from tasking.tasks import CapabilityProfile, TaskStatus
from tasking.warehouse import (
    DISPATCHER_ID,
    REPORT_COLUMNS,
    RobotSpec,
    WarehouseConfig,
    build_warehouse,
    run_warehouse,
    warehouse_setup,
)
from utils.errors import ConfigurationError, UnknownRegionError


def noiseless_setup(n_samples: int = 4) -> WarehouseConfig:
    cfg = warehouse_setup()
    robots = {
        rid: dataclasses.replace(r, profile=dataclasses.replace(r.profile, noise_scale=0.0))
        for rid, r in cfg.robots.items()
    }
    return dataclasses.replace(cfg, robots=robots, n_samples=n_samples)


def test_config_validation():
    wh = default_warehouse()
    robot = RobotSpec("A", "H-1", (2.0, 2.0), CapabilityProfile(3.0))
    with pytest.raises(ConfigurationError):
        WarehouseConfig(wh, {})
    with pytest.raises(ConfigurationError):
        WarehouseConfig(wh, {DISPATCHER_ID: robot})
    with pytest.raises(ConfigurationError):
        WarehouseConfig(wh, {1: dataclasses.replace(robot, start=(30.0, 2.0))})
    with pytest.raises(UnknownRegionError):
        WarehouseConfig(wh, {1: robot}, [ScheduledTask(1, "CP-9", "PICKUP", 5)])
    with pytest.raises(ConfigurationError):
        WarehouseConfig(wh, {1: robot}, [ScheduledTask(1, "CP-1", "PICKUP", 0)])
    with pytest.raises(ConfigurationError):
        WarehouseConfig(wh, {1: robot}, epsilon=1.5)


def test_config_from_scenario_file(scenarios_dir):
    with open(os.path.join(scenarios_dir, "usecase3.json"), encoding="utf-8") as f:
        block = json.load(f)["warehouse"]
    cfg = WarehouseConfig.from_dict(block)
    default = warehouse_setup()
    assert sorted(cfg.robots) == [1, 2, 3, 4]
    assert cfg.robots[3].profile == default.robots[3].profile
    assert cfg.schedule == default.schedule
    assert cfg.home_call == HomeCall(30, 10)
    assert cfg.epsilon == 0.2 and cfg.steps == 41


def test_build_puts_the_dispatcher_first():
    coord = build_warehouse(warehouse_setup(), seed=0)
    assert [a.id for a in coord.agents] == [0, 1, 2, 3, 4]
    assert sorted(coord.world.entities) == [1, 2, 3, 4]


def test_noiseless_run_matches_the_shortest_path_schedule():
    result = run_warehouse(noiseless_setup(), seed=0)
    by_id = {t.id: t for t in result.tasks}
    assert sorted(by_id) == list(range(1, 10))
    assignees = {tid: result.names[t.assignee] for tid, t in by_id.items()}
    assert {k: assignees[k] for k in (1, 2, 3, 4, 5)} == {1: "B", 2: "A", 3: "D", 4: "A", 5: "B"}
    assert {k: assignees[k] for k in (6, 7, 8, 9)} == {6: "A", 7: "B", 8: "C", 9: "D"}
    completion = {tid: t.completion_step for tid, t in by_id.items()}
    assert completion == {1: 7, 2: 7, 3: 7, 4: 20, 5: 20, 6: 33, 7: 33, 8: 30, 9: 33}
    assert all(t.status == TaskStatus.DONE for t in result.tasks)
    assert result.fetch_counts == {"A": 2, "B": 2, "C": 0, "D": 1}
    assert result.home_steps == {"A": 33, "B": 33, "C": 30, "D": 33}
    assert result.all_fetched_on_time
    assert result.exits == 0 and result.wall_collisions == 0
    assert all(rho >= 0.0 for rho in result.robustness.values())


def test_report_rows_follow_the_columns():
    result = run_warehouse(noiseless_setup(), seed=0)
    rows = result.report_rows()
    assert len(rows) == result.metrics()["issued_tasks"] == 9
    assert all(tuple(row) == REPORT_COLUMNS for row in rows)
    assert {row["kind"] for row in rows} == {"fetch", "home"}


@pytest.mark.slow
def test_warehouse_scenario_with_noise():
    result = run_warehouse(warehouse_setup(), seed=0)
    assert result.fetch_counts["C"] == 0
    assert len(result.fetch_tasks) == 5
    assert result.all_fetched_on_time
    assert result.exits == 0
    assert all(t.assignee is not None for t in result.tasks)
