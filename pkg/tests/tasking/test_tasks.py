import numpy as np
import pytest

from tasking.regions import Warehouse, default_warehouse
from tasking.tasks import CapabilityProfile, Commitment, FetchTask, TaskStatus
from utils.errors import ConfigurationError, PathConstructionError, UnknownRegionError


def test_status_machine():
    task = FetchTask(1, "CP-1", "PICKUP", 10, 1)
    assert task.status == TaskStatus.OPEN
    assert task.due_step == 11
    task.assign(2)
    assert task.assignee == 2
    with pytest.raises(ConfigurationError):
        task.assign(3)
    task.complete(9)
    assert task.deadline_met
    with pytest.raises(ConfigurationError):
        task.fail(10)


def test_open_to_done_skips_a_state():
    with pytest.raises(ConfigurationError):
        FetchTask(1, "CP-1", "PICKUP", 10, 1).complete(3)


def test_late_completion_misses_the_deadline():
    task = FetchTask(1, "CP-1", "PICKUP", 5, 0)
    task.assign(1)
    task.complete(6)
    assert not task.deadline_met


def test_deadline_validation():
    with pytest.raises(ConfigurationError):
        FetchTask(1, "CP-1", "PICKUP", 0, 1)
    with pytest.raises(ConfigurationError):
        FetchTask(1, None, "H-1", -1, 1)
    with pytest.raises(ConfigurationError):
        FetchTask(1, None, "H-1", 3, -1)
    # vuelta a casa con plazo 0
    assert not FetchTask(1, "", "H-1", 0, 30).is_fetch


def test_payload_keeps_the_task():
    task = FetchTask(3, "CP-3", "PICKUP", 7, 1)
    payload = task.payload("bid", agent_id=4, risk=0.1)
    assert payload.status == "bid" and payload.agent_id == 4
    copy = FetchTask.from_payload(payload)
    assert (copy.id, copy.origin, copy.destination, copy.deadline, copy.issue_step) == (3, "CP-3", "PICKUP", 7, 1)
    home = FetchTask.from_payload(FetchTask(6, None, "H-1", 10, 30).payload())
    assert home.origin is None


def test_capability_profile():
    with pytest.raises(ConfigurationError):
        CapabilityProfile(0.0)
    with pytest.raises(ConfigurationError):
        CapabilityProfile(1.0, -0.1)
    model = CapabilityProfile(2.0).model()
    assert model.speed_limit == 2.0


def test_commitment_advances_through_origin_and_destination():
    wh = default_warehouse()
    task = FetchTask(1, "CP-2", "PICKUP", 7, 1)
    task.assign(1)
    plan = Commitment(1)
    plan.add(task, 2)
    assert plan.head(1) is None
    assert plan.head(2) is task
    # en el destino sin haber pasado por el origen: nada
    assert plan.advance((10.0, 10.0), 3, wh) == []
    assert plan.advance((10.0, 4.0), 4, wh) == []
    assert plan.visited == {1}
    events = plan.advance((10.0, 10.0), 6, wh)
    assert events == [(task, "done")]
    assert task.completion_step == 6
    assert plan.queue == []
    assert np.allclose(plan.park, (10.0, 10.0))


def test_commitment_fails_expired_tasks():
    wh = default_warehouse()
    task = FetchTask(1, "CP-2", "PICKUP", 3, 0)
    task.assign(1)
    plan = Commitment(1)
    plan.add(task, 0)
    events = plan.advance((2.0, 2.0), 4, wh)
    assert events == [(task, "failed")]
    assert task.status == TaskStatus.FAILED


def test_commitment_rejects_duplicates_and_foreign_tasks():
    task = FetchTask(1, "CP-2", "PICKUP", 3, 0)
    plan = Commitment(1)
    plan.add(task, 0)
    with pytest.raises(ConfigurationError):
        plan.add(task, 1)
    with pytest.raises(ConfigurationError):
        plan.validate(0)
    task.assign(1)
    plan.validate(0)
    copy = plan.copy()
    copy.queue.clear()
    assert plan.queue == [task]


def test_warehouse_regions_and_planning():
    wh = default_warehouse()
    assert wh.region("PICKUP").contains((10.0, 10.0))
    with pytest.raises(UnknownRegionError):
        wh.region("CP-9")
    assert wh.approach_point("CP-2", (2.0, 2.0)) == (9.25, 3.25)
    path = wh.plan((2.0, 2.0), (9.25, 3.25))
    assert path[0] == (2.0, 2.0) and path[-1] == (9.25, 3.25)
    assert len(path) > 2
    with pytest.raises(ConfigurationError):
        Warehouse.from_dict({"bounds": [0, 0, 5, 5], "regions": {"H-1": [4, 4, 6, 6]}})


def test_plan_fails_when_walled_in():
    wh = Warehouse.from_dict({
        "bounds": [0, 0, 10, 10],
        "regions": {"H-1": [0.5, 0.5, 1.5, 1.5]},
        "walls": [[3, 0, 4, 10]],
        "margin": 0.3,
    })
    with pytest.raises(PathConstructionError):
        wh.plan((1.0, 1.0), (8.0, 8.0))
