import numpy as np
import pytest

from core.builder import build_from_spec, resolve_component
from core.gates import EventGate, PeriodicGate
from logic.formula import Formula
from utils.errors import ConfigurationError


def _spec(components=None, knowledge=None):
    return {
        "world": {"bounds": [-5, -5, 5, 5], "dt": 0.1, "obstacles": [[2, 2, 3, 3]]},
        "channel": {"drop_probability": 0.0},
        "agents": [
            {
                "id": 1,
                "entity": {"pose": [0.0, 0.0], "radius": 0.1,
                           "model": {"kind": "single-integrator", "dim": 2,
                                     "input_low": [-1, -1], "input_high": [1, 1]}},
                "knowledge": knowledge or {"goal": [1.0, -1.0]},
                "components": components or [{"type": "perception"}, {"type": "goal-controller"}],
            },
            {"id": 2, "require_controller": False, "components": [{"type": "message-receiver"}]},
        ],
    }


def test_builds_runnable_coordinator():
    coord = build_from_spec(_spec(), seed=4)
    assert [a.id for a in coord.agents] == [1, 2]
    assert coord.agents[1].entity_id is None
    assert len(coord.world.obstacles) == 1
    coord.initialize()
    coord.run_sync(100)
    np.testing.assert_allclose(coord.world.entity(1).pose, [1.0, -1.0], atol=1e-3)


def test_knowledge_strings_become_formulas():
    coord = build_from_spec(_spec(knowledge={"goal": [0, 0], "task:self": "F[0,5] (x1 >= 1)"}))
    assert isinstance(coord.agents[0].knowledge.get("task:self"), Formula)


def test_bad_formula_reports_path():
    with pytest.raises(ConfigurationError) as err:
        build_from_spec(_spec(knowledge={"goal": [0, 0], "task:self": "F[0,5] (x1 >="}))
    assert err.value.path == "agents.0.knowledge.task:self"


def test_unknown_component_is_a_configuration_error():
    with pytest.raises(ConfigurationError) as err:
        build_from_spec(_spec(components=[{"type": "teleporter"}]))
    assert err.value.path == "agents.0.components.0.type"


def test_unknown_parameter_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        resolve_component({"type": "perception", "params": {"range": 3.0}})


def test_gates_resolved():
    assert isinstance(resolve_component({"type": "message-receiver", "gate": "event"}).gate, EventGate)
    comp = resolve_component({"type": "perception", "gate": {"period": 0.5}})
    assert isinstance(comp.gate, PeriodicGate) and comp.gate.period == 0.5


def test_tasking_params_converted():
    comp = resolve_component({
        "type": "task-dispatcher",
        "params": {"schedule": [{"step": 1, "origin": "A", "destination": "B", "deadline": 5}],
                   "robots": {"1": "A"}, "home_call": {"step": 9, "deadline": 3}},
    })
    assert comp.schedule[0].deadline == 5
    assert comp.robots == {1: "A"}
    assert comp.home_call.step == 9
