import numpy as np
import pytest

from core.events import EventFilter, EventPhase
from utils.errors import SetupError


def test_run_before_initialize_raises(goal_world):
    coord = goal_world()
    with pytest.raises(SetupError):
        coord.run_sync(1)


def test_agents_converge_to_goals(goal_world):
    coord = goal_world()
    coord.initialize()
    coord.run_sync(200)
    np.testing.assert_allclose(coord.world.entity(1).pose, [4.0, 4.0], atol=1e-3)
    np.testing.assert_allclose(coord.world.entity(2).pose, [-3.0, 2.0], atol=1e-3)


def test_sync_runs_are_byte_identical(goal_world):
    dumps = []
    for _ in range(2):
        coord = goal_world(seed=11, noise=0.2)
        coord.initialize()
        coord.run_sync(30)
        dumps.append(coord.recorder.dumps(11, "abc"))
    assert dumps[0] == dumps[1]


def test_different_seeds_change_noisy_runs(goal_world):
    poses = []
    for seed in (1, 2):
        coord = goal_world(seed=seed, noise=0.2)
        coord.initialize()
        coord.run_sync(10)
        poses.append(coord.world.entity(1).pose.copy())
    assert not np.allclose(poses[0], poses[1])


def test_step_hooks_see_post_step_state(goal_world):
    coord = goal_world()
    coord.initialize()
    seen = []
    coord.add_step_hook(lambda step, time, report: seen.append((step, coord.world.step_count)))
    coord.run_sync(3)
    assert seen == [(0, 1), (1, 2), (2, 3)]


def test_stop_when_ends_early(goal_world):
    coord = goal_world()
    coord.initialize()
    trace = coord.run_sync(50, stop_when=lambda step: step == 4)
    assert trace.steps == 5


def test_agents_iterate_in_id_order_with_phase_ordering(goal_world):
    coord = goal_world()
    events = []
    coord.bus.subscribe(EventFilter.of(phases=[EventPhase.PRE_COMPUTE, EventPhase.POST_UPDATE]), events.append)
    coord.initialize()
    coord.run_sync(1)
    order = [(e.agent_id, e.component_name, e.phase) for e in events]
    assert [a for a, _, _ in order] == [1, 1, 1, 1, 2, 2, 2, 2]
    for k in range(0, len(order), 2):
        assert order[k][2] == EventPhase.PRE_COMPUTE and order[k + 1][2] == EventPhase.POST_UPDATE


def test_async_phase_ordering_per_component(goal_world):
    coord = goal_world()
    events = []
    coord.bus.subscribe(EventFilter(), events.append)
    coord.initialize()
    coord.run_async(0.3)
    allowed = {
        None: {EventPhase.PRE_COMPUTE},
        EventPhase.PRE_COMPUTE: {EventPhase.POST_COMPUTE, EventPhase.ERROR},
        EventPhase.ERROR: {EventPhase.PRE_COMPUTE},
        EventPhase.POST_COMPUTE: {EventPhase.PRE_UPDATE},
        EventPhase.PRE_UPDATE: {EventPhase.POST_UPDATE},
        EventPhase.POST_UPDATE: {EventPhase.PRE_COMPUTE},
    }
    last = {}
    for e in events:
        if e.phase in (EventPhase.PRE_INIT, EventPhase.POST_INIT):
            continue
        key = (e.agent_id, e.component_name)
        assert e.phase in allowed[last.get(key)]
        last[key] = e.phase
    assert last
