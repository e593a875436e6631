import math

import numpy as np
import pytest

from environment.entity import Box, Disc, Entity
from environment.geometry import Rect, wrap_angle
from environment.models import SingleIntegratorModel, UnicycleModel, build_model, step_unicycle
from environment.world import World2D
from utils.errors import ConfigurationError, UnknownEntityError


def _world(**kwargs) -> World2D:
    return World2D(Rect(-5.0, -5.0, 5.0, 5.0), 0.5, **kwargs)


def test_unicycle_euler_step():
    s = step_unicycle((1.0, 2.0, math.pi / 2), 2.0, 0.4, 0.5)
    np.testing.assert_allclose(s, [1.0, 3.0, math.pi / 2 + 0.2], atol=1e-12)


def test_inputs_are_clamped_and_counted():
    model = SingleIntegratorModel(2, [-1.0, -1.0], [1.0, 1.0])
    world = _world()
    world.add_entity(Entity(1, (0.0, 0.0), model))
    world.step({1: (4.0, -0.5)})
    np.testing.assert_allclose(world.entity(1).pose, [0.5, -0.25])
    assert model.clamp_count == 1
    world.step({1: (0.2, 0.2)})
    assert model.clamp_count == 1


def test_missing_input_means_zero():
    world = _world()
    world.add_entity(Entity(1, (1.0, 1.0, 0.3), UnicycleModel()))
    world.step()
    np.testing.assert_allclose(world.entity(1).pose, [1.0, 1.0, 0.3])
    assert world.step_count == 1
    assert world.time == pytest.approx(0.5)


def test_speed_limit_saturates_after_noise():
    model = SingleIntegratorModel(2, [-10.0, -10.0], [10.0, 10.0], speed_limit=1.0)
    world = _world()
    world.add_entity(Entity(1, (0.0, 0.0), model))
    world.step({1: (3.0, 4.0)})
    np.testing.assert_allclose(world.entity(1).pose, [0.3, 0.4])


def test_noise_is_seeded_per_entity():
    def poses(seed):
        world = _world(seed=seed)
        for k in (1, 2):
            world.add_entity(Entity(k, (0.0, 0.0), SingleIntegratorModel(2, noise_scale=0.3)))
        for _ in range(5):
            world.step({1: (0.1, 0.0), 2: (0.1, 0.0)})
        return world.entity(1).pose.copy(), world.entity(2).pose.copy()

    a1, a2 = poses(4)
    b1, b2 = poses(4)
    np.testing.assert_array_equal(a1, b1)
    np.testing.assert_array_equal(a2, b2)
    assert not np.allclose(a1, a2)


def test_zero_noise_draws_nothing():
    model = SingleIntegratorModel(2, noise_scale=0.0)
    rng = np.random.default_rng(0)
    state = rng.bit_generator.state
    model.step(np.zeros(2), (0.5, 0.5), 1.0, rng)
    assert rng.bit_generator.state == state


def test_boundary_and_collision_reports():
    world = _world(obstacles=[Rect(2.0, -1.0, 3.0, 1.0)])
    world.add_entity(Entity(1, (4.9, 4.9), SingleIntegratorModel(2, [-2, -2], [2, 2])))
    world.add_entity(Entity(2, (0.0, 0.0), SingleIntegratorModel(2), Disc(0.3)))
    world.add_entity(Entity(3, (0.5, 0.0), SingleIntegratorModel(2), Disc(0.3)))
    world.add_entity(Entity(4, (1.6, 0.0), SingleIntegratorModel(2), Disc(0.5)))
    world.add_entity(Entity(5, (-3.0, -3.0), None, Box(1.0, 1.0)))
    report = world.step({1: (2.0, 0.0)})
    assert report.boundary_violations == [1]
    assert (2, "entity:3") in report.collisions
    assert (4, "obstacle:0") in report.collisions
    assert not report.clean


def test_contact_with_static_box_is_reported():
    world = _world()
    world.add_entity(Entity(1, (-2.0, -3.0), SingleIntegratorModel(2), Disc(0.2)))
    world.add_entity(Entity(5, (-3.0, -3.0), None, Box(1.0, 1.0)))
    report = world.step({1: (-1.0, 0.0)})
    assert report.collisions == [(1, "entity:5")]


def test_input_for_unknown_or_static_entity_raises():
    world = _world()
    world.add_entity(Entity(5, (0.0, 0.0), None))
    with pytest.raises(UnknownEntityError):
        world.step({7: (0.0, 0.0)})
    with pytest.raises(UnknownEntityError):
        world.step({5: (0.0, 0.0)})
    with pytest.raises(UnknownEntityError):
        world.entity(42)


def test_perception_range_is_closed_ball():
    world = _world()
    world.add_entity(Entity(1, (0.0, 0.0), SingleIntegratorModel(2)))
    world.add_entity(Entity(2, (3.0, 0.0), SingleIntegratorModel(2)))
    world.add_entity(Entity(3, (0.0, 4.0), None))
    assert [p.id for p in world.perceive(1)] == [2, 3]
    assert [p.id for p in world.perceive(1, range_limit=3.0)] == [2]
    assert world.perceive(1, range_limit=2.9) == []


def test_configuration_errors():
    with pytest.raises(ConfigurationError):
        World2D(Rect(0, 0, 1, 1), 0.0)
    with pytest.raises(ConfigurationError):
        Entity(1, (0.0, 0.0), UnicycleModel())
    with pytest.raises(ConfigurationError):
        build_model("hovercraft")
    world = _world()
    world.add_entity(Entity(1, (0.0, 0.0)))
    with pytest.raises(ConfigurationError):
        world.add_entity(Entity(1, (1.0, 0.0)))


def test_snapshot_is_independent():
    world = _world()
    world.add_entity(Entity(1, (0.0, 0.0), SingleIntegratorModel(2)))
    snap = world.snapshot()
    world.step({1: (1.0, 0.0)})
    np.testing.assert_allclose(snap.entity(1).pose, [0.0, 0.0])


def test_wrap_angle_range():
    assert wrap_angle(3 * math.pi) == pytest.approx(-math.pi)
    assert wrap_angle(-0.5) == pytest.approx(-0.5)
