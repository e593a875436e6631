import math

import numpy as np
import pytest

from environment.geometry import Rect
from environment.pathfinder import VisibilityGraph
from environment.paths import PolylinePath
from environment.steering import FollowPath


def test_open_space_path_is_straight():
    graph = VisibilityGraph([], margin=0.5)
    assert graph.find_path((0, 0), (3, 4)) == [(0.0, 0.0), (3.0, 4.0)]
    assert graph.path_length((0, 0), (3, 4)) == pytest.approx(5.0)


def test_path_goes_around_inflated_wall():
    graph = VisibilityGraph([Rect(4.0, -1.0, 6.0, 1.0)], margin=0.5)
    path = graph.find_path((0.0, 0.0), (10.0, 0.0))
    assert len(path) == 4
    assert path[0] == (0.0, 0.0) and path[-1] == (10.0, 0.0)
    assert {abs(p[1]) for p in path[1:3]} == {1.5}
    assert graph.path_length((0.0, 0.0), (10.0, 0.0)) == pytest.approx(2 * math.sqrt(14.5) + 3.0)


def test_edges_may_run_along_a_border():
    wall = Rect(0.0, 0.0, 2.0, 2.0)
    assert not wall.blocks_segment((0.0, 0.0), (2.0, 0.0))
    assert wall.blocks_segment((-1.0, 1.0), (3.0, 1.0))
    assert not wall.blocks_segment((-1.0, 3.0), (3.0, 3.0))


def test_goal_inside_wall_ignores_that_wall():
    graph = VisibilityGraph([Rect(4.0, -1.0, 6.0, 1.0)], margin=0.0)
    assert graph.find_path((0.0, 0.0), (5.0, 0.0)) == [(0.0, 0.0), (5.0, 0.0)]


def test_polyline_parametrisation():
    path = PolylinePath([(0, 0), (4, 0), (4, 3)])
    assert path.length == pytest.approx(7.0)
    assert path.get_position(5.0) == pytest.approx((4.0, 1.0))
    assert path.get_position(99.0) == pytest.approx((4.0, 3.0))
    assert path.get_param((2.0, 0.5)) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        PolylinePath([(0, 0)])


def test_follow_path_reaches_end_without_overspeed():
    path = PolylinePath([(0, 0), (4, 0), (4, 3)])
    follower = FollowPath(path, max_speed=1.0, dt=0.5)
    pos = np.array([0.0, 0.0])
    for _ in range(20):
        v = follower.velocity(pos)
        assert np.linalg.norm(v) <= 1.0 + 1e-12
        pos = pos + 0.5 * v
    assert follower.finished(pos, tol=1e-6)
