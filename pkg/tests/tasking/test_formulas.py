import numpy as np
import pytest

from logic.formula import And, Always, Eventually, Or
from logic.stl import Trace, stl_robustness, stl_satisfies
from tasking.formulas import box_formula, queue_formula, remaining_formula, task_to_formula
from tasking.regions import default_warehouse
from tasking.tasks import FetchTask
from utils.errors import UnknownRegionError

WH = default_warehouse()


def _trace(points, t0):
    return Trace.uniform(np.asarray(points, dtype=float), 1.0, float(t0))


def test_home_task_is_a_single_eventually():
    home = FetchTask(6, None, "H-1", 10, 30)
    phi = task_to_formula(home, WH, keep_inside=False)
    assert phi == Eventually(box_formula(WH.region("H-1")), phi.interval)
    assert (phi.interval.a, phi.interval.b) == (0.0, 10.0)


def test_zero_deadline_home_task_is_met_at_issue():
    home = FetchTask(7, None, "H-1", 0, 30)
    phi = task_to_formula(home, WH)
    assert stl_satisfies(_trace([[2.0, 2.0]], 30), phi, 30.0)
    assert not stl_satisfies(_trace([[10.0, 10.0]], 30), phi, 30.0)


def test_fetch_formula_windows_sum_to_the_deadline():
    task = FetchTask(2, "CP-2", "PICKUP", 7, 1)
    phi = remaining_formula(task, WH, 1)
    branches = []
    node = phi
    while isinstance(node, Or):
        branches.append(node.right)
        node = node.left
    branches.append(node)
    assert len(branches) == 8
    for branch in branches:
        assert isinstance(branch, Eventually) and branch.interval.a == branch.interval.b
        inner = branch.child.right
        assert isinstance(inner, Eventually)
        assert branch.interval.b + inner.interval.b == 7.0


def test_fetch_formula_on_hand_traces():
    task = FetchTask(2, "CP-2", "PICKUP", 7, 1)
    phi = task_to_formula(task, WH)
    origin, dest, road = (10.0, 4.0), (10.0, 10.0), (10.0, 7.0)
    on_time = [origin, origin, road, road, road, road, road, dest]
    assert stl_satisfies(_trace(on_time, 1), phi, 1.0)
    assert stl_robustness(_trace(on_time, 1), phi, 1.0) > 0.0
    # llega en el paso 9, vence en el 8
    late = [origin] + [road] * 7 + [dest]
    assert not stl_satisfies(_trace(late, 1), phi, 1.0)
    # destino antes que origen
    reversed_order = [dest, road, road, road, road, road, road, origin]
    assert not stl_satisfies(_trace(reversed_order, 1), phi, 1.0)


def test_leaving_the_warehouse_breaks_the_task():
    task = FetchTask(2, "CP-2", "PICKUP", 7, 1)
    points = [(10.0, 4.0), (10.0, -1.0), (10.0, 7.0), (10.0, 10.0), (10.0, 10.0),
              (10.0, 10.0), (10.0, 10.0), (10.0, 10.0)]
    assert stl_satisfies(_trace(points, 1), task_to_formula(task, WH, keep_inside=False), 1.0)
    assert not stl_satisfies(_trace(points, 1), task_to_formula(task, WH), 1.0)


def test_visited_origin_and_expired_tasks():
    task = FetchTask(2, "CP-2", "PICKUP", 7, 1)
    assert isinstance(remaining_formula(task, WH, 4, origin_visited=True), Eventually)
    assert remaining_formula(task, WH, 9).to_text() == "false"


def test_queue_formula_covers_the_last_deadline():
    a = FetchTask(1, "CP-1", "PICKUP", 10, 1)
    b = FetchTask(2, None, "H-1", 12, 3)
    phi, horizon = queue_formula([(a, False), (b, False)], WH, 2)
    assert horizon == 13
    assert isinstance(phi, And)
    assert isinstance(phi.right, Always) and phi.right.interval.b == 13.0


def test_unknown_region():
    with pytest.raises(UnknownRegionError):
        task_to_formula(FetchTask(1, "CP-7", "PICKUP", 5, 0), WH)
