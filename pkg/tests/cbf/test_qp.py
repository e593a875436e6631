import numpy as np
import pytest

from cbf.qp import solve_min_norm

BOX = ([-3.0, -3.0], [3.0, 3.0])


def test_inactive_constraints_leave_the_origin():
    result = solve_min_norm([((1.0, 0.0), -1.0), ((0.0, 1.0), -2.0)], *BOX)
    assert result.feasible
    assert np.allclose(result.u, 0.0)
    assert result.active == ()
    assert result.max_violation == 0.0


def test_single_active_constraint_projects_the_origin():
    result = solve_min_norm([((1.0, 0.0), 2.0)], *BOX)
    assert result.feasible
    assert result.u == pytest.approx([2.0, 0.0])
    assert result.active == ("c0",)


def test_two_active_constraints_meet_at_the_corner():
    result = solve_min_norm([((1.0, 0.0), 1.0), ((0.0, 1.0), 1.0)], *BOX)
    assert result.u == pytest.approx([1.0, 1.0])
    assert set(result.active) == {"c0", "c1"}


def test_box_face_becomes_active():
    # a . u >= 4 con a = (1, 1) y caja [-1, 1] x [-3, 3]: u1 satura en 1
    result = solve_min_norm([((1.0, 1.0), 4.0)], [-1.0, -3.0], [1.0, 3.0])
    assert result.feasible
    assert result.u == pytest.approx([1.0, 3.0])


def test_box_too_small_reports_the_deficit():
    result = solve_min_norm([((1.0, 0.0), 5.0)], *BOX)
    assert not result.feasible
    assert result.violations == pytest.approx((2.0,))
    assert result.u == pytest.approx([3.0, 0.0])


def test_jointly_infeasible_constraints_still_report_violation():
    # cada una es alcanzable en la caja, las dos a la vez no
    result = solve_min_norm([((1.0, 0.0), 1.0), ((-1.0, 0.0), 1.0)], *BOX)
    assert not result.feasible
    assert result.max_violation > 0.0
    assert np.all(np.abs(result.u) <= 3.0)


def test_matches_grid_search_on_random_instances():
    rng = np.random.default_rng(7)
    h = 0.02
    axis = np.linspace(-2.0, 2.0, 201)
    gx, gy = np.meshgrid(axis, axis)
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    norms = np.linalg.norm(grid, axis=1)
    checked = 0
    for _ in range(40):
        m = int(rng.integers(1, 3))
        constraints = [(rng.normal(size=2), float(rng.uniform(-1.0, 2.0))) for _ in range(m)]
        result = solve_min_norm(constraints, [-2.0, -2.0], [2.0, 2.0])
        A = np.array([a for a, _ in constraints])
        beta = np.array([b for _, b in constraints])
        slack = grid @ A.T - beta
        strict = np.all(slack >= 0.0, axis=1)
        if not result.feasible:
            assert not strict.any()
            continue
        checked += 1
        assert np.all(A @ result.u - beta >= -1e-7)
        best = float(np.linalg.norm(result.u))
        if strict.any():
            assert best <= norms[strict].min() + 1e-6
        # el punto de rejilla mas cercano al optimo cumple las restricciones relajadas
        relaxed = np.all(slack >= -np.linalg.norm(A, axis=1) * h, axis=1)
        assert norms[relaxed].min() <= best + h
    assert checked > 10
