import math

import numpy as np
import pytest

from cbf.barrier import build_barrier, build_barriers, smooth_min
from logic.parser import parse
from utils.errors import UnsupportedTaskError


def test_eventually_barrier_decays_to_the_predicate():
    task = parse("F[0,10] (norm(x1 - 3, x2) <= 1)")
    barrier = build_barrier(task, (0.0, 0.0), 0.0)
    # mu0 = -2 -> delta0 = 1, gamma0 = -3
    assert barrier.delta0 == pytest.approx(1.0)
    assert barrier.gamma0 == pytest.approx(-3.0)
    assert barrier.value((0.0, 0.0), 0.0) == pytest.approx(1.0)
    assert barrier.gamma(5.0) == pytest.approx(-1.5)
    assert barrier.gamma(10.0) == 0.0
    assert barrier.value((3.5, 0.0), 10.0) == pytest.approx(0.5)
    assert barrier.value((3.5, 0.0), 12.0) == pytest.approx(0.5)
    assert barrier.t_star == 10.0
    assert barrier.window == (0.0, 10.0)


def test_time_derivative_and_secant():
    barrier = build_barrier(parse("F[0,10] (norm(x1 - 3, x2) <= 1)"), (0.0, 0.0))
    assert barrier.time_derivative(5.0) == pytest.approx(-0.3)
    assert barrier.time_derivative(9.5, 1.0) == pytest.approx(-0.15)
    assert barrier.time_derivative(11.0) == 0.0


def test_always_barrier_with_margin():
    barrier = build_barrier(parse("G[2,5] (x1 + 2 >= 0)"), (0.0, 0.0), 0.0)
    assert barrier.operator == "G"
    assert barrier.t_star == 2.0
    assert barrier.gamma(0.0) == pytest.approx(1.0)
    assert barrier.value((0.0, 0.0), 0.0) == pytest.approx(1.0)
    assert barrier.value((0.0, 0.0), 2.0) == pytest.approx(2.0)
    assert barrier.active(5.0)
    assert not barrier.active(5.5)


def test_boundary_predicate_gives_zero_barrier():
    barrier = build_barrier(parse("G[0,4] (x1 >= 0)"), (0.0, 1.0))
    assert barrier.delta0 == 0.0
    for t in (0.0, 2.0, 4.0):
        assert barrier.value((0.0, 1.0), t) == 0.0


def test_margin_is_capped():
    barrier = build_barrier(parse("F[0,8] (x1 - 10 >= 0)"), (0.0,))
    assert barrier.delta0 == 1.0
    assert barrier.value((0.0,), 0.0) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "text",
    [
        "F (x1 >= 0)",
        "x1 >= 0",
        "F[0,5] (norm(x1) >= 1)",
        "F[0,5] p",
        "F[0,5] (x1 >= 0 & x2 >= 0)",
    ],
)
def test_unsupported_tasks(text):
    with pytest.raises(UnsupportedTaskError):
        build_barrier(parse(text), (0.0, 0.0))


def test_invalid_parameters():
    task = parse("F[0,5] (x1 >= 0)")
    with pytest.raises(UnsupportedTaskError):
        build_barrier(task, (0.0,), lam=0.0)
    with pytest.raises(UnsupportedTaskError):
        build_barrier(task, (0.0,), nu=-0.1)


def test_conjunctions_split_into_one_barrier_each():
    barriers = build_barriers(parse("F[0,5] (x1 >= 1) & G[0,5] (x2 + 1 >= 0)"), (0.0, 0.0), kind="independent")
    assert [b.operator for b in barriers] == ["F", "G"]
    assert all(b.kind == "independent" for b in barriers)


def test_gradient_of_norm_predicate():
    barrier = build_barrier(parse("F[0,5] (norm(x1 - 3, x2) <= 1)"), (0.0, 0.0))
    assert barrier.gradient((0.0, 0.0)) == pytest.approx([1.0, 0.0])


def test_smooth_min_is_a_lower_bound_with_normalised_weights():
    rng = np.random.default_rng(3)
    for _ in range(20):
        values = rng.normal(size=int(rng.integers(2, 6)))
        value, weights = smooth_min(values, 10.0)
        assert value <= values.min() + 1e-12
        assert value >= values.min() - math.log(values.size) / 10.0 - 1e-12
        assert weights.sum() == pytest.approx(1.0)
        assert int(np.argmax(weights)) == int(np.argmin(values))


def test_smooth_min_single_value_is_exact():
    value, weights = smooth_min([0.7])
    assert value == 0.7
    assert weights.tolist() == [1.0]
