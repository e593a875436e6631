import math

import numpy as np
import pytest

from logic.formula import AtomicProp, NormPredicate, Until
from logic.parser import parse
from logic.stl import Trace, stl_robustness, stl_robustness_series, stl_satisfies
from utils.errors import ConfigurationError, InsufficientTraceError, UnknownAtomError


def _ramp() -> Trace:
    return Trace.uniform([[0.0], [1.0], [2.0], [3.0]], dt=1.0)


def test_bounded_eventually_and_always():
    trace = _ramp()
    assert stl_robustness(trace, parse("F[0,2] (x1 - 1.5 >= 0)")) == pytest.approx(0.5)
    assert stl_robustness(trace, parse("G[0,3] (x1 >= 0)")) == pytest.approx(0.0)
    assert stl_robustness(trace, parse("G[1,3] (x1 - 0.5 >= 0)")) == pytest.approx(0.5)
    assert stl_robustness(trace, parse("!F[0,2] (x1 - 1.5 >= 0)")) == pytest.approx(-0.5)


def test_evaluation_time_selects_sample():
    trace = _ramp()
    assert stl_robustness(trace, parse("x1 - 1 >= 0"), 2.0) == pytest.approx(1.0)
    assert stl_robustness(trace, parse("F[0,1] (x1 - 3 >= 0)"), 2.0) == pytest.approx(0.0)


def test_horizon_beyond_trace_raises():
    with pytest.raises(InsufficientTraceError):
        stl_robustness(_ramp(), parse("F[0,2] (x1 >= 0)"), 2.0)
    with pytest.raises(InsufficientTraceError):
        stl_robustness(_ramp(), parse("x1 >= 0"), 3.5)
    with pytest.raises(InsufficientTraceError):
        stl_robustness(_ramp(), parse("X (x1 >= 0)"), 3.0)


def test_series_marks_unevaluable_samples():
    series = stl_robustness_series(_ramp(), parse("F[0,1] (x1 - 1 >= 0)"))
    np.testing.assert_allclose(series[:3], [0.0, 1.0, 2.0])
    assert math.isnan(series[3])


def test_norm_predicate_value():
    trace = Trace.uniform([[3.0, 4.0]], dt=1.0)
    assert stl_robustness(trace, NormPredicate.ball((0.0, 0.0), 6.0)) == pytest.approx(1.0)
    assert stl_robustness(trace, parse("norm(x1, x2) >= 2")) == pytest.approx(3.0)


def test_until_robustness():
    trace = Trace.uniform([[1.0, -1.0], [0.5, -0.2], [0.2, 0.7], [-1.0, 0.1]], dt=1.0)
    f = Until(parse("x1 >= 0"), parse("x2 >= 0"))
    # testigo en la muestra 2: min(0.7, min(1.0, 0.5)) = 0.5
    assert stl_robustness(trace, f) == pytest.approx(0.5)
    assert stl_satisfies(trace, f)


def test_atoms_need_labels():
    labelled = Trace.uniform([[0.0], [0.0]], labels=[{"p"}, set()])
    assert stl_robustness(labelled, AtomicProp("p")) == math.inf
    assert stl_robustness(labelled, parse("G p")) == -math.inf
    with pytest.raises(UnknownAtomError):
        stl_robustness(_ramp(), AtomicProp("p"))


def test_sign_of_robustness_matches_boolean_semantics():
    rng = np.random.default_rng(5)
    formulas = [
        parse("F[0,3] (x1 - 0.5 >= 0) & G[0,4] (x2 + 1 >= 0)"),
        parse("(x1 >= 0) U[0,5] (x2 - 0.8 >= 0)"),
        parse("G[0,2] F[0,3] (norm(x1, x2) <= 1)"),
    ]
    for _ in range(40):
        trace = Trace.uniform(rng.normal(size=(8, 2)), dt=1.0)
        for f in formulas:
            rho = stl_robustness(trace, f)
            if abs(rho) > 1e-12:
                assert (rho > 0) == stl_satisfies(trace, f)


def test_trace_validation():
    with pytest.raises(ConfigurationError):
        Trace([0.0, 0.0], [[1.0], [2.0]])
    with pytest.raises(ConfigurationError):
        Trace([], [])
    with pytest.raises(ConfigurationError):
        Trace([0.0, 1.0], [[1.0]])
