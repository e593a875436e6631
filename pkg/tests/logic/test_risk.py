import math

import pytest

from logic.parser import parse
from logic.risk import estimate_risk, hoeffding_half_width
from utils.errors import ConfigurationError


def _coin(p):
    def source(rng):
        return [{"ok"}] if rng.random() < p else [set()]
    return source


def test_hoeffding_half_width():
    assert hoeffding_half_width(200, 0.95) == pytest.approx(math.sqrt(math.log(40.0) / 400.0))
    with pytest.raises(ConfigurationError):
        hoeffding_half_width(10, 1.0)


def test_estimate_is_seed_deterministic():
    a = estimate_risk(_coin(0.6), parse("ok"), 300, seed=9)
    b = estimate_risk(_coin(0.6), parse("ok"), 300, seed=9)
    assert a == b
    assert a.risk == pytest.approx(1.0 - a.p_hat)


def test_estimate_close_to_truth():
    est = estimate_risk(_coin(0.7), parse("ok"), 2000, seed=1, confidence=0.95)
    assert abs(est.p_hat - 0.7) <= est.half_width
    lo, hi = est.interval
    assert lo <= 0.7 <= hi


def test_verdict_uses_lower_confidence_bound():
    always_ok = _coin(1.0)
    assert estimate_risk(always_ok, parse("ok"), 200, seed=0, epsilon=0.2).passes is True
    assert estimate_risk(always_ok, parse("ok"), 200, seed=0, epsilon=0.05).passes is False
    assert estimate_risk(always_ok, parse("ok"), 200, seed=0).passes is None


def test_invalid_sample_count():
    with pytest.raises(ConfigurationError):
        estimate_risk(_coin(0.5), parse("ok"), 0, seed=0)


@pytest.mark.slow
def test_estimate_calibration_many_samples():
    est = estimate_risk(_coin(0.3), parse("ok"), 20000, seed=4)
    assert abs(est.p_hat - 0.3) < 0.015
