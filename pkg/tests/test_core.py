import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaycoop.core import (
    Branch,
    NetworkConfig,
    PowerSplit,
    RateResult,
    classify_branch,
    distance_from_gain,
    gain_from_distance,
    shannon_c,
)

from oracle_values import C1, C1_5


def test_shannon_values():
    assert shannon_c(0.0, 20) == 0.0
    assert shannon_c(1.0, 20) == pytest.approx(C1, abs=1e-12)
    assert shannon_c(1.5, 20) == pytest.approx(C1_5, abs=1e-12)


@pytest.mark.parametrize("x,P", [(-0.1, 20), (1.0, 0.0), (1.0, -1.0), (math.nan, 20)])
def test_shannon_domain(x, P):
    with pytest.raises(ValueError):
        shannon_c(x, P)


def test_shannon_high_snr_slope():
    P = 1e9
    for x in (0.3, 1.0, 7.0):
        assert abs(shannon_c(x, P) - math.log2(x * P)) < 1e-6


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_shannon_monotone(x, y):
    lo, hi = sorted((x, y))
    assert shannon_c(lo, 20) <= shannon_c(hi, 20)


def test_gain_distance():
    assert gain_from_distance(1.0) == 1.0
    assert gain_from_distance(0.70710678) == pytest.approx(2.0, abs=1e-8)
    assert gain_from_distance(0.1) == pytest.approx(100.0, rel=1e-14)
    assert distance_from_gain(4.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        gain_from_distance(0.0)
    with pytest.raises(ValueError):
        gain_from_distance(1.0, exponent=0.0)


@given(st.floats(1e-3, 1e3))
def test_gain_distance_roundtrip(d):
    assert distance_from_gain(gain_from_distance(d)) == pytest.approx(d, rel=1e-12)


def test_network_config():
    cfg = NetworkConfig.from_distance(0.5)
    assert cfg.gain_g == 4.0 and cfg.power_P == 20.0
    assert cfg.distance == pytest.approx(0.5)
    assert cfg.c(1.0) == pytest.approx(C1)
    assert cfg.with_gain(9.0).gain_g == 9.0
    for bad in ({"power_P": 0.0}, {"gain_g": 0.0}, {"gain_g": math.inf}, {"pathloss_exponent": -2}):
        with pytest.raises(ValueError):
            NetworkConfig(**bad)


def test_power_split():
    assert PowerSplit.equal().fixed_alpha() == 0.5
    assert PowerSplit.fixed(0.3).fixed_alpha() == 0.3
    assert PowerSplit.optimize().is_optimized
    with pytest.raises(ValueError):
        PowerSplit.optimize().fixed_alpha()
    with pytest.raises(ValueError):
        PowerSplit.fixed(1.2)


def test_branch_classification():
    assert classify_branch(1.0, 1.0 + 1e-10) is Branch.BALANCED
    assert classify_branch(1.0, 2.0) is Branch.BROADCAST_CUT
    assert classify_branch(2.0, 1.0) is Branch.MULTIPLE_ACCESS_CUT


def test_rate_result():
    r = RateResult(1.5, 0.5, 0.2, Branch.BALANCED, terms=(1.5, 1.5))
    d = r.to_dict()
    assert d["branch"] == "balanced" and d["terms"] == [1.5, 1.5]
    assert r == RateResult(1.5, 0.5, 0.2, Branch.BALANCED)
    with pytest.raises(ValueError):
        RateResult(-0.1, 0.5)
