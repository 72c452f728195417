import math

import pytest

from relaycoop import rayleigh as ry
from relaycoop.cluster_bounds import (
    ClusterFading,
    ClusterSide,
    ClusterSpec,
    cluster_upper_bound,
    gain_gap_vs_noncoop,
    gamma_sum_capacity,
    gamma_sum_capacity_mc,
    rayleigh_gap_limit,
)
from relaycoop.core import NetworkConfig

import oracle_values as ov

CFG = NetworkConfig(20.0, 1.0)
PHASE, RAY = ClusterFading.QUASI_STATIC_PHASE, ClusterFading.FAST_RAYLEIGH


def test_spec_validation():
    with pytest.raises(ValueError):
        ClusterSpec(1)
    with pytest.raises(ValueError):
        ClusterSpec(2.5)


@pytest.mark.parametrize("m", [2, 8, 1000])
@pytest.mark.parametrize("side", list(ClusterSide))
def test_phase_bound_is_siso(m, side):
    spec = ClusterSpec(m, side, PHASE)
    assert cluster_upper_bound(spec, CFG) == pytest.approx(ov.C1, abs=1e-12)
    assert gain_gap_vs_noncoop(spec, CFG) == 0.0


def test_two_nodes_match_pair():
    v = cluster_upper_bound(ClusterSpec(2, ClusterSide.RECEIVER, RAY), CFG)
    assert v == pytest.approx(ov.PAIR_HALF_HALF, abs=1e-10)


def test_quadrature_matches_mc():
    for m in (3, 16):
        est = gamma_sum_capacity_mc(m, 20.0, ry.McConfig(n=400_000, seed=1))
        assert abs(est.mean - gamma_sum_capacity(m, 20.0)) < 3 * est.stderr


def test_large_cluster_approaches_c1():
    assert abs(cluster_upper_bound(ClusterSpec(64, ClusterSide.RECEIVER, RAY), CFG) - ov.C1) < 0.05
    assert cluster_upper_bound(ClusterSpec(64, ClusterSide.RECEIVER, RAY), CFG, ry.McConfig(n=10**6)) == pytest.approx(
        cluster_upper_bound(ClusterSpec(64, ClusterSide.RECEIVER, RAY), CFG), abs=2e-3
    )


def test_gap_grows_but_stays_below_limit():
    limit = rayleigh_gap_limit(CFG)
    assert limit == pytest.approx(ov.C1 - ov.CNBAR_EXACT, abs=1e-12)
    gaps = [gain_gap_vs_noncoop(ClusterSpec(m, ClusterSide.TRANSMITTER, RAY), CFG) for m in (2, 4, 16, 256)]
    assert all(b > a for a, b in zip(gaps, gaps[1:]))
    assert all(0 < x < limit for x in gaps)


def test_sides_share_the_same_law():
    for m in (2, 5):
        tx = cluster_upper_bound(ClusterSpec(m, ClusterSide.TRANSMITTER, RAY), CFG)
        rx = cluster_upper_bound(ClusterSpec(m, ClusterSide.RECEIVER, RAY), CFG)
        assert tx == rx
