"""Upper bounds for clusters of M cooperating single-antenna nodes.

A transmitter cluster without transmitter CSI is capped by an M-antenna
MISO channel; a receiver cluster with equal power per node by an M-antenna
SIMO channel with maximal-ratio combining. Under quasi-static phase fading
both caps equal ``C(1)``; under fast Rayleigh fading both are
``E[log2(1 + (P/M) sum_i gamma_i)]``, which climbs to ``C(1)`` as M grows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from .core import NetworkConfig
from .rayleigh import LOG2E, STREAM_CLUSTER, FadingMode, McConfig, McEstimate, mc_moments, noncoop_ergodic


class ClusterSide(enum.Enum):
    TRANSMITTER = "transmitter"
    RECEIVER = "receiver"


class ClusterFading(enum.Enum):
    QUASI_STATIC_PHASE = "phase"
    FAST_RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class ClusterSpec:
    m_nodes: int
    side: ClusterSide = ClusterSide.TRANSMITTER
    fading: ClusterFading = ClusterFading.QUASI_STATIC_PHASE

    def __post_init__(self):
        if int(self.m_nodes) != self.m_nodes or self.m_nodes < 2:
            raise ValueError(f"a cluster needs at least 2 nodes, got {self.m_nodes!r}")


def gamma_sum_capacity(m: int, P: float) -> float:
    """``E[log2(1 + (P/m) G)]`` with G ~ Gamma(m, 1), by adaptive quadrature."""
    c = P / m
    log_norm = -special.gammaln(m)

    def integrand(t):
        if t <= 0.0:
            return 0.0
        return math.log1p(c * t) * math.exp((m - 1) * math.log(t) - t + log_norm)

    # split at the mode so quad sees the bulk of the mass
    mode = max(m - 1.0, 1.0)
    spread = 12.0 * math.sqrt(m) + 40.0
    a = integrate.quad(integrand, 0.0, mode, limit=200, epsabs=0.0, epsrel=1e-13)[0]
    b = integrate.quad(integrand, mode, mode + spread, limit=200, epsabs=0.0, epsrel=1e-13)[0]
    tail = integrate.quad(integrand, mode + spread, np.inf, limit=200)[0]
    return LOG2E * (a + b + tail)


def gamma_sum_capacity_mc(m: int, P: float, mc: McConfig) -> McEstimate:
    """Monte Carlo version of :func:`gamma_sum_capacity` (sum of m exponentials)."""

    def fn(draws):
        return np.log1p((P / m) * draws.sum(axis=0)) * LOG2E

    mean, se = mc_moments(fn, m, mc, STREAM_CLUSTER)
    return McEstimate(float(mean), float(se), mc.n, mc.seed)


def cluster_upper_bound(spec: ClusterSpec, cfg: NetworkConfig, mc: Optional[McConfig] = None) -> float:
    """Capacity cap of an M-node transmitter or receiver cluster.

    Rayleigh values are computed by quadrature unless ``mc`` is given, in
    which case the Monte Carlo mean is returned.
    """
    if spec.fading is ClusterFading.QUASI_STATIC_PHASE:
        return cfg.c(1.0)
    # isotropic MISO without CSIT and equal-power SIMO with MRC share one law
    if mc is not None:
        return gamma_sum_capacity_mc(spec.m_nodes, cfg.power_P, mc).mean
    return gamma_sum_capacity(spec.m_nodes, cfg.power_P)


def gain_gap_vs_noncoop(spec: ClusterSpec, cfg: NetworkConfig, mc: Optional[McConfig] = None) -> float:
    """Cluster cap minus the single-link capacity under the same fading."""
    bound = cluster_upper_bound(spec, cfg, mc)
    if spec.fading is ClusterFading.QUASI_STATIC_PHASE:
        return bound - cfg.c(1.0)
    return bound - noncoop_ergodic(cfg, FadingMode.EXACT)


def rayleigh_gap_limit(cfg: NetworkConfig) -> float:
    """Large-M limit of the Rayleigh gap: ``C(1) - E[C(gamma)]``."""
    return cfg.c(1.0) - noncoop_ergodic(cfg, FadingMode.EXACT)
