"""Capacity bounds and achievable rates for cooperative relay clusters."""

from .core import (
    Branch,
    NetworkConfig,
    PowerSplit,
    RateResult,
    SplitMode,
    distance_from_gain,
    gain_from_distance,
    shannon_c,
)
from .phase_fading import CaseId, PhaseFadingRates, case_rates, evaluator_rates, table2_ordering
from .rayleigh import FadingMode, McConfig, McEstimate, cf_fading_rate, optimize_cf_alpha
from .cluster_bounds import ClusterFading, ClusterSide, ClusterSpec, cluster_upper_bound
from .report import Scenario, SweepSpec, VerificationReport, run_sweep, verify_all

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CaseId",
    "ClusterFading",
    "ClusterSide",
    "ClusterSpec",
    "FadingMode",
    "McConfig",
    "McEstimate",
    "NetworkConfig",
    "PhaseFadingRates",
    "PowerSplit",
    "RateResult",
    "Scenario",
    "SplitMode",
    "SweepSpec",
    "VerificationReport",
    "case_rates",
    "cf_fading_rate",
    "cluster_upper_bound",
    "distance_from_gain",
    "evaluator_rates",
    "gain_from_distance",
    "optimize_cf_alpha",
    "run_sweep",
    "shannon_c",
    "table2_ordering",
    "verify_all",
]
