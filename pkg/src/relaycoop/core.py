"""Shared value types, the Shannon rate function and geometry helpers.

All rates are in bits per channel use (base-2 logarithms).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

DEFAULT_POWER = 20.0
DEFAULT_PATHLOSS_EXPONENT = 2.0


def shannon_c(x: float, P: float) -> float:
    """Return ``log2(1 + x P)``."""
    if not P > 0:
        raise ValueError(f"power P must be positive, got {P!r}")
    if not x >= 0:
        raise ValueError(f"rate argument x must be nonnegative, got {x!r}")
    return math.log1p(x * P) / math.log(2.0)


def gain_from_distance(d: float, exponent: float = DEFAULT_PATHLOSS_EXPONENT) -> float:
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d!r}")
    if not exponent > 0:
        raise ValueError(f"path-loss exponent must be positive, got {exponent!r}")
    return d ** (-exponent)


def distance_from_gain(g: float, exponent: float = DEFAULT_PATHLOSS_EXPONENT) -> float:
    if not g > 0:
        raise ValueError(f"gain must be positive, got {g!r}")
    return g ** (-1.0 / exponent)


@dataclass(frozen=True)
class NetworkConfig:
    """Network power budget and intra-cluster geometry.

    ``gain_g`` is the canonical geometry parameter; use :meth:`from_distance`
    to build a config from the distance between the cooperating nodes.
    """

    power_P: float = DEFAULT_POWER
    gain_g: float = 1.0
    pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT

    def __post_init__(self):
        if not (self.power_P > 0 and math.isfinite(self.power_P)):
            raise ValueError(f"power_P must be positive and finite, got {self.power_P!r}")
        if not (self.gain_g > 0 and math.isfinite(self.gain_g)):
            raise ValueError(f"gain_g must be positive and finite, got {self.gain_g!r}")
        if not self.pathloss_exponent > 0:
            raise ValueError(f"pathloss_exponent must be positive, got {self.pathloss_exponent!r}")

    @classmethod
    def from_distance(
        cls,
        d: float,
        power_P: float = DEFAULT_POWER,
        pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT,
    ) -> "NetworkConfig":
        return cls(power_P, gain_from_distance(d, pathloss_exponent), pathloss_exponent)

    @property
    def distance(self) -> float:
        return distance_from_gain(self.gain_g, self.pathloss_exponent)

    def c(self, x: float) -> float:
        """Shannon rate ``log2(1 + x P)`` at this config's power."""
        return shannon_c(x, self.power_P)

    def with_gain(self, g: float) -> "NetworkConfig":
        return NetworkConfig(self.power_P, g, self.pathloss_exponent)


class SplitMode(enum.Enum):
    EQUAL = "equal"
    OPTIMIZE = "optimize"
    FIXED = "fixed"


@dataclass(frozen=True)
class PowerSplit:
    """How the network power is divided: source gets ``alpha P``, relay ``(1-alpha) P``."""

    mode: SplitMode = SplitMode.EQUAL
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.mode is SplitMode.FIXED:
            if self.alpha is None or not 0.0 <= self.alpha <= 1.0:
                raise ValueError(f"Fixed split needs 0 <= alpha <= 1, got {self.alpha!r}")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only meaningful for a fixed split, got {self.alpha!r}")

    @classmethod
    def equal(cls) -> "PowerSplit":
        return cls(SplitMode.EQUAL)

    @classmethod
    def optimize(cls) -> "PowerSplit":
        return cls(SplitMode.OPTIMIZE)

    @classmethod
    def fixed(cls, alpha: float) -> "PowerSplit":
        return cls(SplitMode.FIXED, float(alpha))

    @property
    def is_optimized(self) -> bool:
        return self.mode is SplitMode.OPTIMIZE

    def fixed_alpha(self) -> float:
        """The alpha used when no optimization is requested."""
        if self.mode is SplitMode.OPTIMIZE:
            raise ValueError("an optimized split has no fixed alpha")
        return 0.5 if self.mode is SplitMode.EQUAL else float(self.alpha)


class Branch(enum.Enum):
    """Which term of a two-term ``min`` is active at the optimum.

    The broadcast cut is the source-side term (first term of every min in
    the cut-set and DF expressions); the multiple-access cut is the
    destination-side term.
    """

    MULTIPLE_ACCESS_CUT = "multiple_access_cut"
    BROADCAST_CUT = "broadcast_cut"
    BALANCED = "balanced"


# Two min-terms closer than this (in bits) are reported as balanced.
BALANCE_TOL = 1e-8


def classify_branch(term1: float, term2: float, tol: float = BALANCE_TOL) -> Branch:
    if abs(term1 - term2) <= tol:
        return Branch.BALANCED
    return Branch.BROADCAST_CUT if term1 < term2 else Branch.MULTIPLE_ACCESS_CUT


@dataclass(frozen=True)
class RateResult:
    """A rate (or bound) with the optimizing parameters.

    ``rho_star`` is None where no correlation parameter applies (CF rates,
    fading expressions). ``branch`` is None for single-expression rates.
    ``alpha_interval`` is set when every alpha in a closed interval is
    optimal; ``alpha_star`` then holds its lower endpoint.
    """

    rate: float
    alpha_star: float
    rho_star: Optional[float] = None
    branch: Optional[Branch] = None
    alpha_interval: Optional[Tuple[float, float]] = None
    terms: Optional[Tuple[float, float]] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate!r}")

    def to_dict(self) -> dict:
        out = {
            "rate": self.rate,
            "alpha_star": self.alpha_star,
            "rho_star": self.rho_star,
            "branch": None if self.branch is None else self.branch.value,
        }
        if self.alpha_interval is not None:
            out["alpha_interval"] = list(self.alpha_interval)
        if self.terms is not None:
            out["terms"] = list(self.terms)
        return out
