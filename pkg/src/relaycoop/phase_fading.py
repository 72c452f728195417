"""Bounds and rates under quasi-static phase fading.

General evaluators maximize the two-term cut-set / decode-and-forward
expressions over the signal correlation ``rho`` (and over the power split
``alpha`` when asked to). Closed forms for the four CSI/power cases sit
alongside them; the two routes are checked against each other in the test
suite and by :func:`relaycoop.report.verify_all`.

Transmitter cooperation: the relay is next to the source (gain ``g`` on the
source-relay link). Receiver cooperation: the relay is next to the
destination (gain ``g`` on the relay-destination link).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .core import Branch, NetworkConfig, PowerSplit, RateResult, classify_branch
from .scalar_opt import grid_then_refine, solve_balance

LN2 = math.log(2.0)
RHO_TOL = 1e-13

SplitLike = Union[float, PowerSplit]


def _c(x, P):
    return np.log1p(np.multiply(x, P)) / LN2


def _as_split(split: SplitLike) -> PowerSplit:
    if isinstance(split, PowerSplit):
        return split
    alpha = float(split)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    return PowerSplit.fixed(alpha)


# --- min-term arguments, vectorized over (alpha, rho) -------------------------


def tx_cutset_args(alpha, rho, g):
    coh = 2.0 * rho * np.sqrt(alpha * (1.0 - alpha))
    return alpha * (g + 1.0) * (1.0 - rho**2), 1.0 + coh


def df_args(alpha, rho, g):
    coh = 2.0 * rho * np.sqrt(alpha * (1.0 - alpha))
    return alpha * g * (1.0 - rho**2), 1.0 + coh


def rx_cutset_args(alpha, rho, g):
    coh = 2.0 * rho * np.sqrt(alpha * (1.0 - alpha) * g)
    return 2.0 * alpha * (1.0 - rho**2), alpha + (1.0 - alpha) * g + coh


def cf_arg(alpha, g, P):
    alpha = np.asarray(alpha, dtype=float)
    return alpha * (1.0 - alpha) * g / ((1.0 - alpha) * g + 2.0 * alpha + 1.0 / P) + alpha


def rprime_arg(alpha, g):
    """CF argument with the ``1/P`` noise term dropped."""
    alpha = np.asarray(alpha, dtype=float)
    return alpha * (1.0 - alpha) * g / ((1.0 - alpha) * g + 2.0 * alpha) + alpha


ArgsFn = Callable[[np.ndarray, np.ndarray, float], Tuple[np.ndarray, np.ndarray]]


def _best_rho(args: ArgsFn, alpha, g: float, use_rho: bool):
    """Per-alpha optimal rho; returns (rho, arg1, arg2).

    The first argument decreases in rho and the second increases, so the
    optimum is their crossing, or rho = 0 when the first already binds.
    """
    if np.ndim(alpha) == 0:
        alpha, lo, hi = float(alpha), 0.0, 1.0
    else:
        alpha = np.asarray(alpha, dtype=float)
        lo, hi = np.zeros_like(alpha), np.ones_like(alpha)
    if use_rho:
        rho = solve_balance(
            lambda r: args(alpha, r, g)[0],
            lambda r: args(alpha, r, g)[1],
            lo,
            hi,
            RHO_TOL,
        )
    else:
        rho = 0.0 * lo
    a1, a2 = args(alpha, rho, g)
    return rho, a1, a2


def _evaluate(args: ArgsFn, split: SplitLike, cfg: NetworkConfig, use_rho: bool) -> RateResult:
    split = _as_split(split)
    g, P = cfg.gain_g, cfg.power_P

    def value(alpha):
        _, a1, a2 = _best_rho(args, alpha, g, use_rho)
        return _c(np.minimum(a1, a2), P)

    if split.is_optimized:
        alpha = grid_then_refine(value, 0.0, 1.0).argmax
    else:
        alpha = split.fixed_alpha()
    rho, a1, a2 = _best_rho(args, alpha, g, use_rho)
    t1, t2 = float(_c(a1, P)), float(_c(a2, P))
    return RateResult(
        rate=min(t1, t2),
        alpha_star=alpha,
        rho_star=float(rho),
        branch=classify_branch(t1, t2),
        terms=(t1, t2),
    )


def tx_cutset(split: SplitLike, cfg: NetworkConfig, use_rho: bool = True) -> RateResult:
    """Transmitter-cooperation cut-set bound, maximized over ``rho`` in [0, 1].

    ``use_rho=False`` pins ``rho = 0`` (no transmitter CSI).
    """
    return _evaluate(tx_cutset_args, split, cfg, use_rho)


def df_rate(split: SplitLike, cfg: NetworkConfig, use_rho: bool = True) -> RateResult:
    """Decode-and-forward transmitter-cooperation rate."""
    return _evaluate(df_args, split, cfg, use_rho)


def rx_cutset(split: SplitLike, cfg: NetworkConfig, use_rho: bool = True) -> RateResult:
    """Receiver-cooperation cut-set bound."""
    return _evaluate(rx_cutset_args, split, cfg, use_rho)


def cf_rate(split: SplitLike, cfg: NetworkConfig) -> RateResult:
    """Compress-and-forward receiver-cooperation rate (no ``rho``: needs no CSIT)."""
    split = _as_split(split)
    g, P = cfg.gain_g, cfg.power_P
    if split.is_optimized:
        res = grid_then_refine(lambda a: _c(cf_arg(a, g, P), P), 0.0, 1.0)
        alpha = res.argmax
    else:
        alpha = split.fixed_alpha()
    return RateResult(rate=float(_c(cf_arg(alpha, g, P), P)), alpha_star=alpha)


def rprime_alpha(g: float) -> float:
    s = math.sqrt(g - 1.0)
    return g * (g - 1.0 - s) / (g * g - 3.0 * g + 2.0)


def cf_upper_bound_rprime(cfg: NetworkConfig) -> RateResult:
    """Closed-form upper bound on the alpha-optimized CF rate, valid for g > 2."""
    g = cfg.gain_g
    if not g > 2.0:
        raise ValueError(f"the closed-form CF upper bound requires g > 2, got g={g!r}")
    s = math.sqrt(g - 1.0)
    arg = 2.0 * g * (s - 1.0) * (g - 1.0 - s) / (s * (g - 2.0) ** 2)
    return RateResult(rate=cfg.c(arg), alpha_star=rprime_alpha(g))


def rprime_numeric(cfg: NetworkConfig) -> RateResult:
    """Numerical maximum of the CF argument with ``1/P`` dropped (any g)."""
    g, P = cfg.gain_g, cfg.power_P
    res = grid_then_refine(lambda a: _c(rprime_arg(a, g), P), 0.0, 1.0)
    return RateResult(rate=res.value, alpha_star=res.argmax)


# --- the four operating cases -------------------------------------------------


class Csi(enum.Enum):
    FULL = "full"
    CSIR_ONLY = "csir"


class Allocation(enum.Enum):
    OPTIMAL = "optimal"
    EQUAL = "equal"


@dataclass(frozen=True)
class CaseId:
    csi: Csi
    power: Allocation

    @classmethod
    def from_number(cls, n: int) -> "CaseId":
        try:
            return _CASES[int(n)]
        except KeyError:
            raise ValueError(f"case must be 1, 2, 3 or 4, got {n!r}") from None

    @property
    def number(self) -> int:
        return next(k for k, v in _CASES.items() if v == self)

    @property
    def full_csi(self) -> bool:
        return self.csi is Csi.FULL

    @property
    def optimal_power(self) -> bool:
        return self.power is Allocation.OPTIMAL


_CASES = {
    1: CaseId(Csi.FULL, Allocation.OPTIMAL),
    2: CaseId(Csi.FULL, Allocation.EQUAL),
    3: CaseId(Csi.CSIR_ONLY, Allocation.OPTIMAL),
    4: CaseId(Csi.CSIR_ONLY, Allocation.EQUAL),
}


@dataclass(frozen=True)
class PhaseFadingRates:
    ct: RateResult
    rt: RateResult
    cr: RateResult
    rr: RateResult
    cn: float
    rprime: Optional[RateResult] = None

    def __post_init__(self):
        if self.rt.rate > self.ct.rate + 1e-12 or self.rr.rate > self.cr.rate + 1e-12:
            raise ValueError("an achievable rate exceeds its cut-set bound")

    def to_dict(self) -> dict:
        out = {k: getattr(self, k).to_dict() for k in ("ct", "rt", "cr", "rr")}
        out["cn"] = self.cn
        out["rprime"] = None if self.rprime is None else self.rprime.to_dict()
        return out


def _branch_at(args: ArgsFn, cfg: NetworkConfig, alpha: float, rho: float) -> Branch:
    a1, a2 = args(alpha, rho, cfg.gain_g)
    return classify_branch(cfg.c(float(a1)), cfg.c(float(a2)))


def _ct_closed(case: CaseId, cfg: NetworkConfig) -> RateResult:
    g, c = cfg.gain_g, cfg.c
    if case.number == 1:
        alpha, rho = (g + 4.0) / (2.0 * g + 4.0), math.sqrt(g / (g + 4.0))
        arg = 2.0 * (g + 1.0) / (g + 2.0)
        interval = None
    elif case.number == 2:
        alpha = 0.5
        if g >= 1.0:
            arg, rho = 2.0 * g / (g + 1.0), (g - 1.0) / (g + 1.0)
        else:
            arg, rho = (1.0 + g) / 2.0, 0.0
        interval = None
    elif case.number == 3:
        arg, rho = 1.0, 0.0
        interval = (1.0 / (g + 1.0), 1.0)
        alpha = interval[0]
    else:
        alpha, rho = 0.5, 0.0
        arg = 1.0 if g >= 1.0 else (1.0 + g) / 2.0
        interval = None
    return RateResult(
        rate=c(arg),
        alpha_star=alpha,
        rho_star=rho,
        branch=_branch_at(tx_cutset_args, cfg, alpha, rho),
        alpha_interval=interval,
    )


def _rt_closed(case: CaseId, cfg: NetworkConfig) -> RateResult:
    g, c = cfg.gain_g, cfg.c
    interval = None
    if case.number == 1:
        if g >= 1.0:
            arg = 2.0 * g / (g + 1.0)
            rho, alpha = math.sqrt((g - 1.0) / (g + 3.0)), (g + 3.0) / (2.0 * g + 2.0)
        else:
            arg, rho, alpha = g, 0.0, 1.0
    elif case.number == 2:
        alpha = 0.5
        if g >= 2.0:
            arg, rho = 2.0 * (g - 1.0) / g, (g - 2.0) / g
        else:
            arg, rho = g / 2.0, 0.0
    elif case.number == 3:
        rho = 0.0
        if g >= 1.0:
            arg, interval = 1.0, (1.0 / g, 1.0)
            alpha = interval[0]
        else:
            arg, alpha = g, 1.0
    else:
        alpha, rho = 0.5, 0.0
        arg = 1.0 if g >= 2.0 else g / 2.0
    return RateResult(
        rate=c(arg),
        alpha_star=alpha,
        rho_star=rho,
        branch=_branch_at(df_args, cfg, alpha, rho),
        alpha_interval=interval,
    )


def _cr_closed(case: CaseId, cfg: NetworkConfig) -> RateResult:
    g, c = cfg.gain_g, cfg.c
    interval = None
    if case.number == 1:
        q = g * g + 2.0 * g + 2.0
        rho, alpha = 1.0 / math.sqrt(q), q / (g * g + 3.0 * g + 2.0)
        arg = 2.0 * (g + 1.0) / (g + 2.0)
    elif case.number == 2:
        alpha = 0.5
        if g >= 1.0:
            arg, rho = 1.0, 0.0
        else:
            arg = (1.0 + math.sqrt(g * (2.0 - g))) / 2.0
            rho = (math.sqrt(2.0 - g) - math.sqrt(g)) / 2.0
    elif case.number == 3:
        rho = 0.0
        if g > 1.0:
            arg, alpha = 2.0 * g / (g + 1.0), g / (g + 1.0)
        elif g == 1.0:
            arg, interval = 1.0, (0.5, 1.0)
            alpha = interval[0]
        else:
            arg, alpha = 1.0, 1.0
    else:
        alpha, rho = 0.5, 0.0
        arg = 1.0 if g >= 1.0 else (1.0 + g) / 2.0
    return RateResult(
        rate=c(arg),
        alpha_star=alpha,
        rho_star=rho,
        branch=_branch_at(rx_cutset_args, cfg, alpha, rho),
        alpha_interval=interval,
    )


def rr_equal_closed(cfg: NetworkConfig) -> RateResult:
    """CF rate at equal power, in closed form."""
    g, P = cfg.gain_g, cfg.power_P
    return RateResult(rate=cfg.c(g / (2.0 * (g + 2.0 + 2.0 / P)) + 0.5), alpha_star=0.5)


def _rr(case: CaseId, cfg: NetworkConfig) -> RateResult:
    # the alpha-optimized CF rate has no closed form
    if case.optimal_power:
        return cf_rate(PowerSplit.optimize(), cfg)
    return rr_equal_closed(cfg)


def noncoop_capacity(cfg: NetworkConfig) -> float:
    return cfg.c(1.0)


def case_rates(case: Union[CaseId, int], cfg: NetworkConfig) -> PhaseFadingRates:
    """All four bounds/rates of one case from the closed forms."""
    if not isinstance(case, CaseId):
        case = CaseId.from_number(case)
    rprime = None
    if case.optimal_power and cfg.gain_g > 2.0:
        rprime = cf_upper_bound_rprime(cfg)
    return PhaseFadingRates(
        ct=_ct_closed(case, cfg),
        rt=_rt_closed(case, cfg),
        cr=_cr_closed(case, cfg),
        rr=_rr(case, cfg),
        cn=noncoop_capacity(cfg),
        rprime=rprime,
    )


def evaluator_rates(case: Union[CaseId, int], cfg: NetworkConfig) -> PhaseFadingRates:
    """All four bounds/rates of one case from the general evaluators."""
    if not isinstance(case, CaseId):
        case = CaseId.from_number(case)
    split = PowerSplit.optimize() if case.optimal_power else PowerSplit.equal()
    use_rho = case.full_csi
    rprime = rprime_numeric(cfg) if case.optimal_power else None
    return PhaseFadingRates(
        ct=tx_cutset(split, cfg, use_rho),
        rt=df_rate(split, cfg, use_rho),
        cr=rx_cutset(split, cfg, use_rho),
        rr=cf_rate(split, cfg),
        cn=noncoop_capacity(cfg),
        rprime=rprime,
    )


# --- rate ordering for closely spaced cooperating nodes --------------------

TABLE2_LABELS = (
    "Ct1,Cr1",
    "Rt1,Ct2,Cr3",
    "Rt2",
    "R'r",
    "Rr1,Rr3",
    "Cn,Cr2,Ct3,Rt3,Ct4,Rt4,Cr4",
    "Rr2,Rr4",
)

RowFn = Callable[[NetworkConfig], float]


def table2_row_functions() -> Dict[str, RowFn]:
    """One function per ordering row, each evaluating that row's formula."""
    return {
        "Ct1,Cr1": lambda cfg: cfg.c(2.0 * (cfg.gain_g + 1.0) / (cfg.gain_g + 2.0)),
        "Rt1,Ct2,Cr3": lambda cfg: cfg.c(2.0 * cfg.gain_g / (cfg.gain_g + 1.0)),
        "Rt2": lambda cfg: cfg.c(2.0 * (cfg.gain_g - 1.0) / cfg.gain_g),
        "R'r": lambda cfg: cf_upper_bound_rprime(cfg).rate,
        "Rr1,Rr3": lambda cfg: cf_rate(PowerSplit.optimize(), cfg).rate,
        "Cn,Cr2,Ct3,Rt3,Ct4,Rt4,Cr4": lambda cfg: cfg.c(1.0),
        "Rr2,Rr4": lambda cfg: rr_equal_closed(cfg).rate,
    }


@dataclass(frozen=True)
class Ordering:
    rows: List[Tuple[str, float]]
    non_increasing: bool
    violations: List[Tuple[str, str, float]]


def table2_ordering(
    cfg: NetworkConfig, overrides: Optional[Dict[str, RowFn]] = None
) -> Ordering:
    """Evaluate the seven ordered rows and check they never increase.

    ``overrides`` replaces individual row formulas (used for fault-injection
    self-tests of the checker).
    """
    if not cfg.gain_g > 2.0:
        raise ValueError(f"the rate ordering is stated for g > 2, got g={cfg.gain_g!r}")
    fns = table2_row_functions()
    if overrides:
        unknown = set(overrides) - set(fns)
        if unknown:
            raise KeyError(f"unknown ordering rows: {sorted(unknown)}")
        fns.update(overrides)
    rows = [(label, float(fns[label](cfg))) for label in TABLE2_LABELS]
    violations = [
        (upper[0], lower[0], lower[1] - upper[1])
        for upper, lower in zip(rows, rows[1:])
        if lower[1] > upper[1]
    ]
    return Ordering(rows, not violations, violations)
