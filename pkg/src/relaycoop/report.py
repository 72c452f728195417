"""Distance sweeps for the rate-vs-distance figures and the self-verification suite."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import phase_fading as pf
from . import rayleigh as ry
from .cluster_bounds import ClusterFading, ClusterSide, ClusterSpec, gain_gap_vs_noncoop
from .core import NetworkConfig, PowerSplit, gain_from_distance
from .scalar_opt import solve_balance


class Scenario(enum.Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"
    RAYLEIGH_EQUAL = "rayleigh-equal"
    RAYLEIGH_OPTIMAL = "rayleigh-optimal"

    @property
    def case_number(self) -> Optional[int]:
        return {"case1": 1, "case2": 2, "case3": 3, "case4": 4}.get(self.value)


class Spacing(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


SCENARIO_COLUMNS: Dict[Scenario, Tuple[str, ...]] = {
    Scenario.CASE1: ("ct", "rt", "cr", "rr", "rprime", "cn"),
    Scenario.CASE2: ("ct", "rt", "cr", "rr", "cn"),
    Scenario.CASE3: ("ct", "rt", "cr", "rr", "rprime", "cn"),
    Scenario.CASE4: ("ct", "rt", "cr", "rr", "cn"),
    Scenario.RAYLEIGH_EQUAL: ("ct", "rt", "cr", "rr", "rr_stderr", "cn"),
    Scenario.RAYLEIGH_OPTIMAL: ("ct", "rt", "cr", "rr", "rr_stderr", "rr_alpha", "cn"),
}


@dataclass(frozen=True)
class SweepSpec:
    """A distance sweep for one figure scenario.

    The default grid (131 linear points on [0.2, 1.5]) is a choice, not a
    value taken from the figures. Rayleigh scenarios evaluate their bound
    columns in ``fading_mode`` and their CF column by Monte Carlo with the
    same seed on every row.
    """

    scenario: Scenario = Scenario.CASE1
    d_min: float = 0.2
    d_max: float = 1.5
    points: int = 131
    spacing: Spacing = Spacing.LINEAR
    power_P: float = 20.0
    mc_seed: int = 0
    mc_n: int = 100_000
    fading_mode: ry.FadingMode = ry.FadingMode.HISNR
    alpha_step: float = 0.01

    def __post_init__(self):
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")

    def distances(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.d_min, self.d_max, self.points)
        return np.linspace(self.d_min, self.d_max, self.points)

    @property
    def columns(self) -> Tuple[str, ...]:
        return ("d", "g") + SCENARIO_COLUMNS[self.scenario]


SweepRow = Dict[str, Optional[float]]


def _phase_row(case: int, cfg: NetworkConfig) -> SweepRow:
    rates = pf.case_rates(case, cfg)
    row = {
        "ct": rates.ct.rate,
        "rt": rates.rt.rate,
        "cr": rates.cr.rate,
        "rr": rates.rr.rate,
        "cn": rates.cn,
    }
    if case in (1, 3):
        row["rprime"] = None if rates.rprime is None else rates.rprime.rate
    return row


def _rayleigh_row(spec: SweepSpec, cfg: NetworkConfig) -> SweepRow:
    mode = spec.fading_mode
    mc = ry.McConfig(n=spec.mc_n, seed=spec.mc_seed)
    if spec.scenario is Scenario.RAYLEIGH_EQUAL:
        split = PowerSplit.equal()
        est = ry.cf_fading_rate(0.5, cfg, mc)
        extra = {}
    else:
        split = PowerSplit.optimize()
        alpha, est = ry.optimize_cf_alpha(cfg, mc, spec.alpha_step)
        extra = {"rr_alpha": alpha}
    row = {
        "ct": ry.fading_tx_cutset(split, cfg, mode).rate,
        "rt": ry.fading_df_rate(split, cfg, mode).rate,
        "cr": ry.fading_rx_cutset(split, cfg, mode).rate,
        "rr": est.mean,
        "rr_stderr": est.stderr,
        "cn": ry.noncoop_ergodic(cfg, mode),
    }
    row.update(extra)
    return row


def sweep_row(spec: SweepSpec, d: float) -> SweepRow:
    """One sweep row; cells that fall outside a formula's domain are None."""
    g = gain_from_distance(d)
    cfg = NetworkConfig(spec.power_P, g)
    row: SweepRow = {"d": float(d), "g": g}
    case = spec.scenario.case_number
    try:
        cells = _phase_row(case, cfg) if case else _rayleigh_row(spec, cfg)
    except (ValueError, ry.BalanceError):
        cells = {}
    for col in SCENARIO_COLUMNS[spec.scenario]:
        row[col] = cells.get(col)
    return row


def _row_task(args):
    spec, d = args
    return sweep_row(spec, d)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> List[SweepRow]:
    """Rows in increasing distance. Output does not depend on ``jobs``."""
    ds = [float(d) for d in spec.distances()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row_task, [(spec, d) for d in ds]))
    return [sweep_row(spec, d) for d in ds]


def format_cell(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.9g}"


def rows_to_csv(rows: Sequence[SweepRow], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


# --- verification suite ---------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_deviation: float
    location: str = ""
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "worst_deviation": self.worst_deviation,
            "location": self.location,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps(
            {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}, indent=2
        )


@dataclass(frozen=True)
class VerifyRanges:
    """Parameter ranges covered by :func:`verify_all`."""

    closed_form_g: Tuple[float, ...] = tuple(np.geomspace(0.1, 1e4, 50))
    closed_form_P: Tuple[float, ...] = (1.0, 20.0, 1000.0)
    ordering_samples: int = 200
    ordering_g_max: float = 1e4
    ordering_seed: int = 2024
    shift_g: Tuple[float, ...] = tuple(np.linspace(1.0, 100.0, 101)[1:])
    hisnr_g: Tuple[float, ...] = (1.5, math.e, 4.0, 100.0)
    hisnr_alpha: Tuple[float, ...] = (0.3, 0.5, 0.7)
    mc_n: Tuple[int, ...] = (1_000, 10_000, 100_000)
    mc_seed: int = 7
    cluster_m: Tuple[int, ...] = (2, 3, 4, 8, 16, 32, 64, 128, 256, 1024)

    @classmethod
    def quick(cls) -> "VerifyRanges":
        return cls(
            closed_form_g=tuple(np.geomspace(0.1, 1e4, 12)),
            ordering_samples=40,
            shift_g=tuple(np.linspace(1.0, 100.0, 21)[1:]),
            mc_n=(1_000, 10_000),
            cluster_m=(2, 4, 16, 64),
        )


def _check(name, deviations, tol, where, detail="") -> CheckResult:
    """Pass when every deviation is within ``tol``; reports the worst one."""
    if not deviations:
        return CheckResult(name, True, 0.0, "", detail)
    i = int(np.argmax(deviations))
    worst = float(deviations[i])
    return CheckResult(name, worst <= tol, worst, where[i], detail)


def check_closed_forms(r: VerifyRanges) -> CheckResult:
    devs, where = [], []
    for P in r.closed_form_P:
        for g in r.closed_form_g:
            cfg = NetworkConfig(P, float(g))
            for case in (1, 2, 3, 4):
                closed, numeric = pf.case_rates(case, cfg), pf.evaluator_rates(case, cfg)
                for q in ("ct", "rt", "cr", "rr"):
                    devs.append(abs(getattr(closed, q).rate - getattr(numeric, q).rate))
                    where.append(f"case {case} {q} g={g:.6g} P={P:g}")
                if closed.rprime is not None:
                    devs.append(abs(closed.rprime.rate - numeric.rprime.rate))
                    where.append(f"case {case} rprime g={g:.6g} P={P:g}")
    return _check("closed_form_vs_evaluator", devs, 1e-6, where, "bits; tol 1e-6")


def ordering_gains(r: VerifyRanges) -> np.ndarray:
    rng = np.random.default_rng(r.ordering_seed)
    u = rng.uniform(0.0, 1.0, r.ordering_samples - 1)
    gs = 2.0 * np.exp(u * math.log(r.ordering_g_max / 2.0))
    gs = np.where(gs > 2.0, gs, 2.0 + 1e-9)
    return np.sort(np.append(gs, 2.001))


def check_ordering(r: VerifyRanges, P: float = 20.0, overrides=None) -> CheckResult:
    worst, loc, count = 0.0, "", 0
    for g in ordering_gains(r):
        res = pf.table2_ordering(NetworkConfig(P, float(g)), overrides)
        for upper, lower, excess in res.violations:
            count += 1
            if excess > worst or not loc:
                worst, loc = excess, f"{upper} < {lower} at g={g:.6g}"
    return CheckResult(
        "table2_ordering", count == 0, worst, loc, f"{count} violations over {len(ordering_gains(r))} gains"
    )


def headline_spot_values(P: float = 20.0, g: float = 4.0) -> Dict[str, Tuple[float, float]]:
    """(library value, direct arithmetic) for the headline numbers at one point."""
    cfg = NetworkConfig(P, g)
    ar = lambda x: math.log2(1.0 + x * P)
    s = math.sqrt(g - 1.0)
    c1, c2 = pf.evaluator_rates(1, cfg), pf.evaluator_rates(2, cfg)
    return {
        "Ct1": (c1.ct.rate, ar(2 * (g + 1) / (g + 2))),
        "Cr1": (c1.cr.rate, ar(2 * (g + 1) / (g + 2))),
        "Rt1": (c1.rt.rate, ar(2 * g / (g + 1))),
        "Rt2": (c2.rt.rate, ar(2 * (g - 1) / g)),
        "R'r": (pf.cf_upper_bound_rprime(cfg).rate, ar(2 * g * (s - 1) * (g - 1 - s) / (s * (g - 2) ** 2))),
        "Rr2": (c2.rr.rate, ar(g / (2 * (g + 2 + 2 / P)) + 0.5)),
        "Cn": (c1.cn, ar(1.0)),
    }


def check_spot_values() -> CheckResult:
    vals = headline_spot_values()
    return _check(
        "spot_values",
        [abs(a - b) for a, b in vals.values()],
        1e-6,
        [f"{k} at g=4, P=20" for k in vals],
    )


def check_shift_identity(r: VerifyRanges, P: float = 20.0) -> CheckResult:
    devs, where = [], []
    opt = PowerSplit.optimize()
    for g in r.shift_g:
        rt = pf.df_rate(opt, NetworkConfig(P, float(g))).rate
        ct = pf.tx_cutset(opt, NetworkConfig(P, float(g) - 1.0)).rate
        devs.append(abs(rt - ct))
        where.append(f"g={g:.6g}")
    return _check("shift_identity", devs, 1e-9, where)


@dataclass(frozen=True)
class BranchBoundary:
    """A gain at which a closed form switches branch.

    ``upper`` and ``lower`` are the two quantities whose crossing in ``g``
    marks the switch (typically the two min-terms at the uncorrelated point).
    """

    name: str
    expected: float
    bracket: Tuple[float, float]
    upper: Callable[[float], float]
    lower: Callable[[float], float]


def branch_boundaries(P: float = 20.0) -> List[BranchBoundary]:
    c = lambda x: math.log1p(x * P) / math.log(2.0)

    def terms(args, alpha):
        return (lambda g: c(args(alpha, 0.0, g)[0]), lambda g: c(args(alpha, 0.0, g)[1]))

    df_full = terms(pf.df_args, 1.0)
    tx_half = terms(pf.tx_cutset_args, 0.5)
    rx_half = terms(pf.rx_cutset_args, 0.5)
    df_half = terms(pf.df_args, 0.5)

    def rprime_slope(g):
        # d/dalpha of the 1/P-free CF argument at alpha = 1
        return 1.0 - g / 2.0

    hisnr_df = lambda g: ry.hi_snr_df_term(0.5, g, P)
    hisnr_tx2 = lambda g: ry.hi_snr_tx_terms(0.5, 2.0, P)[1]

    return [
        BranchBoundary("g=1 Rt1/Rt3 (relay decoding vs direct link)", 1.0, (0.5, 1.5), *df_full),
        BranchBoundary("g=1 Ct2/Ct4 (equal-power tx cut-set)", 1.0, (0.5, 1.5), *tx_half),
        BranchBoundary("g=1 Cr2/Cr3/Cr4 (equal-power rx cut-set)", 1.0, (0.5, 1.5), *rx_half),
        BranchBoundary("g=2 R'r (CF bound optimum leaves alpha=1)", 2.0, (1.5, 2.5), rprime_slope, lambda g: 0.0),
        BranchBoundary("g=2 Rt2/Rt4 (equal-power DF)", 2.0, (1.5, 2.5), *df_half),
        BranchBoundary("g=e fading DF meets cut-set (high SNR)", math.e, (2.0, 3.5), hisnr_df, hisnr_tx2),
    ]


def locate_boundary(b: BranchBoundary, tol: float = 1e-13) -> Optional[float]:
    lo, hi = b.bracket
    d_lo = b.upper(lo) - b.lower(lo)
    d_hi = b.upper(hi) - b.lower(hi)
    if d_lo * d_hi > 0:
        return None
    return solve_balance(b.upper, b.lower, lo, hi, tol)


def check_thresholds(P: float = 20.0) -> CheckResult:
    devs, where, found = [], [], []
    for b in branch_boundaries(P):
        g = locate_boundary(b)
        devs.append(math.inf if g is None else abs(g - b.expected))
        where.append(b.name)
        found.append(f"{b.name}: {g!r}")
    return _check("threshold_detection", devs, 1e-6, where, "; ".join(found))


def hisnr_pairs() -> List[Tuple[str, Callable, Callable]]:
    """(label, exact(alpha, g, P), high-SNR(alpha, g, P)) for every closed form."""
    pair, single = ry.ergodic_c_pair, ry.ergodic_c_single
    return [
        ("tx term1 E[C(a(g y2 + y1))]", lambda a, g, P: pair(a * g, a, P), lambda a, g, P: ry.hi_snr_tx_terms(a, g, P)[0]),
        ("tx term2 E[C(a y1 + (1-a) y3)]", lambda a, g, P: pair(a, 1 - a, P), lambda a, g, P: ry.hi_snr_tx_terms(a, g, P)[1]),
        ("df term1 E[C(a g y2)]", lambda a, g, P: single(a * g, P), lambda a, g, P: float(ry.hi_snr_df_term(a, g, P))),
        ("rx term1 E[C(a(y2 + y1))]", lambda a, g, P: pair(a, a, P), lambda a, g, P: ry.hi_snr_rx_terms(a, g, P)[0]),
        ("rx term2 E[C(a y1 + (1-a) g y3)]", lambda a, g, P: pair(a, (1 - a) * g, P), lambda a, g, P: ry.hi_snr_rx_terms(a, g, P)[1]),
        ("noncoop E[C(y1)]", lambda a, g, P: single(1.0, P), lambda a, g, P: math.log2(P) - ry.EULER_GAMMA * ry.LOG2E),
    ]


def check_hisnr(r: VerifyRanges) -> List[CheckResult]:
    out = []
    for P, tol in ((1e6, 5e-3), (1e9, 5e-6)):
        devs, where = [], []
        for label, exact, approx in hisnr_pairs():
            for g in r.hisnr_g:
                for a in r.hisnr_alpha:
                    devs.append(abs(exact(a, g, P) - approx(a, g, P)))
                    where.append(f"{label} g={g:.6g} alpha={a} P={P:g}")
        out.append(_check(f"hisnr_convergence_P{P:.0e}", devs, tol, where))
    return out


def check_phase_invariants(r: VerifyRanges) -> List[CheckResult]:
    gs = [float(g) for g in r.closed_form_g]
    results = []
    dom, sym, nogain, c3, c2, rp = ([] for _ in range(6))
    for P in r.closed_form_P:
        for g in gs:
            cfg = NetworkConfig(P, g)
            rates = {k: pf.case_rates(k, cfg) for k in (1, 2, 3, 4)}
            for k, rt in rates.items():
                dom.append((max(rt.rt.rate - rt.ct.rate, rt.rr.rate - rt.cr.rate, 0.0), f"case {k} g={g:.6g} P={P:g}"))
            sym.append((max(abs(rates[1].ct.rate - rates[1].cr.rate), abs(rates[4].ct.rate - rates[4].cr.rate)), f"g={g:.6g} P={P:g}"))
            if g >= 1.0:
                r4 = rates[4]
                excess = max(r4.rt.rate, r4.rr.rate) - r4.cn
                eq_gap = abs(r4.rt.rate - r4.cn)
                ok_eq = (eq_gap <= 1e-12) == (g >= 2.0)
                nogain.append((max(excess, 0.0) + (0.0 if ok_eq else 1.0), f"g={g:.6g} P={P:g}"))
            c3.append((max(rates[3].ct.rate - rates[3].rr.rate, 0.0), f"g={g:.6g} P={P:g}"))
            if g > 2.0:
                c2.append((max(rates[2].cr.rate - rates[2].rt.rate, 0.0) if rates[2].rt.rate > rates[2].cr.rate else 1.0, f"g={g:.6g} P={P:g}"))
                rp.append((0.0 if rates[1].rprime.rate > rates[1].rr.rate else 1.0, f"g={g:.6g} P={P:g}"))
    for name, items, tol in (
        ("bound_dominance", dom, 1e-12),
        ("cutset_symmetry_case1_case4", sym, 1e-12),
        ("no_gain_case4", nogain, 1e-12),
        ("case3_rx_rate_beats_tx_cutset", c3, 1e-12),
        ("case2_tx_rate_beats_rx_cutset", c2, 0.0),
        ("rprime_strict_upper_bound", rp, 0.0),
    ):
        results.append(_check(name, [d for d, _ in items], tol, [w for _, w in items]))
    return results


def check_fading_invariants(P_values=(20.0, 1e6)) -> List[CheckResult]:
    hisnr = ry.FadingMode.HISNR
    eq, opt = PowerSplit.equal(), PowerSplit.optimize()
    thresh, half, same = [], [], []
    gs = [1.1, 1.5, 2.0, 2.5, 2.7, math.e, 2.8, 3.0, 4.0, 10.0, 100.0, 1e3]
    for P in P_values:
        for g in gs:
            cfg = NetworkConfig(P, g)
            ct = ry.fading_tx_cutset(eq, cfg, hisnr).rate
            rt = ry.fading_df_rate(eq, cfg, hisnr).rate
            # equality above e, strict gap below (the predicted gap is log2(e/g))
            predicted = 0.0 if g >= math.e else math.log2(math.e / g)
            thresh.append((abs((ct - rt) - predicted), f"g={g:.6g} P={P:g}"))
            half.append((abs(ry.fading_tx_cutset(opt, cfg, hisnr).rate - ct), f"g={g:.6g} P={P:g}"))
            same.append((abs(ry.fading_rx_cutset(eq, cfg, hisnr).rate - ct), f"g={g:.6g} P={P:g}"))
    return [
        _check("fading_df_capacity_threshold", [d for d, _ in thresh], 1e-9, [w for _, w in thresh]),
        _check("fading_equal_split_optimal", [d for d, _ in half], 1e-9, [w for _, w in half]),
        _check("fading_cutset_tx_equals_rx", [d for d, _ in same], 1e-9, [w for _, w in same]),
    ]


def check_mc(r: VerifyRanges, P: float = 20.0) -> List[CheckResult]:
    cfg = NetworkConfig(P, 4.0)
    exact = ry.noncoop_ergodic(cfg)
    zs, where, ses = [], [], []
    for n in r.mc_n:
        est = ry.cf_fading_rate(1.0, cfg, ry.McConfig(n=n, seed=r.mc_seed))
        zs.append(abs(est.mean - exact) / est.stderr)
        where.append(f"n={n}")
        ses.append(est.stderr)
    scale = [abs(ses[i] * math.sqrt(r.mc_n[i] / r.mc_n[0]) / ses[0] - 1.0) for i in range(len(ses))]
    return [
        _check("mc_cf_alpha1_matches_e1", zs, 3.0, where, "deviation in standard errors"),
        _check("mc_stderr_scaling", scale, 0.2, where, "relative departure from 1/sqrt(n)"),
    ]


def check_clusters(r: VerifyRanges, P: float = 20.0) -> List[CheckResult]:
    cfg = NetworkConfig(P, 1.0)
    phase, ray, mono = [], [], []
    prev = -math.inf
    for m in r.cluster_m:
        for side in ClusterSide:
            phase.append(abs(gain_gap_vs_noncoop(ClusterSpec(m, side, ClusterFading.QUASI_STATIC_PHASE), cfg)))
        gap = gain_gap_vs_noncoop(ClusterSpec(m, ClusterSide.RECEIVER, ClusterFading.FAST_RAYLEIGH), cfg)
        ray.append(max(gap - 0.649333, 0.0))
        mono.append(0.0 if gap > prev else prev - gap)
        prev = gap
    where = [f"M={m}" for m in r.cluster_m]
    return [
        _check("cluster_phase_gap_zero", phase, 0.0, [w for w in where for _ in ClusterSide]),
        _check("cluster_rayleigh_gap_bounded", ray, 0.0, where, "gap <= 0.649333 bits"),
        _check("cluster_rayleigh_gap_increasing", mono, 0.0, where),
    ]


def verify_all(
    ranges: VerifyRanges = VerifyRanges(),
    faults: Optional[Dict[str, pf.RowFn]] = None,
) -> VerificationReport:
    """Run every check; failures are recorded, never raised.

    ``faults`` overrides ordering rows (see :func:`phase_fading.table2_ordering`)
    to exercise the checker itself.
    """
    report = VerificationReport()
    steps: List[Callable[[], object]] = [
        lambda: check_closed_forms(ranges),
        lambda: check_ordering(ranges, overrides=faults),
        check_spot_values,
        lambda: check_shift_identity(ranges),
        check_thresholds,
        lambda: check_hisnr(ranges),
        lambda: check_phase_invariants(ranges),
        check_fading_invariants,
        lambda: check_mc(ranges),
        lambda: check_clusters(ranges),
    ]
    for i, step in enumerate(steps):
        try:
            res = step()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(f"step_{i}", False, math.inf, "", f"{type(exc).__name__}: {exc}")
        report.checks.extend(res if isinstance(res, list) else [res])
    return report
