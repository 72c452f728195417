"""Command-line entry point: ``relaycoop {rates,sweep,verify,fading,cluster}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import phase_fading as pf
from . import rayleigh as ry
from .cluster_bounds import ClusterFading, ClusterSide, ClusterSpec, cluster_upper_bound, gain_gap_vs_noncoop
from .core import DEFAULT_POWER, NetworkConfig, PowerSplit
from .report import Scenario, Spacing, SweepSpec, VerifyRanges, rows_to_csv, run_sweep, verify_all

OUT_DIR_ENV = "RELAYCOOP_OUT_DIR"


def _out_path(name: Optional[str], default: str) -> Optional[Path]:
    """Resolve an output path; relative names go under $RELAYCOOP_OUT_DIR when set."""
    if name == "-":
        return None
    path = Path(name or default)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _add_link(p: argparse.ArgumentParser) -> None:
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--g", type=_positive_float, help="intra-cluster power gain")
    grp.add_argument("--d", type=_positive_float, help="intra-cluster distance (g = 1/d^2)")
    p.add_argument("--power", type=_positive_float, default=DEFAULT_POWER, help="network power P")


def _config(args) -> NetworkConfig:
    if args.d is not None:
        return NetworkConfig.from_distance(args.d, args.power)
    return NetworkConfig(args.power, args.g)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaycoop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="bounds and rates for one scenario, as JSON")
    p.add_argument("--case", type=int, choices=(1, 2, 3, 4), help="phase-fading CSI/power case")
    p.add_argument("--fading", choices=("equal", "optimal"), help="Rayleigh fading with this power split")
    p.add_argument("--mode", choices=[m.value for m in ry.FadingMode], default="exact")
    p.add_argument("--n", type=_positive_int, default=ry.McConfig.n, help="MC samples for the fading CF rate")
    p.add_argument("--seed", type=int, default=0)
    _add_link(p)

    p = sub.add_parser("sweep", help="write a rate-vs-distance CSV")
    p.add_argument("--scenario", choices=[s.value for s in Scenario], required=True)
    p.add_argument("--dmin", type=_positive_float, default=SweepSpec.d_min)
    p.add_argument("--dmax", type=_positive_float, default=SweepSpec.d_max)
    p.add_argument("--points", type=int, default=SweepSpec.points)
    p.add_argument("--spacing", choices=[s.value for s in Spacing], default="linear")
    p.add_argument("--power", type=_positive_float, default=DEFAULT_POWER)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=_positive_int, default=SweepSpec.mc_n)
    p.add_argument("--mode", choices=[m.value for m in ry.FadingMode], default="hisnr")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", help="CSV path, '-' for stdout (default <scenario>.csv)")

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--out", help="JSON report path, '-' for stdout (default verify.json)")
    p.add_argument("--quick", action="store_true", help="reduced parameter ranges")

    p = sub.add_parser("fading", help="Monte Carlo CF rate under Rayleigh fading")
    _add_link(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--alpha", type=float, help="fixed power split")
    grp.add_argument("--alpha-grid", type=_positive_float, help="optimize alpha over this grid step")
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--paper-fidelity", action="store_true", help="use 1000 realizations")

    p = sub.add_parser("cluster", help="M-node cluster upper bound")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--side", choices=[s.value for s in ClusterSide], default="transmitter")
    p.add_argument("--fading", choices=[f.value for f in ClusterFading], default="phase")
    p.add_argument("--power", type=_positive_float, default=DEFAULT_POWER)
    return parser


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _cmd_rates(args, parser) -> int:
    if (args.case is None) == (args.fading is None):
        parser.error("rates needs exactly one of --case or --fading")
    cfg = _config(args)
    out = {"g": cfg.gain_g, "power": cfg.power_P}
    if args.case is not None:
        out.update(pf.case_rates(args.case, cfg).to_dict())
    else:
        mode = ry.FadingMode(args.mode)
        mc = ry.McConfig(n=args.n, seed=args.seed)
        split = PowerSplit.equal() if args.fading == "equal" else PowerSplit.optimize()
        out["mode"] = mode.value
        out["ct"] = ry.fading_tx_cutset(split, cfg, mode).to_dict()
        out["rt"] = ry.fading_df_rate(split, cfg, mode).to_dict()
        out["cr"] = ry.fading_rx_cutset(split, cfg, mode).to_dict()
        if args.fading == "equal":
            out["rr"] = {"alpha_star": 0.5, **ry.cf_fading_rate(0.5, cfg, mc).to_dict()}
        else:
            alpha, est = ry.optimize_cf_alpha(cfg, mc)
            out["rr"] = {"alpha_star": alpha, **est.to_dict()}
        out["cn"] = ry.noncoop_ergodic(cfg, mode)
    _dump(out)
    return 0


def _cmd_sweep(args, parser) -> int:
    try:
        spec = SweepSpec(
            scenario=Scenario(args.scenario),
            d_min=args.dmin,
            d_max=args.dmax,
            points=args.points,
            spacing=Spacing(args.spacing),
            power_P=args.power,
            mc_seed=args.seed,
            mc_n=args.n,
            fading_mode=ry.FadingMode(args.mode),
        )
    except ValueError as exc:
        parser.error(str(exc))
    rows = run_sweep(spec, jobs=args.jobs)
    _emit(rows_to_csv(rows, spec.columns), _out_path(args.out, f"{spec.scenario.value}.csv"))
    return 0


def _cmd_verify(args, parser) -> int:
    report = verify_all(VerifyRanges.quick() if args.quick else VerifyRanges())
    _emit(report.to_json() + "\n", _out_path(args.out, "verify.json"))
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name} worst={c.worst_deviation:.3g} {c.location}", file=sys.stderr)
    return 0 if report.passed else 1


def _cmd_fading(args, parser) -> int:
    cfg = _config(args)
    if args.paper_fidelity and args.n is not None:
        parser.error("--paper-fidelity fixes n; drop --n")
    n = ry.McConfig.REFERENCE_N if args.paper_fidelity else (args.n or ry.McConfig.n)
    try:
        mc = ry.McConfig(n=n, seed=args.seed, workers=args.jobs)
    except ValueError as exc:
        parser.error(str(exc))
    out = {"g": cfg.gain_g, "power": cfg.power_P}
    try:
        if args.alpha is not None:
            out.update({"alpha": args.alpha, **ry.cf_fading_rate(args.alpha, cfg, mc).to_dict()})
        else:
            step = args.alpha_grid if args.alpha_grid is not None else 0.01
            alpha, est = ry.optimize_cf_alpha(cfg, mc, step)
            out.update({"alpha": alpha, "alpha_step": step, **est.to_dict()})
    except ValueError as exc:
        parser.error(str(exc))
    _dump(out)
    return 0


def _cmd_cluster(args, parser) -> int:
    try:
        spec = ClusterSpec(args.m, ClusterSide(args.side), ClusterFading(args.fading))
    except ValueError as exc:
        parser.error(str(exc))
    cfg = NetworkConfig(args.power, 1.0)
    _dump(
        {
            "m": spec.m_nodes,
            "side": spec.side.value,
            "fading": spec.fading.value,
            "power": cfg.power_P,
            "bound": cluster_upper_bound(spec, cfg),
            "gap_vs_noncoop": gain_gap_vs_noncoop(spec, cfg),
        }
    )
    return 0


_COMMANDS = {
    "rates": _cmd_rates,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "fading": _cmd_fading,
    "cluster": _cmd_cluster,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, parser)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code) if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
