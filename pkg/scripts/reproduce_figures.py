"""Write the six rate-vs-distance CSVs (four phase-fading cases, two Rayleigh scenarios)."""

import argparse
from pathlib import Path

from relaycoop.rayleigh import FadingMode
from relaycoop.report import Scenario, SweepSpec, rows_to_csv, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--points", type=int, default=131)
    ap.add_argument("--n", type=int, default=100_000, help="MC samples per Rayleigh CF cell")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=[m.value for m in FadingMode], default="hisnr")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for scenario in Scenario:
        spec = SweepSpec(scenario, points=args.points, mc_n=args.n, mc_seed=args.seed,
                         fading_mode=FadingMode(args.mode))
        path = out / f"{scenario.value}.csv"
        path.write_text(rows_to_csv(run_sweep(spec, jobs=args.jobs), spec.columns))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
