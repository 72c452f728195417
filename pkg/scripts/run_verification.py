"""Run the full verification suite and print one line per check."""

import argparse
import sys
from pathlib import Path

from relaycoop.report import VerifyRanges, verify_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/verify.json")
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    report = verify_all(VerifyRanges.quick() if args.quick else VerifyRanges())
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json() + "\n")
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:40s} worst={c.worst_deviation:.3g}  {c.location}")
    print(f"report written to {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
