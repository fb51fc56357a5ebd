#!/usr/bin/env python3
"""Desk-scale benchmark protocol: both obstacle configurations on the two
desk mesh levels plus a finer reference level for convergence plots.

Writes results/desk-<kind>/ and results/reference-<kind>/.  Afterwards the
plot frontend can render fronts, fields, bundle sizes and reference
distances directly from these directories.

Expect tens of minutes at the defaults; the large initial controls at the
reference level dominate.
"""

import argparse
import sys

from nsmop.cli import ExperimentConfig, run_experiment

U0 = tuple(float(v) for v in range(1, 9))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output root")
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--reference-h", type=float, default=0.1)
    args = parser.parse_args()

    ok = True
    for kind in ("constant", "piecewise"):
        for tag, hmax in (("desk", (0.4, 0.2)), ("reference", (args.reference_h,))):
            out = f"{args.out}/{tag}-{kind}"
            print(f"== obstacle:{kind} h_max={hmax} -> {out}")
            summary = run_experiment(ExperimentConfig(
                problem=f"obstacle:{kind}", h_max=hmax, u0=U0,
                out_dir=out, jobs=args.jobs))
            for run in summary["runs"]:
                print(f"  {run['run_id']}: {run['status']} ({run['iters']} iters)")
            ok = ok and summary["all_completed"]
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
