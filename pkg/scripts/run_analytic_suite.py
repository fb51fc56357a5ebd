#!/usr/bin/env python3
"""Run the analytic test problems from seeded random starts and summarize
terminal statuses and iteration counts per problem."""

import argparse
import sys

import numpy as np

from nsmop.cli import ExperimentConfig, run_experiment
from nsmop.problems import ANALYTIC_NAMES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/analytic")
    parser.add_argument("--n-starts", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ok = True
    for name in ANALYTIC_NAMES:
        summary = run_experiment(ExperimentConfig(
            problem=f"analytic:{name}", n_starts=args.n_starts,
            seed=args.seed, out_dir=f"{args.out}/{name}"))
        ok = ok and summary["all_completed"]
        statuses = [r["status"] for r in summary["runs"]]
        iters = [r["iters"] for r in summary["runs"]]
        print(f"{name}: {len(statuses)} runs, statuses={sorted(set(statuses))}, "
              f"iters median={int(np.median(iters))} max={max(iters)}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
