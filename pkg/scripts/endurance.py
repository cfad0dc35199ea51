#!/usr/bin/env python3
"""Long-haul repair endurance run.

Constructs a code, then hammers it with failure rounds under the chosen
policies while re-checking the full invariant after every accepted
repair.  Prints the aggregate JSON to stdout; optionally stores the
whole report.
"""

from __future__ import annotations

import argparse
import json
import sys

from lrrc.cli_sim import SimConfig, simulate
from lrrc.mfhs import params_new


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--rounds", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--failure-policy", default="uniform-random",
                    choices=("round-robin", "uniform-random", "adversarial-sweep"))
    ap.add_argument("--helper-policy", default="uniform-random",
                    choices=("uniform-random", "exhaustive-per-failure"))
    ap.add_argument("--q", default="auto")
    ap.add_argument("--report", default=None, help="write the full report here")
    args = ap.parse_args()

    config = SimConfig(
        params=params_new(args.n, args.k, args.d, args.r),
        q=args.q if args.q == "auto" else int(args.q),
        seed=args.seed,
        rounds=args.rounds,
        failure_policy=args.failure_policy,
        helper_policy=args.helper_policy,
    )
    report = simulate(config)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.canonical_json(include_timing=True))
        print(f"report written to {args.report}", file=sys.stderr)
    print(json.dumps({"passed": report.passed, "q": report.q,
                      **report.aggregate}, indent=2, sort_keys=True))
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
