"""Run the acceptance suite and print one line per criterion.

    python3 scripts/run_acceptance.py [--seed N] [--json out.json]
"""
import argparse
import json
import sys

from pwlab.io import to_jsonable
from pwlab.suite import CHECKS, SuiteConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the full report here")
    args = ap.parse_args()
    results = sorted(run_suite(None, SuiteConfig(seed=args.seed)), key=lambda r: r.criterion)
    for r in results:
        print(f"{r.criterion:2d} {r.name:<12} {'PASS' if r.passed else 'FAIL'}  {r.elapsed:6.2f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(to_jsonable([r.to_dict(timing=True) for r in results]), fh, indent=2)
    return 0 if all(r.passed for r in results) and len(results) == len(CHECKS) else 1


if __name__ == "__main__":
    sys.exit(main())
