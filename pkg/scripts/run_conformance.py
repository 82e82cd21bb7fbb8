#!/usr/bin/env python3
"""Run the conformance suite and print a one-line summary per check.

    python3 scripts/run_conformance.py --level 6 --out report.json
"""

import argparse
import json
import sys
import time

from mantlelab.report import RunConfig, conformance


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--level", type=int, default=6)
    ap.add_argument("--modes", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--only", nargs="*")
    ap.add_argument("--out")
    args = ap.parse_args()

    start = time.perf_counter()
    rep = conformance(RunConfig(N=args.level, M=args.modes, seed=args.seed), set(args.only) if args.only else None)
    for c in rep.checks:
        print(f"{c.status:5s} {c.name:45s} {c.residual}")
    print(f"{len(rep.checks)} checks, {len(rep.flags)} flagged, {len(rep.failures)} failed in {time.perf_counter() - start:.1f}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rep.to_json(), fh, sort_keys=True, indent=2)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
