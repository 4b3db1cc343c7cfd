#!/usr/bin/env python3
"""Run every figure preset at its default trial count.

Writes all CSVs under --out (default ./out) and prints per-preset timing.
Equivalent to looping `pbfree preset <name> --out <dir>` over all presets.
"""

import argparse
import time
from pathlib import Path

from pbfree.presets import DEFAULT_TRIALS, PRESETS, run_preset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--trials",
        type=int,
        default=None,
        help="override the per-preset default trial counts",
    )
    args = parser.parse_args()

    out_dir = Path(args.out)
    total_start = time.perf_counter()
    for name in sorted(PRESETS):
        start = time.perf_counter()
        paths = run_preset(name, seed=args.seed, trials=args.trials, out_dir=out_dir)
        elapsed = time.perf_counter() - start
        trials = args.trials if args.trials is not None else DEFAULT_TRIALS[name]
        print(f"{name}: {len(paths)} file(s), trials={trials}, {elapsed:.1f}s")
        for path in paths:
            print(f"  {path}")
    print(f"total: {time.perf_counter() - total_start:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
