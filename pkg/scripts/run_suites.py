#!/usr/bin/env python3
"""Run every invariant suite over all builtin data and print a summary.

Usage: python scripts/run_suites.py [--radius 5] [--samples 40] [--seed 0]
"""

import argparse
import sys
import time

from nagaotree import datum as D
from nagaotree import suites as SU


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=5)
    ap.add_argument("--samples", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    all_ok = True
    for name in D.BUILTIN_NAMES:
        d = D.builtin(name)
        # exhaustive sweeps on the small data, sampled on the valency-7 one
        samples = 0 if d.k <= 3 else args.samples
        t0 = time.perf_counter()
        reports = SU.run_suites(d, args.radius, samples=samples,
                                seed=args.seed)
        elapsed = time.perf_counter() - t0
        ok = all(r.passed for r in reports)
        all_ok &= ok
        print(f"{name}  k={d.k}  biregular={d.profile.biregular!s:5}  "
              f"{'ok' if ok else 'FAILED':6} {elapsed:6.1f}s")
        for r in reports:
            mark = "ok" if r.passed else "FAILED"
            print(f"    {r.suite:12} {mark:6} checked={r.checked}")
            for f in r.failures[:3]:
                print(f"      counterexample: {f}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
