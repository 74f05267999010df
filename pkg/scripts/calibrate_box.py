"""Calibrate the box constant k of the global orbit search.

Runs the enumeration at one height for several k and reports the orbit counts per class.  The
default k is acceptable once every larger k finds the same orbits.

    python scripts/calibrate_box.py --height 1e4 --k 2 3 4 6 12
"""
import argparse
import time
from collections import Counter

from quarticstats.reduce import BoxConstants, orbit_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--height", default="1e4")
    ap.add_argument("--k", type=float, nargs="+", default=[2, 3, 4, 6])
    ap.add_argument("--cache", help="cache directory (optional)")
    args = ap.parse_args()
    X = int(float(args.height))
    ref = None
    for k in sorted(args.k, reverse=True):
        t = time.time()
        tab = orbit_table(X, BoxConstants(k=k), args.cache)
        reps = {r.rep for r in tab}
        by_cls = Counter(r.cls.value for r in tab)
        if ref is None:
            ref = reps
        missing = len(ref - reps)
        print(f"k={k:g}: {len(reps)} orbits {dict(sorted(by_cls.items()))}, "
              f"missing vs largest k: {missing}, {time.time() - t:.1f}s")


if __name__ == "__main__":
    main()
