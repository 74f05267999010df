"""Average size of the 2-Selmer group over curves with trivial 2-torsion, by height checkpoint.

The run is resumable: each curve is appended to the cache as soon as it is done.

    python scripts/run_selmer.py --height 1e5
"""
import argparse
import time
from collections import Counter

from quarticstats.config import default_cache_dir
from quarticstats.count import selmer_sum


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--height", default="1e4")
    ap.add_argument("--sign", choices=["pos", "neg", "both"], default="both")
    args = ap.parse_args()
    X = int(float(args.height))
    sign = {"pos": 1, "neg": -1, "both": None}[args.sign]
    t = time.time()
    res = selmer_sum(X, sign, cache=default_cache_dir(),
                     progress=lambda i, n: print(f"{i}/{n} curves, {time.time() - t:.0f}s", flush=True))
    x = 100
    while x <= X:
        r = res.restrict(x)
        if r.curve_count:
            print(f"H < {x:>8}: {r.curve_count:6d} curves, average |Sel2| {r.average:.4f}")
        x *= 10
    print("distribution", dict(sorted(Counter(c.sel2 for c in res.records).items())))
    if res.non_power_of_two:
        print("NOT a power of two:", [(c.A, c.B, c.sel2) for c in res.non_power_of_two])


if __name__ == "__main__":
    main()
