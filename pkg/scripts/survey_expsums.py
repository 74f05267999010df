"""Largest scaled orbital exponential sums and Fourier coefficients, per prime and regime.

    python scripts/survey_expsums.py --primes 5 7 11 13 --pairs 200
"""
import argparse
import time

from quarticstats.expsums import fourier_survey, orbital_survey


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, nargs="+", default=[5, 7, 11, 13])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for p in args.primes:
        t = time.time()
        r = orbital_survey(p, 2, args.pairs, args.seed)
        print(f"p={p:2d} orbital  " + "  ".join(f"{k}: {v:.4f}" for k, v in r.items()) + f"  ({time.time() - t:.0f}s)")
    for p in (3, 5):
        r = fourier_survey(p, args.pairs, args.seed)
        print(f"p={p:2d} fourier  " + "  ".join(f"{k}: {v:.4f}" for k, v in r.items()))


if __name__ == "__main__":
    main()
