"""Region constants and the sample period, with both evaluation methods side by side.

    python scripts/constants.py --mc 1000000
"""
import argparse

from quarticstats.arch import real_period, region_constant


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mc", type=int, default=0, help="also run a Monte Carlo check with this many samples")
    args = ap.parse_args()
    for name in ("C56_pos", "C56_neg", "C34_pos", "C34_neg"):
        rc = region_constant(name)
        line = f"{name}: {rc.value:.12g} [{rc.method}] vs {rc.value_b:.12g} [{rc.method_b}]"
        if args.mc and name.startswith("C34"):
            mc = region_constant(name, mc_samples=args.mc)
            line += f", monte carlo {mc.value_b:.6g}"
        print(line)
    a = real_period(3, 0, "agm", 40)
    q = real_period(3, 0, "quadrature", 40)
    print(f"Omega(3,0): agm {float(a):.15g}, quadrature {float(q):.15g}")


if __name__ == "__main__":
    main()
