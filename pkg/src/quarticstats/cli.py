"""Command line entry point: `quartic <subcommand> ...` (also `python -m quarticstats`)."""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import __version__
from .arith import fmt_float, fmt_rational
from .config import SCHEMA, RunConfig
from .errors import (DegenerateDiscriminant, FactorizationFailure, InfeasibleSize, InsufficientData,
                     NonConvergence, NotGeneric, NotRamified, UnsupportedPrime)
from .forms import QuarticForm, SignatureClass, disc_direct, invariants, is_generic, signature

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class Mismatch(Exception):
    """A verification failed; the report has already been written."""


class UsageError(Exception):
    pass


# --- output helpers ------------------------------------------------------

def _fmt(v):
    from fractions import Fraction
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def _csv(op: str, cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {SCHEMA} {op} config={cfg.digest()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(op: str, cfg: RunConfig, payload) -> str:
    return json.dumps({"schema": SCHEMA, "op": op, "config": cfg.digest(), "result": payload},
                      indent=1, sort_keys=True, default=_fmt) + "\n"


def _cached(op: str, cfg: RunConfig, key: dict, args, compute) -> str:
    """Output cache keyed by (operation, config hash, arguments).  A hit is returned as is;
    --no-cache recomputes and, if an entry exists, demands the two agree."""
    import hashlib
    tag = hashlib.sha1(json.dumps(key, sort_keys=True, default=str).encode()).hexdigest()[:12]
    path = cfg.cache_dir / "outputs" / f"{op}-{cfg.digest()}-{tag}.txt"
    if not args.no_cache and path.exists():
        return path.read_text()
    text = compute()
    if path.exists() and path.read_text() != text:
        sys.stdout.write(text)
        raise Mismatch(f"recomputed {op} output differs from the cached copy at {path}")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return text


def _form(text: str) -> QuarticForm:
    try:
        f = QuarticForm.parse(text)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not f.is_integral:
        raise UsageError("integral coefficients required")
    return f


def _height(text: str) -> int:
    try:
        return int(float(text))
    except ValueError:
        raise UsageError(f"bad height {text!r}") from None


def _classes(text: str):
    if text == "all":
        return list(SignatureClass)
    try:
        return [SignatureClass.parse(t) for t in text.split(",")]
    except ValueError as e:
        raise UsageError(str(e)) from None


# --- subcommands ---------------------------------------------------------

def cmd_invariants(args, cfg):
    f = _form(args.form)
    ij = invariants(f)
    out = [f"I={ij.I}", f"J={ij.J}", f"disc={ij.delta}", f"height={_fmt(ij.height)}"]
    if ij.delta != 0:
        assert disc_direct(f) == ij.delta
        out += [f"class={signature(f).value}", f"generic={_fmt(is_generic(f))}"]
    else:
        out += ["class=degenerate", "generic=false"]
    return " ".join(out) + "\n"


def cmd_reduce(args, cfg):
    from .reduce import enumerate_fiber, reduce_form
    if args.fiber:
        I, J = (int(x) for x in args.fiber.split(","))
        fib = enumerate_fiber(I, J)
        return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in fib.records)
    f = _form(args.form)
    r = reduce_form(f, cfg.neighborhood_radius)
    g = r.g
    return _json("reduce", cfg, {"form": str(f), "canonical": str(r.form),
                                 "transform": [[g.m11, g.m12], [g.m21, g.m22]],
                                 "stabilizer_order": r.stabilizer_order, "min_norm": r.min_norm,
                                 "explored": r.explored, "radius": cfg.neighborhood_radius})


def _box(cfg):
    from .reduce import BoxConstants
    return BoxConstants(k=cfg.box_constant)


def cmd_count_orbits(args, cfg):
    from .count import count_orbits, geometric_grid
    from .reduce import orbit_table
    X = _height(args.height) if args.height else cfg.height_bound
    classes = _classes(args.cls)
    key = {"X": X, "classes": [c.value for c in classes], "weight": args.weight, "filter": args.filter}

    def compute():
        table = orbit_table(X, _box(cfg), cfg.cache_dir,
                            progress=_progress if args.verbose else None)
        rows = []
        for c in classes:
            s = count_orbits(c, X, args.weight, args.filter, geometric_grid(X), table=table)
            rows += list(s.to_rows())
        return _csv("count-orbits", cfg, ["X", "class", "filter", "raw", "weighted"], rows)
    return _cached("count-orbits", cfg, key, args, compute)


def _progress(done, total, found):
    print(f"shard {done + 1}/{total}: {found} orbits", file=sys.stderr)


def cmd_verify_density(args, cfg):
    from .localp import (ALL_TYPES, SLICE_ROWS, brute_force_slice, brute_force_splitting,
                         density_slice, density_splitting)
    rows, bad = [], 0
    primes = [args.p] if args.p else list(cfg.prime_list)
    for p in primes:
        if args.table == 1:
            bf = brute_force_splitting(p)
            for s in ALL_TYPES:
                cf = density_splitting(s, p)
                ok = cf == bf.get(s, 0)
                bad += not ok
                rows.append((p, str(s), False, "", cf, bf.get(s, 0), ok))
        else:
            ks = [args.k] if args.k is not None else [0, 1, 2, 3]
            for k in ks:
                bf = brute_force_slice(p, k)
                for s, mx in SLICE_ROWS:
                    cf = density_slice(s, mx, p, k)
                    got = bf.get((s, mx), 0)
                    ok = cf == got
                    bad += not ok
                    rows.append((p, str(s), mx, k, cf, got, ok))
    text = _csv("verify-density", cfg,
                ["p", "sigma", "maximal", "k", "closed_form", "brute_force", "match"], rows)
    if bad:
        sys.stdout.write(text)
        raise Mismatch(f"{bad} density mismatches")
    return text


def cmd_solubility(args, cfg):
    from .localp import linf_soluble, lp_decide
    f = _form(args.form)
    primes = [args.p] if args.p else list(cfg.prime_list)
    rows = [("inf", linf_soluble(f), "")]
    for p in primes:
        ok, depth = lp_decide(f, p)
        rows.append((p, ok, depth))
    return _csv("solubility", cfg, ["p", "soluble", "depth"], rows)


def cmd_mp(args, cfg):
    from .localp import mp_level, mp_levels
    f = _form(args.form)
    if args.k is not None:
        return _csv("mp", cfg, ["p", "k", "m_level"], [(args.p, args.k, mp_level(f, args.p, args.k))])
    lv = mp_levels(f, args.p)
    rows = [(args.p, k, m) for k, m in enumerate(lv)] + [(args.p, "total", sum(lv))]
    return _csv("mp", cfg, ["p", "k", "m_level"], rows)


def cmd_expsum(args, cfg):
    import numpy as np
    from .expsums import REGIMES, h_regime, orbital_sum, random_h, random_primitive
    p, k = args.p, args.k
    rows = []
    if args.form and args.h:
        f = [int(x) for x in args.form.split(",")]
        h = [int(x) for x in args.h.split(",")]
        reg, e = h_regime(h, p, k)
        G = abs(orbital_sum(f, h, p, k))
        rows.append((p, k, args.form, args.h, reg, G, G * p**e))
    else:
        rng = np.random.default_rng([cfg.rng_seed, p, k])
        for reg in REGIMES:
            for _ in range(args.pairs):
                f = random_primitive(p, k, rng)
                h = random_h(p, k, reg, rng)
                e = h_regime(h, p, k)[1]
                G = abs(orbital_sum(f, h, p, k))
                rows.append((p, k, ",".join(map(str, f)), ",".join(map(str, h)), reg, G, G * p**e))
    return _csv("expsum", cfg, ["p", "k", "f", "h", "regime", "abs_G", "scaled"], rows)


def cmd_periods(args, cfg):
    from fractions import Fraction
    from .arch import omega_tilde, real_period, real_period_checked
    I, J = Fraction(args.I), Fraction(args.J)
    a = real_period_checked(I, J)
    q = real_period(I, J, "quadrature", 30)
    t = omega_tilde(I, J)
    return _json("periods", cfg, {"I": str(I), "J": str(J), "omega_agm": float(a.value),
                                  "omega_quadrature": float(q.value),
                                  "agreement": abs(float(a.value - q.value)),
                                  "omega_tilde": float(t.value)})


def cmd_constants(args, cfg):
    from .arch import region_constant
    names = [args.name] if args.name else ["C56_pos", "C56_neg", "C34_pos", "C34_neg"]

    def compute():
        out = []
        for n in names:
            rc = region_constant(n, mc_samples=args.mc)
            out.append({"name": n, "value": rc.value, "error_estimate": rc.error_estimate,
                        "method_a": rc.method, "method_b": rc.method_b, "value_b": rc.value_b,
                        "agreement": rc.agreement,
                        "exact": None if rc.exact is None else fmt_rational(rc.exact)})
        return _json("constants", cfg, out)
    return _cached("constants", cfg, {"names": names, "mc": args.mc}, args, compute)


def cmd_selmer(args, cfg):
    from .count import geometric_grid, selmer_sum
    X = _height(args.height) if args.height else cfg.height_bound
    sign = {"pos": 1, "neg": -1, "both": None}[args.sign]

    def compute():
        res = selmer_sum(X, sign, _box(cfg), cfg.cache_dir)
        rows = []
        for x in geometric_grid(X, start=min(100, X), per_decade=1):
            r = res.restrict(x)
            if r.curve_count:
                rows.append((x, args.sign, r.curve_count, r.selmer_total, r.average,
                             len(r.non_power_of_two)))
        return _csv("selmer", cfg, ["X", "sign", "curves", "selmer_total", "average", "non_power_of_two"],
                    rows)
    text = _cached("selmer", cfg, {"X": X, "sign": args.sign}, args, compute)
    if any(line.split(",")[-1].strip() not in ("0", "non_power_of_two")
           for line in text.splitlines()[1:]):
        sys.stdout.write(text)
        raise Mismatch("a Selmer count is not a power of two")
    return text


def cmd_fit(args, cfg):
    from .count import count_orbits, fit_terms, geometric_grid, primary_term, secondary_term
    from .reduce import orbit_table
    X = _height(args.height) if args.height else cfg.height_bound
    classes = _classes(args.cls)

    def compute():
        table = orbit_table(X, _box(cfg), cfg.cache_dir)
        out = []
        for c in classes:
            s = count_orbits(c, X, "one", args.filter, geometric_grid(X), table=table)
            rep = fit_terms(s)
            d = rep.to_json()
            d.update(X=X, count=s.raw[-1], primary=primary_term(c, X), secondary=secondary_term(c, X),
                     ratio=s.raw[-1] / primary_term(c, X))
            out.append(d)
        return _json("fit", cfg, out)
    return _cached("fit", cfg, {"X": X, "classes": [c.value for c in classes], "filter": args.filter},
                   args, compute)


def cmd_verify_all(args, cfg):
    """Quick end-to-end self-check; the full acceptance run lives in the test suite."""
    from fractions import Fraction
    from .arch import real_period, region_constant
    from .forms import act, ScaledMap
    from .localp import (ALL_TYPES, SLICE_ROWS, brute_force_slice, brute_force_splitting,
                         density_slice, density_splitting)
    checks = []

    def record(name, ok, detail=""):
        checks.append((name, ok, detail))

    for p in (3, 5, 7):
        bf = brute_force_splitting(p)
        bad = [str(s) for s in ALL_TYPES if density_splitting(s, p) != bf.get(s, 0)]
        record(f"splitting p={p}", not bad, " ".join(bad))
    for p in (3, 5):
        for k in (0, 1, 2):
            bf = brute_force_slice(p, k)
            bad = [f"{s}{'max' if m else ''}" for s, m in SLICE_ROWS
                   if density_slice(s, m, p, k) != bf.get((s, m), 0)]
            record(f"slice p={p} k={k}", not bad, " ".join(bad))
    rng = random.Random(cfg.rng_seed)
    ok = True
    for _ in range(2000):
        f = QuarticForm(*(rng.randint(-10**4, 10**4) for _ in range(5)))
        ok &= invariants(f).delta == disc_direct(f)
        g = ScaledMap(1, rng.randint(-9, 9), 0, 1) @ ScaledMap(0, 1, -1, 0)
        ok &= invariants(act(g, f)) == invariants(f)
    record("discriminant identity and invariance", ok)
    for n in ("C56_pos", "C56_neg"):
        rc = region_constant(n)
        record(n, abs(rc.value - float(rc.exact)) < 1e-6 and rc.agreement < 1e-6, fmt_float(rc.value))
    a = real_period(3, 0, "agm", 40).value
    q = real_period(3, 0, "quadrature", 40).value
    record("period (3,0) agm vs quadrature", abs(a - q) / a < 1e-9, fmt_float(float(a)))
    text = _csv("verify-all", cfg, ["check", "pass", "detail"], checks)
    if not all(c[1] for c in checks):
        sys.stdout.write(text)
        raise Mismatch(f"{sum(not c[1] for c in checks)} checks failed")
    return text


# --- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quartic", description="binary quartic form statistics")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--config", help="key=value configuration file")
    ap.add_argument("--cache-dir")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--seed", type=int, dest="rng_seed")
    ap.add_argument("--box-constant", type=float)
    ap.add_argument("--radius", type=int, dest="neighborhood_radius")
    ap.add_argument("--no-cache", action="store_true", help="recompute and audit against the cache")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("invariants")
    p.add_argument("--form", required=True)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("reduce")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--form")
    g.add_argument("--fiber", help="I,J")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("count-orbits")
    p.add_argument("--class", dest="cls", default="all")
    p.add_argument("--height")
    p.add_argument("--weight", default="one", help="one | ell_over_m | split:p:type[:max]")
    p.add_argument("--filter", default="irreducible", choices=["irreducible", "generic", "all"])
    p.set_defaults(fn=cmd_count_orbits)

    p = sub.add_parser("verify-density")
    p.add_argument("--p", type=int)
    p.add_argument("--table", type=int, choices=[1, 2], default=1)
    p.add_argument("--k", type=int)
    p.set_defaults(fn=cmd_verify_density)

    p = sub.add_parser("solubility")
    p.add_argument("--form", required=True)
    p.add_argument("--p", type=int)
    p.set_defaults(fn=cmd_solubility)

    p = sub.add_parser("mp")
    p.add_argument("--form", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(fn=cmd_mp)

    p = sub.add_parser("expsum")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--form")
    p.add_argument("--h")
    p.add_argument("--pairs", type=int, default=20)
    p.set_defaults(fn=cmd_expsum)

    p = sub.add_parser("periods")
    p.add_argument("--I", required=True)
    p.add_argument("--J", required=True)
    p.set_defaults(fn=cmd_periods)

    p = sub.add_parser("constants")
    p.add_argument("--name", choices=["C56_pos", "C56_neg", "C34_pos", "C34_neg"])
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo samples instead of area quadrature")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("selmer")
    p.add_argument("--height")
    p.add_argument("--sign", choices=["pos", "neg", "both"], default="both")
    p.set_defaults(fn=cmd_selmer)

    p = sub.add_parser("fit")
    p.add_argument("--class", dest="cls", default="all")
    p.add_argument("--height")
    p.add_argument("--filter", default="irreducible", choices=["irreducible", "generic", "all"])
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("verify-all")
    p.set_defaults(fn=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = RunConfig.load(args.config, cache_dir=args.cache_dir, threads=args.threads,
                             rng_seed=args.rng_seed, box_constant=args.box_constant,
                             neighborhood_radius=args.neighborhood_radius)
        sys.stdout.write(args.fn(args, cfg))
        return EXIT_OK
    except Mismatch as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except NonConvergence as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UsageError, ValueError, DegenerateDiscriminant, NotGeneric, NotRamified,
            UnsupportedPrime, InsufficientData, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleSize, FactorizationFailure, MemoryError) as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
