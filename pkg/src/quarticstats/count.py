"""Counting functions built on the orbit tables: weighted orbit counts, 2-Selmer sums,
truncated Dirichlet series and two-term asymptotic fits."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np

from .arch import C56_EXACT, zeta_half, zeta_two
from .errors import InsufficientData, NonConvergence, NotGeneric
from .forms import QuarticForm, SignatureClass
from .localp import (ALL_TYPES, MAX_TYPES, SplittingType, density_slice, density_splitting,
                     global_weights, is_resolvent_maximal_at, splitting_type)
from .reduce import FILTERS, BoxConstants, OrbitRecord, _dedup, fiber_members, orbit_table

# C_{3/4} by the boundary reduction in arch; C34_pos is exactly 128/5
C34 = {"C34_pos": 25.6, "C34_neg": 72.38124227728538}


# --- weights -------------------------------------------------------------

@dataclass(frozen=True)
class SplitIndicator:
    """1 when f mod p has splitting type sigma (and, if maximal, passes the lift criterion)."""
    p: int
    sigma: SplittingType
    maximal: bool = False

    def __call__(self, f: QuarticForm) -> int:
        if splitting_type(f, self.p) != self.sigma:
            return 0
        if self.maximal:
            return int(is_resolvent_maximal_at(f, self.p))
        return 1

    @property
    def name(self) -> str:
        return f"split:{self.p}:{self.sigma}" + (":max" if self.maximal else "")

    @classmethod
    def parse(cls, text: str) -> "SplitIndicator":
        # "split:5:(1^211)" or "split:5:1^211:max"
        parts = text.split(":")
        if parts[0] != "split" or len(parts) not in (3, 4):
            raise ValueError(f"bad splitting weight {text!r}")
        return cls(int(parts[1]), SplittingType.parse(parts[2]), len(parts) == 4 and parts[3] == "max")


def _ell_over_m(f: QuarticForm) -> Fraction:
    ell, m = global_weights(f, check_generic=False)
    return Fraction(ell, m)


def make_weight(spec):
    """Weight function on orbit records from 'one', 'ell_over_m' or a split:... string."""
    if callable(spec) and not isinstance(spec, str):
        return spec
    if spec == "one":
        return lambda rec: 1
    if spec == "ell_over_m":
        def w(rec):
            if not rec.generic:
                raise NotGeneric(str(rec.rep))
            return _ell_over_m(rec.rep)
        return w
    ind = SplitIndicator.parse(spec)
    return lambda rec: ind(rec.rep)


# --- orbit counts --------------------------------------------------------

def geometric_grid(X, start=10**3, per_decade: int = 4) -> list:
    """Checkpoints 10^(j/per_decade) from start up to and including X."""
    lo = round(math.log10(start) * per_decade)
    hi = math.floor(math.log10(X) * per_decade + 1e-9)
    pts = [round(10 ** (j / per_decade)) for j in range(lo, hi + 1)]
    if not pts or pts[-1] != int(X):
        pts.append(int(X))
    return pts


@dataclass
class CountSeries:
    cls: SignatureClass
    filter: str
    weight: str
    X: list
    raw: list
    weighted: list  # exact Fractions
    config: str = ""

    def to_rows(self):
        for x, r, w in zip(self.X, self.raw, self.weighted):
            yield x, self.cls.value, self.filter, r, w

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.raw, self.raw[1:])) and \
            all(a <= b for a, b in zip(self.weighted, self.weighted[1:]))


def _config_hash(**kw) -> str:
    return hashlib.sha1(json.dumps(kw, sort_keys=True, default=str).encode()).hexdigest()[:12]


def count_orbits(cls: SignatureClass, X, phi="one", filter: str = "irreducible", checkpoints=None,
                 table=None, box: BoxConstants = BoxConstants(), cache: Path | None = None) -> CountSeries:
    """Sum phi over orbits of class cls passing filter with H < x, for each checkpoint x <= X.

    table may be a precomputed orbit_table(X) (or one for a larger bound).
    """
    if filter not in FILTERS:
        raise ValueError(f"unknown filter {filter!r}")
    X = int(X)
    checkpoints = sorted(checkpoints or geometric_grid(X))
    if checkpoints[-1] > X:
        raise ValueError("checkpoints beyond the height bound")
    if table is None:
        table = orbit_table(X, box, cache)
    w = make_weight(phi)
    raw = [0] * len(checkpoints)
    wsum = [Fraction(0)] * len(checkpoints)
    for rec in table:
        if rec.cls is not cls or not rec.passes(filter):
            continue
        h = rec.ij.height
        if h >= X:
            continue
        v = Fraction(w(rec))
        # first checkpoint strictly above h
        lo, hi = 0, len(checkpoints)
        while lo < hi:
            mid = (lo + hi) // 2
            if checkpoints[mid] > h:
                hi = mid
            else:
                lo = mid + 1
        if lo < len(checkpoints):
            raw[lo] += 1
            wsum[lo] += v
    raw = list(np.cumsum(raw).astype(int).tolist())
    acc, ws = Fraction(0), []
    for v in wsum:
        acc += v
        ws.append(acc)
    name = phi if isinstance(phi, str) else getattr(phi, "__name__", "custom")
    return CountSeries(cls, filter, name, checkpoints, raw, ws,
                       _config_hash(X=X, box=asdict(box), phi=name, filter=filter, cls=cls.value))


# --- theory --------------------------------------------------------------

def _c_circ(cls: SignatureClass, which: str) -> float:
    key = "pos" if cls.disc_sign > 0 else "neg"
    if which == "56":
        return float(C56_EXACT[f"C56_{key}"])
    return C34[f"C34_{key}"]


def primary_coefficient(cls: SignatureClass) -> float:
    return float(2 * zeta_two() * _c_circ(cls, "56") / (27 * cls.sigma))


def secondary_coefficient(cls: SignatureClass) -> float:
    return float(zeta_half() * _c_circ(cls, "34") / (108 * cls.sigma))


def primary_term(cls: SignatureClass, X) -> float:
    return primary_coefficient(cls) * float(X) ** (5 / 6)


def secondary_term(cls: SignatureClass, X) -> float:
    return secondary_coefficient(cls) * float(X) ** 0.75


@dataclass
class FitReport:
    cls: str
    c1_hat: float
    c2_hat: float
    c1_theory: float
    c2_theory: float
    residual_exponent: float  # slope of log|count - fit| against log X
    max_abs_residual: float
    n_points: int

    def to_json(self) -> dict:
        return asdict(self)


def fit_terms(series: CountSeries, cls: SignatureClass | None = None, use_weighted: bool = False) -> FitReport:
    """Least squares count(X) ~ c1 X^(5/6) + c2 X^(3/4) over the checkpoints."""
    cls = cls or series.cls
    X = np.asarray(series.X, dtype=float)
    y = np.asarray([float(v) for v in (series.weighted if use_weighted else series.raw)])
    if len(X) < 8 or X.max() / X.min() < 100 * (1 - 1e-9):
        raise InsufficientData(f"need >= 8 checkpoints over two decades, have {len(X)}")
    # scale by X^(3/4) so both columns are O(1)-ish in relative terms
    s = X ** 0.75
    M = np.column_stack([X ** (5 / 6) / s, np.ones_like(X)])
    (c1, c2), *_ = np.linalg.lstsq(M, y / s, rcond=None)
    res = y - c1 * X ** (5 / 6) - c2 * X ** 0.75
    nz = np.abs(res) > 0
    if nz.sum() >= 2:
        slope = float(np.polyfit(np.log(X[nz]), np.log(np.abs(res[nz])), 1)[0])
    else:
        slope = float("nan")
    return FitReport(cls.value, float(c1), float(c2), primary_coefficient(cls),
                     secondary_coefficient(cls), slope, float(np.abs(res).max()), len(X))


# --- Dirichlet series ----------------------------------------------------

def _nu(phi, k: int) -> Fraction:
    """nu_{p^k u}(phi) for a single-prime splitting indicator, or 1 for phi = 'one'."""
    if phi == "one":
        return Fraction(1)
    return density_slice(phi.sigma, phi.maximal, phi.p, k)


def dirichlet_partial(phi, sign: int, s: float, A_max: int | None = None):
    """D^sign(phi, s) = sum over a > 0 of nu_{sign a}(phi) / a^s.

    phi is 'one' or a SplitIndicator (at an odd prime).  With A_max and s > 1 the raw partial sum
    is returned; otherwise the Euler product, continued through zeta(s) when s < 1.
    """
    if isinstance(phi, str) and phi != "one":
        phi = SplitIndicator.parse(phi)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    # nu_{-a} = nu_a: the slice densities are unit invariant, so D+ = D- for these phi
    if A_max is not None:
        if s <= 1:
            raise NonConvergence("raw partial sums need s > 1")
        if phi == "one":
            return math.fsum(a ** -s for a in range(1, A_max + 1))
        p = phi.p
        tot = []
        for a in range(1, A_max + 1):
            k, m = 0, a
            while m % p == 0:
                m //= p
                k += 1
            tot.append(float(_nu(phi, k)) * a ** -s)
        return math.fsum(tot)
    if s == 1:
        raise NonConvergence("pole at s = 1")
    with mp.workdps(30):
        z = mp.zeta(s)
        if phi == "one":
            return float(z)
        p = mp.mpf(phi.p)
        q = p ** (-s)
        nu = [mp.mpf(v.numerator) / v.denominator for v in (_nu(phi, k) for k in range(3))]
        local = nu[0] + nu[1] * q + nu[2] * q * q / (1 - q)
        return float(z * (1 - q) * local)


def splitting_ratios(cls: SignatureClass, X, p: int, table=None, filter: str = "generic") -> dict:
    """Empirical share of each splitting type mod p among counted orbits, with the closed-form
    density (the leading-term prediction) alongside."""
    if table is None:
        table = orbit_table(X)
    recs = [r for r in table if r.cls is cls and r.passes(filter) and r.ij.height < X]
    if not recs:
        raise InsufficientData("no orbits")
    counts: dict = {}
    for r in recs:
        t = splitting_type(r.rep, p)
        counts[t] = counts.get(t, 0) + 1
    out = {}
    for t in ALL_TYPES:
        out[str(t)] = (Fraction(counts.get(t, 0), len(recs)), density_splitting(t, p))
    return out


def splitting_distance(ratios: dict) -> float:
    """Total variation distance between the empirical shares and the closed-form densities."""
    return float(sum(abs(a - b) for a, b in ratios.values())) / 2


# --- 2-Selmer ------------------------------------------------------------

@dataclass(frozen=True)
class CurveRecord:
    A: int
    B: int
    sel2: int | None = None
    n_generic: int = 0  # generic orbits in the fiber
    n_soluble: int = 0  # of which locally soluble

    @property
    def I(self) -> int:
        return -48 * self.A

    @property
    def J(self) -> int:
        return -1728 * self.B

    @property
    def height(self) -> int:
        return max(4 * abs(self.A) ** 3, 27 * self.B * self.B)

    @property
    def disc_sign(self) -> int:
        # sign of Delta(I, J), which is that of -(4A^3 + 27B^2)
        return -1 if 4 * self.A**3 + 27 * self.B**2 > 0 else 1

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "sel2": self.sel2,
                "generic": self.n_generic, "soluble": self.n_soluble}

    @classmethod
    def from_json(cls, d: dict) -> "CurveRecord":
        return cls(d["A"], d["B"], d["sel2"], d["generic"], d["soluble"])


def is_minimal(A: int, B: int) -> bool:
    """p^4 | A implies p^6 does not divide B, for every prime p."""
    if A == 0 and B == 0:
        return False
    p = 2  # composite p are harmless: any prime factor of p then fails too
    while (A == 0 or p**4 <= abs(A)) and (B == 0 or p**6 <= abs(B)):
        if A % p**4 == 0 and B % p**6 == 0:
            return False
        p += 1
    return True


def has_rational_two_torsion(A: int, B: int) -> bool:
    """x^3 + A x + B has an integer (hence rational) root."""
    if B == 0:
        return True
    for r in range(1, math.isqrt(abs(B)) + 2):
        if B % r:
            continue
        for d in (r, B // r):
            for x in (d, -d):
                if x**3 + A * x + B == 0:
                    return True
    return False


def curves(X, sign: int | None = None):
    """Minimal (A, B) with 4A^3 + 27B^2 != 0, height < X, trivial 2-torsion, optional disc sign."""
    amax = 0
    while 4 * (amax + 1) ** 3 < X:
        amax += 1
    bmax = 0
    while 27 * (bmax + 1) ** 2 < X:
        bmax += 1
    for A in range(-amax, amax + 1):
        for B in range(-bmax, bmax + 1):
            if 4 * A**3 + 27 * B * B == 0:
                continue
            c = CurveRecord(A, B)
            if c.height >= X or not is_minimal(A, B):
                continue
            if sign is not None and c.disc_sign != sign:
                continue
            if has_rational_two_torsion(A, B):
                continue
            yield c


def selmer_of(A: int, B: int, box: BoxConstants = BoxConstants()) -> CurveRecord:
    """|Sel_2(E_{A,B})| = 1 + sum over generic orbits with invariants (I(E), J(E)) of ell/m."""
    I, J = -48 * A, -1728 * B
    tot = Fraction(1)
    n_gen = n_sol = 0
    for f, r in _dedup(fiber_members(I, J, box)).items():
        rec = OrbitRecord.from_reduction(r)
        if not rec.generic:
            continue
        n_gen += 1
        w = _ell_over_m(f)
        if w:
            n_sol += 1
        tot += w
    if tot.denominator != 1:
        raise NonConvergence(f"non-integral Selmer count {tot} for ({A},{B})")
    return CurveRecord(A, B, int(tot), n_gen, n_sol)


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass
class SelmerResult:
    X: int
    sign: int | None
    records: list = field(default_factory=list)

    @property
    def curve_count(self) -> int:
        return len(self.records)

    @property
    def selmer_total(self) -> int:
        return sum(c.sel2 for c in self.records)

    @property
    def average(self) -> float:
        return self.selmer_total / self.curve_count

    def restrict(self, X) -> "SelmerResult":
        return SelmerResult(int(X), self.sign, [c for c in self.records if c.height < X])

    @property
    def non_power_of_two(self) -> list:
        return [c for c in self.records if not is_power_of_two(c.sel2)]


def selmer_sum(X, sign: int | None = None, box: BoxConstants = BoxConstants(),
               cache: Path | None = None, progress=None) -> SelmerResult:
    """Selmer sizes of all trivial-2-torsion curves of height < X (optionally one disc sign).

    With a cache directory each finished curve is appended to a JSONL file, so an interrupted
    run picks up where it stopped.  Curves computed for a larger X are reused.
    """
    X = int(X)
    todo = list(curves(X, sign))
    done: dict = {}
    path = None
    if cache is not None:
        cache = Path(cache)
        cache.mkdir(parents=True, exist_ok=True)
        path = cache / f"selmer-{box.digest()}.jsonl"
        if path.exists():
            with open(path) as fh:
                for line in fh:
                    try:
                        c = CurveRecord.from_json(json.loads(line))
                    except (ValueError, KeyError):
                        continue  # torn final line
                    done[(c.A, c.B)] = c
    out = []
    fh = open(path, "a") if path is not None else None
    try:
        for i, c in enumerate(todo):
            rec = done.get((c.A, c.B))
            if rec is None:
                rec = selmer_of(c.A, c.B, box)
                if fh is not None:
                    fh.write(json.dumps(rec.to_json()) + "\n")
                    fh.flush()
            out.append(rec)
            if progress and i % 500 == 0:
                progress(i, len(todo))
    finally:
        if fh is not None:
            fh.close()
    out.sort(key=lambda c: (c.height, c.A, c.B))
    return SelmerResult(X, sign, out)
