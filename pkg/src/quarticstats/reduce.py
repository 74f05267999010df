"""PGL_2(Z) reduction: canonical representatives, equivalence, stabilizers.

The reduction key is the (scaled) Bombieri norm 12a^2 + 3b^2 + 2c^2 + 3d^2 + 12e^2, which is
invariant under the orthogonal maps x <-> y, x -> -x and log-convex along the upper half plane,
so a form minimising it is found by descent and the (finite) set of minimisers by a bounded
search around the descent endpoint.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .arith import divisors, factorint
from .errors import DegenerateDiscriminant, InfeasibleSize
from .forms import (InvariantPair, QuarticForm, ScaledMap, SignatureClass, act, invariants,
                    is_generic, is_reducible, signature)

TAU = 2  # search radius: forms with norm <= TAU * current minimum


def norm(f) -> int:
    a, b, c, d, e = f.coeffs if isinstance(f, QuarticForm) else f
    return 12 * a * a + 3 * b * b + 2 * c * c + 3 * d * d + 12 * e * e


def _translate(co, k):
    a, b, c, d, e = co
    return (a, b + 4 * a * k, c + 3 * b * k + 6 * a * k * k,
            d + 2 * c * k + 3 * b * k * k + 4 * a * k**3,
            e + d * k + c * k * k + b * k**3 + a * k**4)


def _rot(co):  # f(-y, x)
    a, b, c, d, e = co
    return (e, -d, c, -b, a)


def _flip(co):  # f(-x, y)
    a, b, c, d, e = co
    return (a, -b, c, -d, e)


def _swap(co):  # f(y, x)
    a, b, c, d, e = co
    return (e, d, c, b, a)


# the group elements g with act(g, f) equal to each move
_G_ROT = ScaledMap(0, 1, -1, 0)
_G_FLIP = ScaledMap(-1, 0, 0, 1)
_G_SWAP = ScaledMap(0, 1, 1, 0)


def _g_translate(k):
    return ScaledMap(1, -k, 0, 1)


def _best_translate(co):
    """Integer k minimising the norm of f(x + k y, y)."""
    a, b, c, d, e = co
    if a == 0 and b == 0:
        return 0
    # norm along the translate is a polynomial in k; look near its real critical points
    P = [0] * 9
    for w, poly in ((12, (a,)), (3, (b, 4 * a)), (2, (c, 3 * b, 6 * a)),
                    (3, (d, 2 * c, 3 * b, 4 * a)), (12, (e, d, c, b, a))):
        for i, x in enumerate(poly):
            for j, y in enumerate(poly):
                P[i + j] += w * x * y
    dP = [i * P[i] for i in range(8, 0, -1)]  # highest degree first
    while dP and dP[0] == 0:
        dP.pop(0)
    cands = {0}
    try:
        scale = max(abs(x) for x in dP)
        for r in np.roots([x / scale for x in dP]):
            if abs(r.imag) < 1e-6 * (1 + abs(r.real)) and abs(r.real) < 1e15:
                cands.update((math.floor(r.real), math.ceil(r.real)))
    except (np.linalg.LinAlgError, ValueError, OverflowError):
        pass
    best = min(cands, key=lambda k: (norm(_translate(co, k)), abs(k), k))
    # exact local polish against float error
    cur = norm(_translate(co, best))
    while True:
        moved = False
        for step in (-1, 1):
            n2 = norm(_translate(co, best + step))
            if n2 < cur:
                best, cur, moved = best + step, n2, True
                break
        if not moved:
            return best


def descend(f: QuarticForm):
    """Norm descent: returns (form, g) with act(g, f) == form."""
    co = f.coeffs
    g = ScaledMap.identity()
    while True:
        k = _best_translate(co)
        if k:
            co = _translate(co, k)
            g = _g_translate(k) @ g
        r = _rot(co)
        k2 = _best_translate(r)
        cand = _translate(r, k2)
        if norm(cand) < norm(co):
            co = cand
            g = _g_translate(k2) @ _G_ROT @ g
            continue
        return QuarticForm(*co), g


def _moves(co):
    yield _translate(co, 1), _g_translate(1)
    yield _translate(co, -1), _g_translate(-1)
    yield _rot(co), _G_ROT
    yield _flip(co), _G_FLIP
    yield _swap(co), _G_SWAP


def _normalize(g: ScaledMap):
    # PGL_2(Z) element up to sign
    t = (g.m11, g.m12, g.m21, g.m22)
    for v in t:
        if v:
            return t if v > 0 else tuple(-x for x in t)
    return t


def _group_closure(gens, limit=64):
    elems = {(1, 0, 0, 1)}
    frontier = list(elems)
    gens = [ScaledMap(*x) for x in gens]
    while frontier:
        new = []
        for t in frontier:
            h = ScaledMap(*t)
            for s in gens:
                u = _normalize(s @ h)
                if u not in elems:
                    elems.add(u)
                    new.append(u)
        if len(elems) > limit:
            raise RuntimeError("stabilizer closure did not terminate")
        frontier = new
    return elems


@dataclass
class Reduction:
    form: QuarticForm  # canonical representative
    g: ScaledMap  # act(g, input) == form
    stabilizer_order: int
    min_norm: int
    explored: int
    minimisers: tuple = field(default=())


def reduce_form(f: QuarticForm, tau: int = TAU) -> Reduction:
    if not f.is_integral:
        raise ValueError("integral form required")
    if invariants(f).delta == 0:
        raise DegenerateDiscriminant(str(f))
    f0, g0 = descend(f)
    start = f0.coeffs
    seen = {start: g0}
    best = norm(start)
    queue = deque([start])
    stab_gens = set()
    while queue:
        co = queue.popleft()
        if norm(co) > tau * best:
            continue
        g = seen[co]
        for nco, mv in _moves(co):
            ng = mv @ g
            n = norm(nco)
            if nco in seen:
                # two paths from f to the same form: a stabilizer element of f
                s = _normalize(ScaledMap(*_normalize(seen[nco])).adjugate() @ ng)
                if s != (1, 0, 0, 1):
                    stab_gens.add(s)
                continue
            if n > tau * best:
                continue
            seen[nco] = ng
            if n < best:
                best = n
            queue.append(nco)
    mins = sorted(co for co in seen if norm(co) == best)
    canon = mins[0]
    stab = _group_closure(stab_gens) if stab_gens else {(1, 0, 0, 1)}
    if len(stab) > 4:
        # the stabilizer embeds in the 2-torsion of the Jacobian
        raise RuntimeError(f"stabilizer of order {len(stab)} for {f}")
    return Reduction(QuarticForm(*canon), seen[canon], len(stab), best, len(seen), tuple(mins))


def canonicalize(f: QuarticForm) -> QuarticForm:
    return reduce_form(f).form


def stabilizer_order(f: QuarticForm) -> int:
    return reduce_form(f).stabilizer_order


def find_transform(f1: QuarticForm, f2: QuarticForm, tau: int = 8):
    """Certified search: some unimodular g with act(g, f1) == f2, or None."""
    if invariants(f1) != invariants(f2):
        return None
    r1, r2 = reduce_form(f1, tau), reduce_form(f2, tau)
    target = r2.form.coeffs
    # r1's explored neighbourhood is regenerated with the larger radius and scanned for f2's rep
    f0, g0 = descend(f1)
    seen = {f0.coeffs: g0}
    queue = deque([f0.coeffs])
    limit = tau * max(r1.min_norm, r2.min_norm)
    while queue:
        co = queue.popleft()
        if co == target:
            g = r2.g.adjugate() @ seen[co]  # r2.g is unimodular, adjugate is its inverse up to sign
            assert act(g, f1) == f2
            return g
        for nco, mv in _moves(co):
            if nco not in seen and norm(nco) <= limit:
                seen[nco] = mv @ seen[co]
                queue.append(nco)
    return None


def are_equivalent(f1: QuarticForm, f2: QuarticForm) -> bool:
    if invariants(f1) != invariants(f2):
        return False
    if canonicalize(f1) == canonicalize(f2):
        return True
    return find_transform(f1, f2) is not None


# --- orbit records ------------------------------------------------------

@dataclass(frozen=True)
class OrbitRecord:
    rep: QuarticForm
    ij: InvariantPair
    cls: SignatureClass
    generic: bool
    irreducible: bool
    stabilizer_order: int

    @classmethod
    def from_form(cls, f: QuarticForm) -> "OrbitRecord":
        r = reduce_form(f)
        return cls.from_reduction(r)

    @classmethod
    def from_reduction(cls, r: Reduction) -> "OrbitRecord":
        rep = r.form
        irred = not is_reducible(rep)
        gen = irred and is_generic(rep)
        return cls(rep, invariants(rep), signature(rep), gen, irred, r.stabilizer_order)

    def passes(self, filt: str) -> bool:
        if filt == "all":
            return True
        if filt == "irreducible":
            return self.irreducible
        if filt == "generic":
            return self.generic
        raise ValueError(f"unknown filter {filt!r}")

    def to_json(self) -> dict:
        d = self.rep.to_json()
        d.update(I=self.ij.I, J=self.ij.J, disc=self.ij.delta,
                 height=_height_str(self.ij), **{"class": self.cls.value},
                 generic=self.generic, irreducible=self.irreducible, stab=self.stabilizer_order)
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "OrbitRecord":
        rep = QuarticForm.from_json(obj)
        ij = invariants(rep)
        gen = bool(obj["generic"])
        irred = obj.get("irreducible", None)
        if irred is None:
            irred = gen or not is_reducible(rep)
        return cls(rep, ij, SignatureClass.parse(obj["class"]), gen, bool(irred), int(obj["stab"]))

    def sort_key(self):
        return (self.ij.height, self.ij.I, self.ij.J, self.rep.coeffs)


def _height_str(ij: InvariantPair) -> str:
    h = ij.height
    return str(h.numerator) if h.denominator == 1 else f"{h.numerator}/{h.denominator}"


@dataclass
class FiberIndex:
    I: int
    J: int
    records: list

    def __len__(self):
        return len(self.records)


# --- enumeration --------------------------------------------------------

FILTERS = ("generic", "irreducible", "all")
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class BoxConstants:
    """Search box for reduced representatives, in units of the height scale H^(1/6).

    Calibrated empirically (see scripts/calibrate_box.py); the worst orbit seen up to 10^6 needs
    about half of the default.
    """
    k: float = 4.0
    fiber_a: float = 2.0
    fiber_c: float = 4.0

    def digest(self) -> str:
        return hashlib.sha1(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()[:12]


def _run_kernel(fn, *args):
    cap = 4096
    while True:
        out = np.zeros((cap, 5), dtype=np.int64)
        n = fn(*args, out)
        if n <= cap:
            return [tuple(int(v) for v in row) for row in out[:n]]
        cap = n


def _fiber_bounds(I: int, J: int, box: BoxConstants):
    lam = float(InvariantPair(I, J).height) ** (1 / 6)
    A = int(box.fiber_a * lam) + 2
    C = int(box.fiber_c * lam) + 4
    Hs = 8 * A * C + 12 * A * A
    if Hs**3 + 48 * abs(I) * A * A * Hs + 64 * abs(J) * A**3 >= _INT64_SAFE:
        raise InfeasibleSize(f"fiber ({I},{J}) too large for the int64 kernel")
    return A, C


def fiber_members(I: int, J: int, box: BoxConstants = BoxConstants()) -> list:
    """Integral forms with invariants (I, J) covering every orbit: a search over small leading
    coefficients plus an exact sweep of forms with a rational root moved to infinity."""
    ij = InvariantPair(I, J)
    if ij.delta == 0:
        raise DegenerateDiscriminant(f"({I},{J})")
    A, C = _fiber_bounds(I, J, box)
    found = _run_kernel(_kernels.fiber_search, I, J, A, C)
    # a = 0: then Delta = b^2 disc(cubic), so b^2 | Delta, and c may be taken mod 3b
    D = abs(4 * I**3 - J * J) // 27
    root = 1
    for p, e in (factorint(D).items() if D else ()):
        root *= p ** (e // 2)
    for b in divisors(root) if D else ():
        for c in range(3 * b):
            if (c * c - I) % (3 * b):
                continue
            d = (c * c - I) // (3 * b)
            num = 9 * b * c * d - 2 * c**3 - J
            if num % (27 * b * b) == 0:
                found.append((0, b, c, d, num // (27 * b * b)))
    return [QuarticForm(*co) for co in found]


def _dedup(forms) -> dict:
    reps = {}
    for f in forms:
        r = reduce_form(f)
        reps.setdefault(r.form, r)
    return reps


def enumerate_fiber(I: int, J: int, box: BoxConstants = BoxConstants()) -> FiberIndex:
    reps = _dedup(fiber_members(I, J, box))
    recs = sorted((OrbitRecord.from_reduction(r) for r in reps.values()), key=lambda r: r.rep.coeffs)
    return FiberIndex(I, J, recs)


def _shards(X: int, box: BoxConstants):
    lam = X ** (1 / 6)
    return list(range(int(box.k * lam) + 2))  # shard s searches |a| == s


def _box_shard(X: int, s: int, box: BoxConstants) -> list:
    lam = X ** (1 / 6)
    k = box.k
    return _run_kernel(_kernels.box_search, X, lam, s, s, k, k, k, k)


def _check_box_size(X: int, box: BoxConstants):
    lam = X ** (1 / 6)
    # largest coefficients the kernel touches: e ~ X^(1/3), d ~ k lam^(3/2), c ~ k lam
    big = 100 * box.k**4 * lam**6
    if X > 10**12 or big >= _INT64_SAFE:
        raise InfeasibleSize(f"height bound {X} too large for the box kernel")


def cache_dir() -> Path:
    return Path(os.environ.get("QUARTIC_CACHE", Path.home() / ".cache" / "quarticstats"))


def orbit_table(X, box: BoxConstants = BoxConstants(), cache: Path | None = None,
                progress=None, max_shards: int | None = None, reverse: bool = False) -> list:
    """Every PGL_2(Z)-orbit of integral forms with Delta != 0 and H < X, sorted by (H, I, J, rep).

    Work is split by |a|; finished shards are appended to a JSONL file together with a checkpoint,
    so an interrupted run resumes where it stopped.  max_shards bounds the work done per call
    (used for testing resumption); the result is then partial and None is returned.
    """
    X = int(X)
    _check_box_size(X, box)
    shards = _shards(X, box)
    if reverse:
        shards = shards[::-1]
    done: set = set()
    reps: dict = {}
    files = None
    if cache is not None:
        cache = Path(cache)
        cache.mkdir(parents=True, exist_ok=True)
        stem = f"orbits-X{X}-{box.digest()}"
        files = (cache / f"{stem}.jsonl", cache / f"{stem}.ckpt")
        if files[1].exists():
            ck = json.loads(files[1].read_text())
            if ck.get("config") == box.digest():
                done = set(ck["shards"])
                with open(files[0]) as fh:
                    for line in fh:
                        rec = OrbitRecord.from_json(json.loads(line))
                        reps.setdefault(rec.rep, rec)
    worked = 0
    for s in shards:
        if s in done:
            continue
        if max_shards is not None and worked >= max_shards:
            return None
        new = []
        for f, r in _dedup(QuarticForm(*co) for co in _box_shard(X, s, box)).items():
            if f not in reps:
                rec = OrbitRecord.from_reduction(r)
                reps[f] = rec
                new.append(rec)
        done.add(s)
        worked += 1
        if files is not None:
            with open(files[0], "a") as fh:
                for rec in new:
                    fh.write(json.dumps(rec.to_json()) + "\n")
            tmp = files[1].with_suffix(".tmp")
            tmp.write_text(json.dumps({"config": box.digest(), "X": X, "shards": sorted(done)}))
            tmp.replace(files[1])
        if progress:
            progress(s, len(shards), len(reps))
    return sorted(reps.values(), key=OrbitRecord.sort_key)


def enumerate_orbits(cls: SignatureClass, X, filter: str = "generic",
                     box: BoxConstants = BoxConstants(), cache: Path | None = None):
    if filter not in FILTERS:
        raise ValueError(f"unknown filter {filter!r}")
    for rec in orbit_table(X, box, cache):
        if rec.cls is cls and rec.passes(filter):
            yield rec
