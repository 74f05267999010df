from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..errors import NotRamified, UnsupportedPrime
from ..forms import QuarticForm
from . import ffield


@dataclass(frozen=True)
class SplittingType:
    """Factorization shape mod p: sorted ((degree, multiplicity), ...); empty tuple means (0)."""

    factors: tuple

    def __post_init__(self):
        fs = tuple(sorted(self.factors, key=lambda t: (-t[1], t[0])))
        object.__setattr__(self, "factors", fs)
        if fs and sum(d * e for d, e in fs) != 4:
            raise ValueError(f"weighted degree must be 4: {fs}")

    @property
    def is_zero(self) -> bool:
        return not self.factors

    @property
    def index(self) -> int:
        return sum((e - 1) * d for d, e in self.factors)

    @property
    def is_ramified(self) -> bool:
        return any(e > 1 for _, e in self.factors)

    def __str__(self):
        if self.is_zero:
            return "(0)"
        return "(" + "".join(f"{d}^{e}" if e > 1 else f"{d}" for d, e in self.factors) + ")"

    @classmethod
    def parse(cls, text: str) -> "SplittingType":
        t = text.strip().strip("()").replace(" ", "")
        if t == "0":
            return cls(())
        toks = re.findall(r"(\d)(?:\^(\d))?", t)
        if "".join(d + ("^" + e if e else "") for d, e in toks) != t:
            raise ValueError(f"bad splitting type {text!r}")
        return cls(tuple((int(d), int(e or 1)) for d, e in toks))


ZERO = SplittingType(())
ALL_TYPES = tuple(SplittingType.parse(s) for s in (
    "1111", "112", "13", "22", "4", "1^211", "1^22", "1^31", "1^21^2", "2^2", "1^4"))
MAX_TYPES = tuple(SplittingType.parse(s) for s in ("1^211", "1^22", "1^31"))


def _factor_form(f: QuarticForm, p: int):
    """Irreducible factors of f mod p as binary form: [(poly_low_first | None, mult)], None = infinity."""
    coeffs = [v % p for v in f.coeffs]
    low = ffield.trim(coeffs[::-1])  # f(x,1), lowest degree first
    if not low:
        return None
    out = []
    if ffield.deg(low) > 0:
        out = ffield.factor(low, p, seed=hash((tuple(coeffs), p)))
    inf_mult = 4 - ffield.deg(low)
    if inf_mult:
        out.append((None, inf_mult))
    return out


def splitting_type(f: QuarticForm, p: int) -> SplittingType:
    fac = _factor_form(f, p)
    if fac is None:
        return ZERO
    return SplittingType(tuple((1 if g is None else ffield.deg(g), e) for g, e in fac))


def multiple_roots(f: QuarticForm, p: int):
    """Points of P^1(F_p) that are multiple roots of f mod p, as primitive integer vectors (x, y)."""
    fac = _factor_form(f, p)
    if fac is None:
        return []
    out = []
    for g, e in fac:
        if e < 2:
            continue
        if g is None:
            out.append((1, 0))
        elif ffield.deg(g) == 1:
            out.append(((-g[0]) % p, 1))
    return out


def is_resolvent_maximal_at(f: QuarticForm, p: int) -> bool:
    sigma = splitting_type(f, p)
    if sigma.is_zero or not sigma.is_ramified:
        raise NotRamified(f"{f} mod {p} is {sigma}")
    if sigma not in MAX_TYPES:
        return False
    return all(f(x, y) % (p * p) != 0 for x, y in multiple_roots(f, p))


# --- closed forms -------------------------------------------------------

def _t(s):
    return SplittingType.parse(s)


_SPLIT_DENSITY = {
    _t("1111"): lambda p: Fraction((p + 1) * (p - 1) ** 2 * (p - 2), 24 * p**4),
    _t("112"): lambda p: Fraction((p + 1) * (p - 1) ** 2, 4 * p**3),
    _t("13"): lambda p: Fraction((p + 1) ** 2 * (p - 1) ** 2, 3 * p**4),
    _t("22"): lambda p: Fraction((p - 1) ** 2 * (p + 1) * (p - 2), 8 * p**4),
    _t("4"): lambda p: Fraction((p + 1) * (p - 1) ** 2, 4 * p**3),
    _t("1^211"): lambda p: Fraction((p + 1) * (p - 1) ** 2, 2 * p**4),
    _t("1^22"): lambda p: Fraction((p + 1) * (p - 1) ** 2, 2 * p**4),
    _t("1^31"): lambda p: Fraction((p + 1) * (p - 1), p**4),
    _t("1^21^2"): lambda p: Fraction((p + 1) * (p - 1), 2 * p**4),
    _t("2^2"): lambda p: Fraction((p - 1) ** 2, 2 * p**4),
    _t("1^4"): lambda p: Fraction((p + 1) * (p - 1), p**5),
}

# (nu_1, nu_p, nu_{p^k} for k >= 2)
_SLICE_DENSITY = {
    (_t("1111"), False): (lambda p: Fraction((p - 1) * (p - 2) * (p - 3), 24 * p**3),
                          lambda p: Fraction((p - 1) ** 2 * (p - 2), 6 * p**3),
                          lambda p: Fraction((p - 1) ** 2 * (p - 2), 6 * p**3)),
    (_t("112"), False): (lambda p: Fraction((p - 1) ** 2, 4 * p**2),
                         lambda p: Fraction((p - 1) ** 2, 2 * p**2),
                         lambda p: Fraction((p - 1) ** 2, 2 * p**2)),
    (_t("13"), False): (lambda p: Fraction((p + 1) * (p - 1), 3 * p**2),
                        lambda p: Fraction((p + 1) * (p - 1) ** 2, 3 * p**3),
                        lambda p: Fraction((p + 1) * (p - 1) ** 2, 3 * p**3)),
    (_t("22"), False): (lambda p: Fraction((p - 1) * (p * p - p - 2), 8 * p**3),
                        lambda p: Fraction(0), lambda p: Fraction(0)),
    (_t("4"), False): (lambda p: Fraction((p + 1) * (p - 1), 4 * p**2),
                       lambda p: Fraction(0), lambda p: Fraction(0)),
    (_t("1^211"), False): (lambda p: Fraction((p - 1) * (p - 2), 2 * p**3),
                           lambda p: Fraction(3 * (p - 1) ** 2, 2 * p**3),
                           lambda p: Fraction(3 * (p - 1) ** 2, 2 * p**3)),
    (_t("1^22"), False): (lambda p: Fraction(p - 1, 2 * p**2),
                          lambda p: Fraction((p - 1) ** 2, 2 * p**3),
                          lambda p: Fraction((p - 1) ** 2, 2 * p**3)),
    (_t("1^31"), False): (lambda p: Fraction(p - 1, p**3),
                          lambda p: Fraction(2 * (p - 1), p**3),
                          lambda p: Fraction(2 * (p - 1), p**3)),
    (_t("1^211"), True): (lambda p: Fraction((p - 1) ** 2 * (p - 2), 2 * p**4),
                          lambda p: Fraction((3 * p - 2) * (p - 1) ** 2, 2 * p**4),
                          lambda p: Fraction((p - 1) ** 3, p**4)),
    (_t("1^22"), True): (lambda p: Fraction((p - 1) ** 3, 2 * p**4),
                         lambda p: Fraction((p - 1) ** 2, 2 * p**3),
                         lambda p: Fraction(0)),
    (_t("1^31"), True): (lambda p: Fraction((p - 1) ** 2, p**4),
                         lambda p: Fraction((2 * p - 1) * (p - 1), p**4),
                         lambda p: Fraction((p - 1) ** 2, p**4)),
    (_t("1^21^2"), False): (lambda p: Fraction(p - 1, 2 * p**3),
                            lambda p: Fraction(p - 1, p**3),
                            lambda p: Fraction(p - 1, p**3)),
    (_t("2^2"), False): (lambda p: Fraction(p - 1, 2 * p**3),
                         lambda p: Fraction(0), lambda p: Fraction(0)),
    (_t("1^4"), False): (lambda p: Fraction(1, p**3),
                         lambda p: Fraction(p - 1, p**4),
                         lambda p: Fraction(p - 1, p**4)),
}

SLICE_ROWS = tuple(_SLICE_DENSITY)


def _check_odd(p):
    if p == 2:
        raise UnsupportedPrime("the density tables are stated for p >= 3")


def density_splitting(sigma: SplittingType, p: int) -> Fraction:
    _check_odd(p)
    if sigma.is_zero:
        return Fraction(1, p**5)
    return _SPLIT_DENSITY[sigma](p)


def density_slice(sigma: SplittingType, maximal: bool, p: int, k: int) -> Fraction:
    _check_odd(p)
    if (sigma, maximal) not in _SLICE_DENSITY:
        raise KeyError(f"no slice density for {sigma} maximal={maximal}")
    return _SLICE_DENSITY[(sigma, maximal)][min(k, 2)](p)


# --- brute force oracles ------------------------------------------------

@lru_cache(maxsize=None)
def brute_force_splitting(p: int) -> dict:
    """Exact densities of every splitting type over V(F_p), classifying each projective class."""
    counts = {}
    for lead in range(5):
        # forms whose first nonzero coefficient sits at position `lead` and equals 1
        for rest in itertools.product(range(p), repeat=4 - lead):
            f = QuarticForm(*([0] * lead + [1] + list(rest)))
            s = splitting_type(f, p)
            counts[s] = counts.get(s, 0) + (p - 1)
    counts[ZERO] = 1
    total = p**5
    assert sum(counts.values()) == total
    return {s: Fraction(c, total) for s, c in counts.items()}


def _mod_p_classes(p: int, a: int):
    """Splitting type and multiple roots of every (a, b, c, d, e) with b..e in [0, p)."""
    out = {}
    for bcde in itertools.product(range(p), repeat=4):
        f = QuarticForm(a, *bcde)
        s = splitting_type(f, p)
        out[bcde] = (s, multiple_roots(f, p) if s in MAX_TYPES else [])
    return out


def brute_force_slice(p: int, k: int, unit: int = 1) -> dict:
    """Exact slice densities {(sigma, maximal): nu} over a = p^k * unit, enumerating b..e mod p^2."""
    _check_odd(p)
    a = p**k * unit
    p2 = p * p
    counts: dict = {}
    lifts = np.array(list(itertools.product(range(p), repeat=4)), dtype=np.int64)
    for bcde, (s, roots) in _mod_p_classes(p, a).items():
        counts[(s, False)] = counts.get((s, False), 0) + p**4
        if s not in MAX_TYPES:
            continue
        coeffs = np.array(bcde, dtype=np.int64)[None, :] + p * lifts  # b, c, d, e mod p^2
        ok = np.ones(len(lifts), dtype=bool)
        for x, y in roots:
            mon = np.array([x**3 * y, x**2 * y**2, x * y**3, y**4], dtype=np.int64) % p2
            val = (a * x**4 + coeffs @ mon) % p2
            ok &= val != 0
        counts[(s, True)] = counts.get((s, True), 0) + int(ok.sum())
    total = p**8
    return {key: Fraction(c, total) for key, c in counts.items()}
