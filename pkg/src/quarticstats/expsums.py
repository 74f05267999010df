"""Quadratic Gauss sums, orbital exponential sums over PGL_2(Z/p^k) and Fourier transforms of
functions on V(Z/n).  Everything is direct summation; the group is enumerated explicitly."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import InfeasibleSize

# p = 13, k = 2 is the largest case we sum directly: |PGL_2(Z/169)| * 169
BUDGET = 13**3 * 13 * 168 * 169
_CHUNK = 1 << 20


class ComplexAccumulator:
    """Compensated complex sum; adding a batch uses math.fsum (correctly rounded)."""

    def __init__(self):
        self._re = []
        self._im = []

    def add(self, z):
        self._re.append(float(z.real))
        self._im.append(float(z.imag))

    def add_many(self, zs):
        zs = np.asarray(zs, dtype=complex)
        self._re.append(math.fsum(zs.real))
        self._im.append(math.fsum(zs.imag))

    def merge(self, other: "ComplexAccumulator"):
        self._re.append(math.fsum(other._re))
        self._im.append(math.fsum(other._im))

    @property
    def value(self) -> complex:
        return complex(math.fsum(self._re), math.fsum(self._im))


def _units(n: int) -> np.ndarray:
    t = np.arange(n)
    return t[np.gcd(t, n) == 1]


@lru_cache(maxsize=None)
def gauss_table(p: int, k: int) -> np.ndarray:
    """Q_{p^k}(a) for every residue a."""
    n = p**k
    t2 = _units(n) ** 2 % n
    out = np.empty(n, dtype=complex)
    for a in range(n):
        acc = ComplexAccumulator()
        acc.add_many(np.exp(2j * np.pi * (t2 * a % n) / n))
        out[a] = acc.value / len(t2)
    return out


def gauss_sum(a: int, p: int, k: int) -> complex:
    """(1/|GL_1|) sum over units t of e(t^2 a / p^k)."""
    if p**k < 2:
        raise ValueError("need p^k >= 2")
    return complex(gauss_table(p, k)[a % p**k])


def gauss_regime(a: int, p: int, k: int) -> tuple:
    """(label, exponent e) with |Q(a)| expected << p^-e."""
    n = p**k
    a %= n
    if a == 0:
        return "a=0", 0.0
    if a % p ** (k - 1) == 0:
        return "p^(k-1)|a", 0.5
    return "generic", 1.0


# --- the group ------------------------------------------------------------

def pgl2_order(p: int, k: int) -> int:
    return p ** (3 * (k - 1)) * p * (p * p - 1)


@dataclass
class ModularGroupTable:
    """PGL_2(Z/p^k), one matrix per class: scaled so the first unit entry of the first column is 1."""
    p: int
    k: int
    elements: np.ndarray  # (N, 4) rows m11, m12, m21, m22

    @classmethod
    def build(cls, p: int, k: int, budget: int = BUDGET) -> "ModularGroupTable":
        n = p**k
        if pgl2_order(p, k) * n > budget:
            raise InfeasibleSize(f"PGL_2(Z/{p}^{k}) exceeds the summation budget")
        r = np.arange(n, dtype=np.int64)
        units = _units(n).astype(np.int64)
        nonunits = r[r % p == 0]
        # m11 = 1: m21, m12 free, det = m22 - m12 m21 a unit
        m21, m12, u = np.meshgrid(r, r, units, indexing="ij")
        m22 = (u + m12 * m21) % n
        first = np.stack([np.ones_like(m21), m12, m21, m22], axis=-1).reshape(-1, 4)
        # m11 in pZ, m21 = 1: det = m11 m22 - m12 is a unit iff m12 is
        m11, m12, m22 = np.meshgrid(nonunits, units, r, indexing="ij")
        second = np.stack([m11, m12, np.ones_like(m11), m22], axis=-1).reshape(-1, 4)
        dtype = np.int16 if n < 2**15 else np.int64
        els = np.concatenate([first, second]).astype(dtype)
        return cls(p, k, els)

    def __len__(self):
        return len(self.elements)

    @property
    def expected_order(self) -> int:
        return pgl2_order(self.p, self.k)


@lru_cache(maxsize=8)
def group_table(p: int, k: int) -> ModularGroupTable:
    return ModularGroupTable.build(p, k)


def _inverse_table(n: int) -> np.ndarray:
    inv = np.zeros(n, dtype=np.int64)
    for u in range(1, n):
        if math.gcd(u, n) == 1:
            inv[u] = pow(u, -1, n)
    return inv


def _pmul(P, Q, n):
    # P, Q: (N, dp), (N, dq) coefficient arrays; returns (N, dp + dq - 1) mod n
    out = np.zeros((P.shape[0], P.shape[1] + Q.shape[1] - 1), dtype=np.int64)
    for i in range(P.shape[1]):
        for j in range(Q.shape[1]):
            out[:, i + j] += P[:, i] * Q[:, j]
    return out % n


def monomial_images(g: np.ndarray, n: int) -> np.ndarray:
    """(N, 5, 5): [:, i, j] is coefficient i of g applied to the j-th monomial x^(4-j) y^j, mod n."""
    g = g.astype(np.int64)
    m11, m12, m21, m22 = g.T
    X = np.stack([m22 % n, -m12 % n], axis=1)
    Y = np.stack([-m21 % n, m11 % n], axis=1)
    N = g.shape[0]
    xp = [np.ones((N, 1), dtype=np.int64)]
    yp = [np.ones((N, 1), dtype=np.int64)]
    for _ in range(4):
        xp.append(_pmul(xp[-1], X, n))
        yp.append(_pmul(yp[-1], Y, n))
    det = (m11 * m22 - m12 * m21) % n
    dinv = _inverse_table(n)[det]
    scale = (dinv * dinv % n)[:, None]
    return np.stack([_pmul(xp[4 - j], yp[j], n) * scale % n for j in range(5)], axis=2)


def act_mod(g: np.ndarray, f, n: int) -> np.ndarray:
    """act(g, f) mod n for a batch of matrices g (N, 4) with unit determinant; f is 5 residues."""
    f = np.asarray(f, dtype=np.int64) % n
    return monomial_images(g, n) @ f % n


def pairing_weights(p: int, k: int, pairing: str = "auto") -> np.ndarray:
    """Coefficient weights of [f, h]: the invariant pairing (1, 1/4, 1/6, 1/4, 1) for p >= 5,
    the plain coordinate pairing otherwise (or when asked)."""
    n = p**k
    if pairing == "auto":
        pairing = "invariant" if p >= 5 else "plain"
    if pairing == "plain":
        return np.ones(5, dtype=np.int64)
    if pairing != "invariant":
        raise ValueError(f"unknown pairing {pairing!r}")
    if p in (2, 3):
        raise ValueError("the invariant pairing needs 4 and 6 invertible")
    i4, i6 = pow(4, -1, n), pow(6, -1, n)
    return np.array([1, i4, i6, i4, 1], dtype=np.int64)


@lru_cache(maxsize=2)
def action_matrices(p: int, k: int) -> np.ndarray:
    """(N, 25): row g holds the matrix of f -> g f on coefficients, entry (i, j) at 5 i + j."""
    n = p**k
    els = group_table(p, k).elements
    out = np.empty((len(els), 25), dtype=np.int16 if n < 2**15 else np.int64)
    for s in range(0, len(els), _CHUNK):
        blk = els[s:s + _CHUNK]
        out[s:s + len(blk)] = monomial_images(blk, n).reshape(len(blk), 25)
    return out


def pairing_values(f, h, p: int, k: int, pairing: str = "auto") -> np.ndarray:
    """Histogram over a mod p^k of #{g in PGL_2 : [g f, h] = a}."""
    n = p**k
    w = pairing_weights(p, k, pairing) * (np.asarray(h, dtype=np.int64) % n) % n
    f = np.asarray(f, dtype=np.int64) % n
    v = np.outer(w, f).reshape(-1) % n  # [g f, h] = sum_ij w_i h_i M_ij f_j
    hist = np.zeros(n, dtype=np.int64)
    _kernels.pairing_hist(action_matrices(p, k), v, n, hist)
    return hist


def orbital_sum(f, h, p: int, k: int, pairing: str = "auto", budget: int = BUDGET) -> complex:
    """G_{p^k}(f, h): the average over t in GL_1 and g in PGL_2 of e(t^2 [g f, h] / p^k)."""
    n = p**k
    if pgl2_order(p, k) * n > budget:
        raise InfeasibleSize(f"orbital sum at {p}^{k} exceeds the budget")
    hist = pairing_values(f, h, p, k, pairing)
    acc = ComplexAccumulator()
    acc.add_many(hist * gauss_table(p, k))
    return acc.value / pgl2_order(p, k)


def h_regime(h, p: int, k: int) -> tuple:
    """(label, exponent) of the bound |G(f, h)| << p^-exponent."""
    n = p**k
    h = [x % n for x in h]
    if not any(h):
        return "h=0", 0.0
    if all(x % p ** (k - 1) == 0 for x in h):
        return "h in p^(k-1)V*", 0.5
    return "generic", 1.0


# --- Fourier transforms ---------------------------------------------------

def all_forms(n: int) -> np.ndarray:
    r = np.arange(n, dtype=np.int64)
    return np.stack(np.meshgrid(r, r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 5)


def disc_mod(F: np.ndarray, n: int) -> np.ndarray:
    """Discriminant of a batch of residue forms mod n; int64 is exact for entries below 60."""
    a, b, c, d, e = (F[:, i].astype(object) if n > 60 else F[:, i] for i in range(5))
    D = (256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
         + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
         - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
         + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2 + 18 * b**3 * c * d * e
         - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2)
    return np.asarray(D % n, dtype=np.int64)


def chi_p2_support(p: int) -> np.ndarray:
    """All f in V(Z/p^2) with p^2 | Delta(f)."""
    n = p * p
    if n > 49:
        raise InfeasibleSize("support enumeration limited to n <= 49")
    out = []
    r = np.arange(n, dtype=np.int64)
    rest = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 4)
    for a in range(n):
        F = np.concatenate([np.full((len(rest), 1), a, dtype=np.int64), rest], axis=1)
        out.append(F[disc_mod(F, n) == 0])
    return np.concatenate(out)


def fourier_point(phi, h, n: int, support: np.ndarray | None = None, weights=None) -> complex:
    """(1/n^5) sum over f in V(Z/n) of phi(f) e([f, h]/n).

    phi is a vectorised function on (N, 5) residue arrays, or None when support is given (then phi
    is the indicator of support).  weights selects the pairing (plain by default).
    """
    if n > 49:
        raise InfeasibleSize("Fourier transforms limited to n <= 49")
    w = np.ones(5, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    hw = w * (np.asarray(h, dtype=np.int64) % n) % n
    acc = ComplexAccumulator()
    if support is not None:
        ph = (support @ hw) % n
        acc.add_many(np.bincount(ph, minlength=n) * np.exp(2j * np.pi * np.arange(n) / n))
        return acc.value / n**5
    r = np.arange(n, dtype=np.int64)
    rest = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 4)
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    for a in range(n):
        F = np.concatenate([np.full((len(rest), 1), a, dtype=np.int64), rest], axis=1)
        vals = np.asarray(phi(F), dtype=float)
        ph = (F @ hw) % n
        acc.add_many(np.bincount(ph, weights=vals, minlength=n) * roots)
    return acc.value / n**5


def coefficient_matrix(g, n: int) -> np.ndarray:
    """5x5 matrix M with act(g, f) = M f mod n."""
    return monomial_images(np.asarray([g], dtype=np.int64), n)[0]


def dual_act(g, h, n: int, weights=None) -> np.ndarray:
    """The h' with [g f, h] = [f, h'] for every f."""
    w = np.ones(5, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    M = coefficient_matrix(g, n)
    hw = w * np.asarray(h, dtype=np.int64) % n
    v = M.T @ hw % n
    winv = np.array([pow(int(x), -1, n) for x in w], dtype=np.int64)
    return v * winv % n


def parseval_gap(phi, n: int) -> float:
    """|n^5 sum_h |phi^(h)|^2 - sum_f |phi(f)|^2|, by direct transforms at every h (small n only)."""
    F = all_forms(n)
    vals = np.asarray(phi(F), dtype=float)
    spec = [abs(fourier_point(phi, h, n)) ** 2 for h in F]
    return abs(n**5 * math.fsum(spec) - math.fsum(vals * vals))


# --- bound surveys --------------------------------------------------------

def random_h(p: int, k: int, regime: str, rng: np.random.Generator) -> np.ndarray:
    n = p**k
    if regime == "h=0":
        return np.zeros(5, dtype=np.int64)
    if regime == "h in p^(k-1)V*":
        q = p ** (k - 1)
        while True:
            h = rng.integers(0, p, 5) * q
            if h.any():
                return h
    while True:
        h = rng.integers(0, n, 5)
        if h_regime(h, p, k)[0] == "generic":
            return h


def random_primitive(p: int, k: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        f = rng.integers(0, p**k, 5)
        if (f % p).any():
            return f


REGIMES = ("h=0", "h in p^(k-1)V*", "generic")


def orbital_survey(p: int, k: int = 2, pairs: int = 200, seed: int = 0) -> dict:
    """For each regime, max over random (f, h) (f not in pV) of |G(f, h)| p^exponent."""
    rng = np.random.default_rng([seed, p, k])
    out = {}
    for reg in REGIMES:
        e = dict(zip(REGIMES, (0.0, 0.5, 1.0)))[reg]
        worst = 0.0
        for _ in range(pairs):
            f = random_primitive(p, k, rng)
            h = random_h(p, k, reg, rng)
            worst = max(worst, abs(orbital_sum(f, h, p, k)) * p**e)
        out[reg] = worst
    return out


def fourier_survey(p: int, samples: int = 200, seed: int = 0) -> dict:
    """The three bounds for the indicator of p^2 | Delta on V(Z/p^2): phi^(0) p^2, and the maxima of
    |phi^(p h)| p^(5/2) and |phi^(h)| p^3 over random h not in pV*."""
    n = p * p
    S = chi_p2_support(p)
    rng = np.random.default_rng([seed, p])
    out = {"h=0": abs(fourier_point(None, np.zeros(5), n, support=S)) * p**2}
    worst_p = worst_g = 0.0
    for _ in range(samples):
        h = random_h(p, 2, "h in p^(k-1)V*", rng)
        worst_p = max(worst_p, abs(fourier_point(None, h, n, support=S)) * p**2.5)
        h = random_h(p, 2, "generic", rng)
        worst_g = max(worst_g, abs(fourier_point(None, h, n, support=S)) * p**3)
    out["ph"] = worst_p
    out["generic"] = worst_g
    return out
