"""The coset weight m_p: integral points of the PGL_2(Q_p)-class of f, level by level."""
from __future__ import annotations

from functools import lru_cache

from ..arith import valuation
from ..forms import QuarticForm, ScaledMap, invariants, substitute


@lru_cache(maxsize=None)
def hermite_reps(p: int, k: int) -> tuple:
    """Representatives of PGL_2(Z_p) \\ C^(k): primitive [[p^a, b], [0, p^c]], a + c = k, 0 <= b < p^c."""
    if k == 0:
        return (ScaledMap(1, 0, 0, 1),)
    out = []
    for a in range(k + 1):
        c = k - a
        for b in range(p**c):
            if a and c and b % p == 0:
                continue  # not primitive
            out.append(ScaledMap(p**a, b, 0, p**c))
    return tuple(out)


def _integral_under(f: QuarticForm, g: ScaledMap, modulus: int) -> bool:
    # act(g, f) = f(adj(g) v) / det(g)^2, here det(g)^2 = modulus up to a unit
    coeffs = substitute(f, g.m22, -g.m12, -g.m21, g.m11)
    return all(v % modulus == 0 for v in coeffs)


def mp_level(f: QuarticForm, p: int, k: int) -> int:
    if k == 0:
        return 1
    mod = p ** (2 * k)
    return sum(1 for g in hermite_reps(p, k) if _integral_under(f, g, mod))


def mp_levels(f: QuarticForm, p: int) -> list:
    delta = invariants(f).delta
    kmax = valuation(delta, p) // 2 if delta else 0
    return [mp_level(f, p, k) for k in range(kmax + 1)]


def mp_total(f: QuarticForm, p: int) -> int:
    return sum(mp_levels(f, p))


def _p1_points(p: int, k: int):
    """P^1(Z/p^k) as primitive vectors."""
    n = p**k
    for x in range(n):
        yield (x, 1)
    for y in range(0, n, p):
        yield (1, y)


def mp_level_lattices(f: QuarticForm, p: int, k: int) -> int:
    """Oracle: count index-p^k cyclic sublattices L = Z_p u + p^k Z_p^2 with f integral on L."""
    if k == 0:
        return 1
    n = p**k
    mod = p ** (2 * k)
    count = 0
    for u in _p1_points(p, k):
        # columns u and p^k e, where (u, e) is a basis of Z_p^2
        basis = (u[0], n, u[1], 0) if u[1] == 1 else (u[0], 0, u[1], n)
        coeffs = substitute(f, *basis)
        if all(v % mod == 0 for v in coeffs):
            count += 1
    return count
