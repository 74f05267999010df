"""Local solubility of z^2 = f(x, y) over Q_p and R."""
from __future__ import annotations

from math import comb

from ..arith import valuation
from ..errors import DegenerateDiscriminant
from ..forms import QuarticForm, SignatureClass, invariants, signature


def is_qp_square(n: int, p: int) -> bool:
    """Is the integer n a square in Q_p (0 counts)."""
    if n == 0:
        return True
    v = valuation(n, p)
    if v % 2:
        return False
    u = n // p**v
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1


def _taylor(poly_low, x0, scale):
    """Coefficients of g(x0 + scale*t) in t, g given lowest degree first."""
    n = len(poly_low)
    out = []
    for i in range(n):
        ci = sum(comb(j, i) * poly_low[j] * x0 ** (j - i) for j in range(i, n))
        out.append(ci * scale**i)
    return out


def _class_soluble(poly_low, p, x0, n, stats, depth=0):
    """Decide whether some t in Z_p makes g(x0 + p^n t) a Q_p square."""
    stats["max_depth"] = max(stats["max_depth"], n)
    c = _taylor(poly_low, x0, p**n)
    c0 = c[0]
    if is_qp_square(c0, p):
        return True
    v0 = valuation(c0, p)
    # Hensel: a simple root of g near x0
    g1 = c[1] // p**n if len(c) > 1 else 0
    if g1 and v0 > 2 * valuation(g1, p):
        return True
    slack = 3 if p == 2 else 1
    if all(ci == 0 or valuation(ci, p) >= v0 + slack for ci in c[1:]):
        # the whole class shares the square class of c0, which is not a square
        return False
    return any(_class_soluble(poly_low, p, x0 + j * p**n, n + 1, stats) for j in range(p))


def lp_decide(f: QuarticForm, p: int) -> tuple:
    """(soluble, depth) where depth is the largest p-adic precision the descent needed."""
    if invariants(f).delta == 0:
        raise DegenerateDiscriminant(str(f))
    a, b, c, d, e = f.coeffs
    stats = {"max_depth": 0}
    g = [e, d, c, b, a]  # f(x, 1), lowest first
    h = [a, b, c, d, e]  # f(1, y), lowest first
    ok = _class_soluble(g, p, 0, 0, stats) or _class_soluble(h, p, 0, 1, stats)
    return int(ok), stats["max_depth"]


def lp_soluble(f: QuarticForm, p: int) -> int:
    return lp_decide(f, p)[0]


def linf_soluble(f: QuarticForm) -> int:
    return int(signature(f) is not SignatureClass.class2minus)


def lp_point_search(f: QuarticForm, p: int, N: int) -> int:
    """Oracle: 1 if some point (x:1), x < p^N, or (1:y), p | y < p^N, gives a Q_p square value."""
    for x in range(p**N):
        if is_qp_square(f(x, 1), p):
            return 1
    for y in range(0, p**N, p):
        if is_qp_square(f(1, y), p):
            return 1
    return 0
