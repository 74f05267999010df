"""Univariate polynomials over F_p (coefficient lists, lowest degree first)."""
from __future__ import annotations

import random


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def deg(f) -> int:
    return len(f) - 1


def reduce(f, p):
    return trim(c % p for c in f)


def add(f, g, p):
    n = max(len(f), len(g))
    return trim(((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n))


def sub(f, g, p):
    return add(f, [-c for c in g], p)


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, u in enumerate(f):
        if u:
            for j, v in enumerate(g):
                out[i + j] = (out[i + j] + u * v) % p
    return trim(out)


def monic(f, p):
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def divmod_(f, g, p):
    f = list(f)
    inv = pow(g[-1], -1, p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        c = f[-1] * inv % p
        s = len(f) - len(g)
        q[s] = c
        for i, v in enumerate(g):
            f[s + i] = (f[s + i] - c * v) % p
        f = trim(f)
    return trim(q), f


def rem(f, g, p):
    return divmod_(f, g, p)[1]


def gcd(f, g, p):
    f, g = trim(f), trim(g)
    while g:
        f, g = g, rem(f, g, p)
    return monic(f, p) if f else []


def powmod(base, e, mod, p):
    result = [1]
    base = rem(base, mod, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), mod, p)
        base = rem(mul(base, base, p), mod, p)
        e >>= 1
    return result


def derivative(f, p):
    return trim(i * c % p for i, c in enumerate(f) if i)


def _pth_root(f, p):
    # f is a polynomial in x^p; over F_p the coefficientwise p-th root is the identity
    return trim(f[i] for i in range(0, len(f), p))


def squarefree_decomposition(f, p):
    """[(g, e)] with f = lc * prod g^e, g monic squarefree and pairwise coprime."""
    f = monic(trim(f), p)
    out = []

    def rec(f, mult):
        if deg(f) <= 0:
            return
        df = derivative(f, p)
        if not df:
            rec(_pth_root(f, p), mult * p)
            return
        c = gcd(f, df, p)
        w = divmod_(f, c, p)[0]
        i = 1
        while deg(w) > 0:
            y = gcd(w, c, p)
            z = divmod_(w, y, p)[0]
            if deg(z) > 0:
                out.append((z, i * mult))
            i += 1
            w = y
            c = divmod_(c, y, p)[0]
        if deg(c) > 0:
            rec(_pth_root(c, p), mult * p)

    rec(f, 1)
    return out


def distinct_degree(f, p):
    """[(g, d)]: g is the product of all irreducible degree-d factors of squarefree monic f."""
    out = []
    x = [0, 1]
    h = x
    d = 0
    while deg(f) >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f, p)
        g = gcd(f, sub(h, x, p), p)
        if deg(g) > 0:
            out.append((g, d))
            f = divmod_(f, g, p)[0]
    if deg(f) > 0:
        out.append((f, deg(f)))
    return out


def equal_degree(f, d, p, rng: random.Random):
    """Split a product of degree-d irreducibles (Cantor-Zassenhaus)."""
    if deg(f) == d:
        return [f]
    n = deg(f)
    while True:
        a = trim([rng.randrange(p) for _ in range(n)])
        if deg(a) < 1:
            continue
        if p == 2:
            t, acc = a, a
            for _ in range(d - 1):
                t = rem(mul(t, t, p), f, p)
                acc = add(acc, t, p)
            cand = acc
        else:
            cand = sub(powmod(a, (p**d - 1) // 2, f, p), [1], p)
        g = gcd(f, cand, p)
        if 0 < deg(g) < n:
            return equal_degree(g, d, p, rng) + equal_degree(divmod_(f, g, p)[0], d, p, rng)


def factor(f, p, seed=None):
    """Monic irreducible factorization [(g, e)] of a nonzero f over F_p."""
    f = reduce(f, p)
    if not f:
        raise ValueError("zero polynomial")
    rng = random.Random(seed if seed is not None else hash((tuple(f), p)))
    out = []
    for g, e in squarefree_decomposition(f, p):
        for h, d in distinct_degree(g, p):
            for q in equal_degree(h, d, p, rng):
                out.append((q, e))
    out.sort(key=lambda t: (len(t[0]), t[0], t[1]))
    return out
