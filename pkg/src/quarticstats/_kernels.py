"""numba loops for orbit enumeration; everything here is int64 and overflow-checked by the callers."""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _norm(a, b, c, d, e):
    return 12 * a * a + 3 * b * b + 2 * c * c + 3 * d * d + 12 * e * e


@njit(cache=True)
def _tnorm(a, b, c, d, e, k):
    return _norm(a, b + 4 * a * k, c + 3 * b * k + 6 * a * k * k,
                 d + 2 * c * k + 3 * b * k * k + 4 * a * k * k * k,
                 e + d * k + c * k * k + b * k * k * k + a * k * k * k * k)


@njit(cache=True)
def _local_min(a, b, c, d, e):
    n = _norm(a, b, c, d, e)
    if _tnorm(a, b, c, d, e, 1) < n or _tnorm(a, b, c, d, e, -1) < n:
        return False
    if _tnorm(e, -d, c, -b, a, 1) < n or _tnorm(e, -d, c, -b, a, -1) < n:
        return False
    return True


@njit(cache=True)
def _isqrt(x):
    r = np.int64(math.sqrt(float(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@njit(cache=True)
def _fdiv(p, q):  # floor(p / q), q > 0
    return p // q


@njit(cache=True)
def _cdiv(p, q):
    return -((-p) // q)


@njit(cache=True)
def _emit(out, n, a, b, c, d, e):
    if n < out.shape[0]:
        out[n, 0] = a
        out[n, 1] = b
        out[n, 2] = c
        out[n, 3] = d
        out[n, 4] = e
    return n + 1


@njit(cache=True)
def box_search(X, lam, alo, ahi, kb, kc, kd, kb0, out):
    """Local norm minima f with b >= 0, |a| <= |e|, H(f) < X, alo <= |a| <= ahi, inside the box.

    The a = 0 slice is searched when alo == 0.  Returns the number found (may exceed len(out)).
    """
    n = 0
    imax = X
    jsq = 4 * X
    ibound = np.int64(round(X ** (1.0 / 3.0))) + 1  # |I| <= ibound covers |I|^3 < X
    cmax = np.int64(kc * lam) + 1
    for aa in range(max(alo, 1), ahi + 1):
        bmax = np.int64(kb * math.sqrt(lam * aa)) + 2 * aa
        dmax = np.int64(kd * lam * math.sqrt(lam / aa)) + 1
        for sa in (-1, 1):
            a = sa * aa
            for b in range(0, bmax + 1):
                for c in range(-cmax, cmax + 1):
                    for d in range(-dmax, dmax + 1):
                        base = 3 * b * d - c * c  # 12 a e = I + base
                        lo = -ibound + base
                        hi = ibound + base
                        q = 12 * aa
                        if sa > 0:
                            elo = _cdiv(lo, q)
                            ehi = _fdiv(hi, q)
                        else:
                            elo = _cdiv(-hi, q)
                            ehi = _fdiv(-lo, q)
                        for e in range(elo, ehi + 1):
                            if e < aa and e > -aa:
                                continue
                            I = 12 * a * e - 3 * b * d + c * c
                            if I * I * I >= imax or -I * I * I >= imax:
                                continue
                            J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c
                            if J * J >= jsq or 4 * I * I * I == J * J:
                                continue
                            if _local_min(a, b, c, d, e):
                                n = _emit(out, n, a, b, c, d, e)
    # a = 0: I = c^2 - 3bd and J = 9bcd - 27eb^2 - 2c^3; b = 0 forces a double root at infinity
    bmax0 = np.int64(kb0 * lam) + 1 if alo == 0 else 0
    for b in range(1, bmax0 + 1):
        for c in range(-cmax, cmax + 1):
            # d from the I window
            lo = c * c - ibound
            hi = c * c + ibound
            dlo = _cdiv(lo, 3 * b)
            dhi = _fdiv(hi, 3 * b)
            for d in range(dlo, dhi + 1):
                I = c * c - 3 * b * d
                if I * I * I >= imax or -I * I * I >= imax:
                    continue
                jb = _isqrt(jsq) + 1
                base = 9 * b * c * d - 2 * c * c * c  # 27 e b^2 = base - J
                q = 27 * b * b
                elo = _cdiv(base - jb, q)
                ehi = _fdiv(base + jb, q)
                for e in range(elo, ehi + 1):
                    J = base - 27 * e * b * b
                    if J * J >= jsq or 4 * I * I * I == J * J:
                        continue
                    if _local_min(0, b, c, d, e):
                        n = _emit(out, n, 0, b, c, d, e)
    return n


@njit(cache=True)
def fiber_search(I, J, amax, cmax, out):
    """All (a, b, c, d, e) with invariants (I, J), 1 <= |a| <= amax, 0 <= b <= 2|a|, |c| <= cmax.

    For each (a, b, c) the syzygy H^3 - 48 I a^2 H + 64 J a^3 = -27 R^2 with H = 8ac - 3b^2
    determines R = b^3 + 8a^2 d - 4abc up to sign, hence d and then e.
    """
    n = 0
    for aa in range(1, amax + 1):
        for sa in (-1, 1):
            a = sa * aa
            a2 = a * a
            a3 = a2 * a
            for b in range(0, 2 * aa + 1):
                for c in range(-cmax, cmax + 1):
                    if (c * c - I) % 3 != 0:
                        continue
                    H = 8 * a * c - 3 * b * b
                    Q = -(H * H * H - 48 * I * a2 * H + 64 * J * a3)
                    if Q < 0 or Q % 27 != 0:
                        continue
                    r2 = Q // 27
                    R = _isqrt(r2)
                    if R * R != r2:
                        continue
                    for sgn in (1, -1):
                        if sgn < 0 and R == 0:
                            break
                        num = sgn * R - b * b * b + 4 * a * b * c
                        if num % (8 * a2) != 0:
                            continue
                        d = num // (8 * a2)
                        num2 = I + 3 * b * d - c * c
                        if num2 % (12 * a) != 0:
                            continue
                        e = num2 // (12 * a)
                        if 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c != J:
                            continue
                        n = _emit(out, n, a, b, c, d, e)
    return n


@njit(cache=True)
def pairing_hist(M, v, n, hist):
    """hist[a] += #{g : sum_j M[g, j] v[j] = a mod n}; M rows are flattened 5x5 action matrices."""
    for g in range(M.shape[0]):
        s = 0
        for j in range(M.shape[1]):
            s += np.int64(M[g, j]) * v[j]
        hist[s % n] += 1
