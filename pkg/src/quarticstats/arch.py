"""Real periods of y^2 = x^3 - (I/3) x - J/27 and the archimedean constants built from them."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import DegenerateDiscriminant, NonConvergence

DPS = 60


@dataclass(frozen=True)
class PeriodValue:
    value: mp.mpf
    method: str  # "agm" or "quadrature"
    error_estimate: float

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class RegionConstant:
    name: str
    value: float
    method: str
    error_estimate: float
    exact: Fraction | None = None
    method_b: str | None = None
    value_b: float | None = None

    @property
    def agreement(self) -> float | None:
        if self.value_b is None:
            return None
        return abs(self.value - self.value_b) / abs(self.value)


def _mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _roots(I, J):
    """Real roots (descending) and, when there is one, a complex root with positive imaginary part."""
    I, J = _mpf(I), _mpf(J)
    disc = 4 * I**3 - J**2
    if disc == 0:
        raise DegenerateDiscriminant(f"({I},{J})")
    if disc > 0:
        # three real roots: trigonometric form of x^3 - p x - q with p = I/3, q = J/27
        r = 2 * mp.sqrt(I) / 3
        phi = mp.acos(J / (2 * I * mp.sqrt(I)))  # J / (2 I^{3/2}) lies in (-1, 1)
        es = sorted((r * mp.cos((phi - 2 * mp.pi * k) / 3) for k in range(3)), reverse=True)
        return es, None
    # one real root, by Cardano; the other two are -e1/2 +- i t
    p, q = I / 3, J / 27
    rad = q * q / 4 - p**3 / 27
    if rad <= 0:
        raise NonConvergence("roots collide at working precision")
    s = mp.sqrt(rad)
    e1 = _real_cbrt(q / 2 + s) + _real_cbrt(q / 2 - s)
    t2 = 3 * e1 * e1 / 4 - p
    if t2 <= 0:
        raise NonConvergence("roots collide at working precision")
    t = mp.sqrt(t2)
    return [e1], mp.mpc(-e1 / 2, t)


def _real_cbrt(x):
    return mp.cbrt(x) if x >= 0 else -mp.cbrt(-x)


def _period_agm(I, J):
    es, z2 = _roots(I, J)
    if z2 is None:
        e1, e2, e3 = es
        if e1 - e2 <= 0:
            raise NonConvergence("roots collide at working precision")
        # two components, each contributing pi / AGM
        return 2 * mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
    z = mp.sqrt(es[0] - z2)
    if mp.im(z2) <= 0 or mp.re(z) <= 0:
        raise NonConvergence("roots collide at working precision")
    return mp.pi / mp.agm(abs(z), mp.re(z))


def _period_quad(I, J):
    I, J = _mpf(I), _mpf(J)
    es, z2 = _roots(I, J)
    e1 = es[0]

    def unbounded(u):
        # x = e1 + u^2 removes the endpoint singularity; the cubic is (x - e1) q(x)
        x = e1 + u * u
        return 2 / mp.sqrt(x * x + e1 * x + e1 * e1 - I / 3)

    pts = [0, 1, 10, mp.inf]
    if z2 is not None and mp.re(z2) > e1:
        # the complex pair sits above the real axis to the right of e1: a near-singular bump
        pts = sorted(set(pts[:-1]) | {mp.sqrt(mp.re(z2) - e1)}) + [mp.inf]
    val, err = mp.quad(unbounded, pts, error=True)
    if z2 is None:
        _, e2, e3 = es

        def egg(t):
            # x = e3 + (e2 - e3) sin^2 t
            x = e3 + (e2 - e3) * mp.sin(t) ** 2
            return 2 / mp.sqrt(e1 - x)

        v2, err2 = mp.quad(egg, [0, mp.pi / 4, mp.pi / 2], error=True)
        val, err = val + v2, err + err2
    return val, float(err)


def real_period(I, J, method: str = "agm", dps: int = DPS) -> PeriodValue:
    with mp.workdps(dps):
        if method == "agm":
            v = _period_agm(I, J)
            return PeriodValue(+v, "agm", float(mp.mpf(10) ** (5 - dps) * abs(v)))
        if method == "quadrature":
            v, err = _period_quad(I, J)
            return PeriodValue(+v, "quadrature", max(err, float(mp.mpf(10) ** (5 - dps) * abs(v))))
    raise ValueError(method)


def real_period_checked(I, J, dps: int = 30, rtol: float = 1e-20) -> PeriodValue:
    """AGM value certified against the quadrature oracle."""
    a = real_period(I, J, "agm", dps)
    q = real_period(I, J, "quadrature", dps)
    tol = max(a.error_estimate, q.error_estimate, rtol * abs(float(a.value)))
    if abs(a.value - q.value) > tol:
        raise NonConvergence(f"agm {a.value} vs quadrature {q.value} at ({I},{J})")
    return a


def omega_tilde(I, J, method: str = "agm", dps: int = DPS) -> PeriodValue:
    p, m = real_period(I, J, method, dps), real_period(I, -J, method, dps)
    return PeriodValue(p.value + m.value, method, p.error_estimate + m.error_estimate)


# --- vectorised float version (for Monte Carlo) ---

def _agm_np(a, b, iters=40):
    for _ in range(iters):
        a, b = (a + b) / 2, np.sqrt(a * b)
    return a


def omega_tilde_np(I, J):
    I = np.asarray(I, dtype=float)
    J = np.asarray(J, dtype=float)
    return _period_np(I, J) + _period_np(I, -J)


def _period_np(I, J):
    out = np.empty(np.broadcast(I, J).shape)
    I, J = np.broadcast_arrays(I, J)
    pos = 4 * I**3 > J**2
    if pos.any():
        Ip, Jp = I[pos], J[pos]
        r = 2 * np.sqrt(Ip) / 3
        phi = np.arccos(np.clip(Jp / (2 * Ip * np.sqrt(Ip)), -1, 1))
        e = np.sort(np.stack([r * np.cos((phi - 2 * np.pi * k) / 3) for k in range(3)]), axis=0)
        e3, e2, e1 = e
        out[pos] = 2 * np.pi / _agm_np(np.sqrt(e1 - e3), np.sqrt(np.maximum(e1 - e2, 0)))
    neg = ~pos
    if neg.any():
        In, Jn = I[neg], J[neg]
        # Cardano: the real root of x^3 - p x - q
        p, q = In / 3, Jn / 27
        s = np.sqrt(q * q / 4 - p**3 / 27)
        e1 = np.cbrt(q / 2 + s) + np.cbrt(q / 2 - s)
        # the other two roots are -e1/2 +- i t with t^2 = 3e1^2/4 - p
        t = np.sqrt(np.maximum(3 * e1 * e1 / 4 - p, 0))
        w = (1.5 * e1) + 1j * t  # e1 - e2
        z = np.sqrt(w)
        out[neg] = np.pi / _agm_np(np.abs(z), z.real)
    return out


# --- constants -----------------------------------------------------------

C56_EXACT = {"C56_pos": Fraction(8, 5), "C56_neg": Fraction(32, 5)}


def _c56_numeric(name):
    # area of {|I| < 1, |J| < 2} with 4 I^3 > J^2 is the integral of 4 I^{3/2} over (0, 1)
    pos = mp.quad(lambda i: 4 * i ** mp.mpf(1.5), [0, 1])
    return pos if name == "C56_pos" else 8 - pos


def _integrand(dps):
    def om(i, j):
        try:
            return omega_tilde(i, j, "agm", dps).value
        except (DegenerateDiscriminant, NonConvergence):
            # a node rounded onto 4I^3 = J^2; the singularity is logarithmic so its weight is negligible
            return mp.mpf(0)
    return om


def _c34_boundary(sign: int, dps: int = 20):
    """Scaling (I, J) -> (t^2 I, t^3 J) multiplies the period by t^{-1/2} and H by t^6, so the
    region integral collapses onto the boundary of the box: (2/9) times the integral of
    Omega~ |2 I dJ - 3 J dI| along the box edges lying in the region."""
    with mp.workdps(dps):
        om = _integrand(dps)

        if sign > 0:
            # only the side I = 1, |J| < 2 is in Delta > 0; Omega~ is even in J
            edge = mp.quad(lambda j: om(1, j), [0, 1, 2], error=True)
            val = mp.mpf(2) / 9 * 2 * 2 * edge[0]
            return val, float(mp.mpf(2) / 9 * 4 * edge[1])
        side = mp.quad(lambda j: om(-1, j), [0, 1, 2], error=True)  # I = -1, weight 2, doubled by evenness
        top = mp.quad(lambda i: om(i, 2), [-1, 0, 1], error=True)  # J = +-2, weight 6 each, equal by evenness
        val = mp.mpf(2) / 9 * (2 * 2 * side[0] + 6 * 2 * top[0])
        return val, float(mp.mpf(2) / 9 * (4 * side[1] + 12 * top[1]))


def _de_nodes(n: int, tmax: float = 3.2):
    """Tanh-sinh nodes and weights on (0, 1)."""
    t = np.linspace(-tmax, tmax, n)
    h = t[1] - t[0]
    u = np.pi / 2 * np.sinh(t)
    w = h * np.pi / 4 * np.cosh(t) / np.cosh(u) ** 2
    x = 1 / (1 + np.exp(-2 * u))
    return x, w


def _grid_integral(fn, n):
    # fn on the unit square, with double-exponential clustering at every edge
    x, w = _de_nodes(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    with np.errstate(all="ignore"):
        v = fn(X, Y)
    ok = np.isfinite(v)  # nodes that round onto 4I^3 = J^2 carry negligible weight
    return float((v[ok] * W[ok]).sum())


def _c34_area(sign: int, n: int = 401):
    """Direct tensor quadrature over the region in double precision, mapped so that the curve
    4I^3 = J^2, where the integrand is logarithmically singular, sits on cell edges.

    The error estimate is the change against a grid with about half the nodes."""

    def total(m):
        # the integrand is even in J, so only J > 0 is integrated and doubled
        if sign > 0:
            def f(x, y):  # I in (0, 1), J = 2 I^{3/2} y
                b = 2 * x**1.5
                return 2 * b * omega_tilde_np(x, b * y)
            return _grid_integral(f, m)

        def left(x, y):  # I in (-1, 0), J in (0, 2)
            return 2 * 2 * omega_tilde_np(-x, 2 * y)

        def right(x, y):  # I in (0, 1), J in (2 I^{3/2}, 2)
            b = 2 * x**1.5
            return 2 * (2 - b) * omega_tilde_np(x, b + (2 - b) * y)
        return _grid_integral(left, m) + _grid_integral(right, m)

    val = total(n)
    return val, abs(val - total(n // 2 + 1))


def _c34_monte_carlo(sign: int, n: int, seed: int):
    rng = np.random.default_rng(seed)
    total, sq, m = 0.0, 0.0, 0
    chunk = 10**6
    while m < n:
        k = min(chunk, n - m)
        I = rng.uniform(-1, 1, k)
        J = rng.uniform(-2, 2, k)
        d = 4 * I**3 - J**2
        v = np.where(np.sign(d) == sign, omega_tilde_np(I, J), 0.0)
        total += v.sum()
        sq += (v * v).sum()
        m += k
    mean = total / n
    var = sq / n - mean * mean
    return 8 * mean, 8 * float(np.sqrt(var / n))


def region_constant(name: str, check: bool = True, mc_samples: int = 0, seed: int = 0,
                    rtol: float = 1e-4) -> RegionConstant:
    """C56 exactly (with a numeric check) or C34 by the boundary reduction, cross-checked by
    direct area quadrature (check=True) or, if mc_samples > 0, by Monte Carlo."""
    if name in C56_EXACT:
        ex = C56_EXACT[name]
        num = _c56_numeric(name)
        err = abs(float(num) - float(ex))
        if err > 1e-10:
            raise NonConvergence(f"{name}: {num} vs {ex}")
        return RegionConstant(name, float(ex), "exact", err, ex, "quadrature", float(num))
    if name not in ("C34_pos", "C34_neg"):
        raise ValueError(f"unknown constant {name!r}")
    sign = 1 if name == "C34_pos" else -1
    va, ea = _c34_boundary(sign)
    va = float(va)
    vb = method_b = None
    if mc_samples:
        vb, eb = _c34_monte_carlo(sign, mc_samples, seed)
        method_b = "monte-carlo"
        if abs(vb - va) > 5 * eb + rtol * va:
            raise NonConvergence(f"{name}: boundary {va} vs Monte Carlo {vb} +- {eb}")
    elif check:
        vb, eb = _c34_area(sign)
        method_b = "area-quadrature"
        if abs(vb - va) > rtol * va:
            raise NonConvergence(f"{name}: boundary {va} vs area {vb}")
    return RegionConstant(name, va, "boundary-quadrature", max(ea, 1e-15), None, method_b,
                          None if vb is None else float(vb))


def zeta_half() -> mp.mpf:
    with mp.workdps(40):
        return +mp.zeta(mp.mpf(1) / 2)


def zeta_two() -> mp.mpf:
    with mp.workdps(40):
        return mp.pi**2 / 6
