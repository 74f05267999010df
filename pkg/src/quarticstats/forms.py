from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .arith import divisors
from .errors import DegenerateDiscriminant


def _coerce(v):
    if isinstance(v, bool) or not isinstance(v, Rational):
        raise TypeError(f"coefficients must be exact integers or fractions, got {v!r}")
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    return int(v)


@dataclass(frozen=True)
class QuarticForm:
    """a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4, exact coefficients."""

    a: int
    b: int
    c: int
    d: int
    e: int

    def __post_init__(self):
        for name in "abcde":
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    @classmethod
    def parse(cls, text: str) -> "QuarticForm":
        parts = [p.strip() for p in text.replace(" ", "").split(",")]
        if len(parts) != 5:
            raise ValueError(f"expected five comma separated coefficients, got {text!r}")
        return cls(*(Fraction(p) if "/" in p else int(p) for p in parts))

    @classmethod
    def from_json(cls, obj: dict) -> "QuarticForm":
        return cls(*(int(obj[k]) for k in "abcde"))

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.e)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x, y):
        a, b, c, d, e = self.coeffs
        return (((a * x + b * y) * x + c * y * y) * x + d * y ** 3) * x + e * y ** 4

    def __neg__(self):
        return QuarticForm(*(-v for v in self.coeffs))

    def to_json(self) -> dict:
        return dict(zip("abcde", self.coeffs))

    def __str__(self):
        return ",".join(str(v) for v in self.coeffs)


@dataclass(frozen=True)
class InvariantPair:
    I: int
    J: int

    @property
    def delta(self):
        num = 4 * self.I ** 3 - self.J ** 2
        q = Fraction(num, 27) if not isinstance(num, Fraction) else num / 27
        return q.numerator if q.denominator == 1 else q

    @property
    def height(self) -> Fraction:
        return max(Fraction(abs(self.I)) ** 3, Fraction(self.J) ** 2 / 4)

    def __iter__(self):
        yield self.I
        yield self.J


@dataclass(frozen=True)
class ScaledMap:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("singular matrix")

    @property
    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def rows(self):
        return ((self.m11, self.m12), (self.m21, self.m22))

    def __matmul__(self, o: "ScaledMap") -> "ScaledMap":
        return ScaledMap(self.m11 * o.m11 + self.m12 * o.m21, self.m11 * o.m12 + self.m12 * o.m22,
                         self.m21 * o.m11 + self.m22 * o.m21, self.m21 * o.m12 + self.m22 * o.m22)

    def adjugate(self) -> "ScaledMap":
        return ScaledMap(self.m22, -self.m12, -self.m21, self.m11)

    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)


class SignatureClass(enum.Enum):
    class0 = "0"
    class1 = "1"
    class2plus = "2+"
    class2minus = "2-"

    @classmethod
    def parse(cls, text: str) -> "SignatureClass":
        t = str(text).strip().lower().replace("class", "")
        for m in cls:
            if t in (m.value, m.name.replace("class", "")):
                return m
        raise ValueError(f"unknown signature class {text!r}")

    @property
    def sigma(self) -> int:
        # size of the generic stabilizer in the real group, per class
        return 2 if self is SignatureClass.class1 else 4

    @property
    def disc_sign(self) -> int:
        return -1 if self is SignatureClass.class1 else 1


def invariants(f: QuarticForm) -> InvariantPair:
    a, b, c, d, e = f.coeffs
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3
    ij = InvariantPair(I, J)
    if f.is_integral:
        assert isinstance(ij.delta, int), "discriminant of an integral form must be integral"
    return ij


def disc_direct(f: QuarticForm):
    a, b, c, d, e = f.coeffs
    return (256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
            + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
            - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
            + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2 + 18 * b**3 * c * d * e
            - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2)


def _polymul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, u in enumerate(p):
        if u:
            for j, v in enumerate(q):
                out[i + j] += u * v
    return out


def substitute(f: QuarticForm, p, q, r, s) -> list:
    """Coefficients of f(p x + q y, r x + s y), highest power of x first."""
    X = [p, q]
    Y = [r, s]
    xp = [[1]]
    yp = [[1]]
    for _ in range(4):
        xp.append(_polymul(xp[-1], X))
        yp.append(_polymul(yp[-1], Y))
    out = [0] * 5
    for i, c in enumerate(f.coeffs):
        if c:
            term = _polymul(xp[4 - i], yp[i])
            for j in range(5):
                out[j] += c * term[j]
    return out


def act(g: ScaledMap, f: QuarticForm) -> QuarticForm:
    # left action: f(adj(g).(x,y)) / det(g)^2
    out = substitute(f, g.m22, -g.m12, -g.m21, g.m11)
    d2 = g.det ** 2
    if d2 == 1:
        return QuarticForm(*out)
    return QuarticForm(*(Fraction(v, d2) for v in out))


# --- real roots ---------------------------------------------------------


def _trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _polyrem(num, den):
    num = [Fraction(v) for v in num]
    while len(num) >= len(den) and any(num):
        if num[0] == 0:
            num.pop(0)
            continue
        q = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= q * den[i]
        num.pop(0)
    return _trim(num) if num else [Fraction(0)]


def _sign_changes(seq):
    s = [v for v in seq if v != 0]
    return sum(1 for u, v in zip(s, s[1:]) if (u > 0) != (v > 0))


def count_real_roots(poly) -> int:
    """Distinct real roots of an exact univariate polynomial (highest first), via Sturm."""
    p = _trim([Fraction(v) for v in poly])
    n = len(p) - 1
    if n <= 0:
        return 0
    chain = [p, _trim([c * (n - i) for i, c in enumerate(p[:-1])])]
    while len(chain[-1]) > 1:
        r = _polyrem(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-v for v in r])
    at_pos = [q[0] for q in chain]
    at_neg = [q[0] * (-1) ** (len(q) - 1) for q in chain]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def signature(f: QuarticForm) -> SignatureClass:
    if invariants(f).delta == 0:
        raise DegenerateDiscriminant(str(f))
    poly = _trim(list(f.coeffs))
    at_inf = 5 - len(poly)
    r = count_real_roots(poly) + at_inf
    if r == 4:
        return SignatureClass.class0
    if r == 2:
        return SignatureClass.class1
    assert r == 0, r
    return SignatureClass.class2plus if f.a > 0 else SignatureClass.class2minus


def resolvent_cubic(ij: InvariantPair) -> tuple:
    """x^3 - 3I x - J as coefficients, highest first."""
    return (1, 0, -3 * ij.I, -ij.J)


def cubic_disc(g) -> int:
    a, b, c, d = g
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


# --- irreducibility -----------------------------------------------------


def _numeric_roots(coeffs):
    big = max(abs(int(v)) for v in coeffs)
    if big < 2 ** 50:
        return list(np.roots([float(v) for v in coeffs]))
    import mpmath

    with mpmath.workdps(30 + 2 * len(str(big))):
        return [complex(z) for z in mpmath.polyroots([int(v) for v in coeffs], maxsteps=400, extraprec=200)]


def cubic_has_rational_root(g) -> bool:
    one, b, c, d = (int(v) for v in g)
    assert one == 1
    if d == 0:
        return True
    for z in _numeric_roots([1, b, c, d]):
        if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
            continue
        r0 = int(round(z.real))
        for r in (r0 - 1, r0, r0 + 1):
            if ((r + b) * r + c) * r + d == 0:
                return True
    return False


def _divides_form(f, q) -> bool:
    """Does the binary quadratic q = (al, be, ga) divide the quartic f over Q."""
    num = [Fraction(v) for v in f.coeffs]
    den = [Fraction(v) for v in q]
    for i in range(3):
        t = num[i] / den[0]
        for j in range(3):
            num[i + j] -= t * den[j]
    return num[3] == 0 and num[4] == 0


def is_reducible(f: QuarticForm) -> bool:
    """Exact: does f factor over Q (a linear or a quadratic factor)."""
    if not f.is_integral:
        raise ValueError("integral form required")
    a, b, c, d, e = f.coeffs
    if a == 0 or e == 0:
        return True
    roots = _numeric_roots([a, b, c, d, e])
    divs = divisors(abs(a))
    for z in roots:
        if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
            continue
        for q in divs:
            p0 = int(round(z.real * q))
            for p in (p0 - 1, p0, p0 + 1):
                if f(p, q) == 0:
                    return True
    for i, j in ((0, 1), (0, 2), (0, 3)):
        s = roots[i] + roots[j]
        t = roots[i] * roots[j]
        if abs(s.imag) > 1e-6 * max(1.0, abs(s)) or abs(t.imag) > 1e-6 * max(1.0, abs(t)):
            continue
        for al in divs:
            be = int(round(-al * s.real))
            ga = int(round(al * t.real))
            if ga != 0 and _divides_form(f, (al, be, ga)):
                return True
    return False


def is_irreducible(f: QuarticForm) -> bool:
    return not is_reducible(f)


def is_generic(f: QuarticForm) -> bool:
    ij = invariants(f)
    if ij.delta == 0:
        raise DegenerateDiscriminant(str(f))
    if cubic_has_rational_root(resolvent_cubic(ij)):
        return False
    return not is_reducible(f)
