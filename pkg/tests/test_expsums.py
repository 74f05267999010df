import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quarticstats.errors import InfeasibleSize
from quarticstats.expsums import (ComplexAccumulator, ModularGroupTable, act_mod, all_forms,
                                  chi_p2_support, disc_mod, dual_act, fourier_point, gauss_regime,
                                  gauss_sum, group_table, orbital_sum, pairing_values, parseval_gap,
                                  pgl2_order)
from quarticstats.forms import QuarticForm, ScaledMap, act, disc_direct


def legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def gauss_closed(a, p, k):
    # classical evaluation: sum_t e(t^2 a / p) = (a/p) eps_p sqrt(p), eps_p = 1 or i
    n = p**k
    a %= n
    if a == 0:
        return 1
    if k == 2:
        if a % p:
            return 0  # the unit sum is p minus the p terms with p | t
        a //= p
    eps = 1 if p % 4 == 1 else 1j
    return (legendre(a, p) * eps * math.sqrt(p) - 1) / (p - 1)


def test_gauss_examples():
    assert gauss_sum(0, 7, 2) == pytest.approx(1)
    assert gauss_sum(1, 5, 1) == pytest.approx((math.sqrt(5) - 1) / 4, abs=1e-14)
    assert all(abs(gauss_sum(a, 5, 2)) <= 1 / 5 + 1e-12 for a in range(25) if a % 5)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("k", [1, 2])
def test_gauss_closed_form_and_regimes(p, k):
    worst = 0.0
    for a in range(p**k):
        q = gauss_sum(a, p, k)
        assert abs(q - gauss_closed(a, p, k)) < 1e-12
        _, e = gauss_regime(a, p, k)
        worst = max(worst, abs(q) * p**e)
    # one constant for every p: (p + sqrt p) / (p - 1) <= (3 + sqrt 3) / 2
    assert worst <= (3 + math.sqrt(3)) / 2 + 1e-12


def test_accumulator_compensates():
    acc = ComplexAccumulator()
    acc.add_many([1e16, 1.0, -1e16] * 1000)
    acc.add(1j)
    assert acc.value == complex(1000, 1)


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)])
def test_group_enumeration(p, k):
    n = p**k
    G = ModularGroupTable.build(p, k)
    assert len(G) == pgl2_order(p, k) == G.expected_order
    els = G.elements.astype(np.int64)
    det = (els[:, 0] * els[:, 3] - els[:, 1] * els[:, 2]) % n
    assert np.all(det % p != 0)
    units = [u for u in range(n) if math.gcd(u, n) == 1]
    canon = {min(tuple(int(x) * u % n for x in row) for u in units) for row in els}
    assert len(canon) == len(G)


def test_budget():
    with pytest.raises(InfeasibleSize):
        ModularGroupTable.build(17, 2)
    with pytest.raises(InfeasibleSize):
        orbital_sum((1, 0, 0, 0, 1), (1, 0, 0, 0, 0), 17, 2)


def test_act_mod_matches_exact_action():
    rng = np.random.default_rng(3)
    G = group_table(7, 2)
    for i in rng.integers(0, len(G), 300):
        g = ScaledMap(*map(int, G.elements[i]))
        f = QuarticForm(*map(int, rng.integers(-99, 99, 5)))
        img = act(g, f)
        want = [(c.numerator * pow(c.denominator, -1, 49)) % 49 if hasattr(c, "denominator") else c % 49
                for c in img.coeffs]
        assert list(act_mod(G.elements[i:i + 1], f.coeffs, 49)[0]) == want


def test_orbital_sum_trivial_h():
    assert orbital_sum((1, 2, 3, 4, 5), (0, 0, 0, 0, 0), 5, 2) == pytest.approx(1)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 24), min_size=5, max_size=5),
       st.lists(st.integers(0, 24), min_size=5, max_size=5),
       st.integers(0, 10**6), st.sampled_from([1, 2, 3, 4, 6, 7, 8, 9]))
def test_orbital_sum_invariance(f, h, gi, t):
    p, k, n = 5, 2, 25
    G = group_table(p, k)
    g = G.elements[gi % len(G):gi % len(G) + 1]
    gf = act_mod(g, f, n)[0]
    t2f = [t * t * x % n for x in f]
    base = pairing_values(f, h, p, k)
    # the distribution of [g f, h] over the group is unchanged, so the sums agree exactly
    assert np.array_equal(pairing_values(gf, h, p, k), base)
    assert abs(orbital_sum(gf, h, p, k) - orbital_sum(f, h, p, k)) < 1e-12
    assert abs(orbital_sum(t2f, h, p, k) - orbital_sum(f, h, p, k)) < 1e-12


def test_orbital_sum_bounds_small():
    # f not in pV; the three regimes at p = 5
    f = (1, 0, 3, 0, 2)
    assert abs(orbital_sum(f, (0, 5, 0, 0, 10), 5, 2)) <= 1.0 / math.sqrt(5) * 2
    assert abs(orbital_sum(f, (1, 2, 0, 0, 3), 5, 2)) <= 1.0 / 5 * 2


def test_plain_pairing_at_three():
    assert orbital_sum((1, 0, 0, 0, 1), (0, 0, 0, 0, 0), 3, 2) == pytest.approx(1)
    with pytest.raises(ValueError):
        orbital_sum((1, 0, 0, 0, 1), (1, 0, 0, 0, 0), 3, 2, pairing="invariant")


def test_disc_mod_matches_exact():
    rng = np.random.default_rng(0)
    F = rng.integers(0, 49, (500, 5))
    got = disc_mod(F, 49)
    for row, d in zip(F, got):
        assert disc_direct(QuarticForm(*map(int, row))) % 49 == d


def test_fourier_normalisation_and_density():
    n = 3
    assert fourier_point(lambda F: np.ones(len(F)), (0, 0, 0, 0, 0), n) == pytest.approx(1)
    S = chi_p2_support(3)
    F = all_forms(9)
    dens = np.count_nonzero(disc_mod(F, 9) == 0) / 9**5
    assert fourier_point(None, (0, 0, 0, 0, 0), 9, support=S) == pytest.approx(dens)
    assert len(S) == round(dens * 9**5)


def test_parseval():
    def phi(F):
        return (disc_mod(F, 3) == 0).astype(float) + 0.5 * (F[:, 0] == 1)
    assert parseval_gap(phi, 3) < 1e-9


def test_fourier_strong_invariance():
    # the indicator of p^2 | Delta is strongly invariant, so its transform is constant on dual orbits
    n = 9
    S = chi_p2_support(3)
    G = group_table(3, 2)
    rng = np.random.default_rng(5)
    for _ in range(20):
        h = rng.integers(0, n, 5)
        g = G.elements[rng.integers(len(G))]
        h2 = dual_act(g, h, n)
        assert abs(fourier_point(None, h, n, support=S) - fourier_point(None, h2, n, support=S)) < 1e-12


def test_dual_act_adjoint():
    rng = np.random.default_rng(2)
    G = group_table(5, 2)
    w = [1, pow(4, -1, 25), pow(6, -1, 25), pow(4, -1, 25), 1]
    for _ in range(50):
        g = G.elements[rng.integers(len(G))]
        f, h = rng.integers(0, 25, 5), rng.integers(0, 25, 5)
        lhs = int(np.dot(np.array(w) * h % 25, act_mod(g[None], f, 25)[0])) % 25
        rhs = int(np.dot(np.array(w) * dual_act(g, h, 25, weights=w) % 25, f)) % 25
        assert lhs == rhs
