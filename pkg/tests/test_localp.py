import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quarticstats.arith import valuation
from quarticstats.errors import NotRamified, UnsupportedPrime
from quarticstats.forms import QuarticForm, ScaledMap, act, invariants
from quarticstats.localp import (ALL_TYPES, SplittingType, brute_force_slice, brute_force_splitting,
                                 density_slice, density_splitting, global_weights, hermite_reps,
                                 is_resolvent_maximal_at, linf_soluble, lp_decide, lp_point_search,
                                 lp_soluble, mp_level, mp_level_lattices, mp_levels, mp_total,
                                 splitting_type)
from quarticstats.localp import ffield

T = SplittingType.parse
small = st.integers(-40, 40)
small_forms = st.builds(QuarticForm, small, small, small, small, small)
primes = st.sampled_from([2, 3, 5, 7])


def nondegenerate(f):
    return invariants(f).delta != 0


# --- F_p factorization ---------------------------------------------------

@settings(max_examples=300)
@given(st.sampled_from([2, 3, 5, 7, 11, 13]), st.lists(st.integers(0, 12), min_size=2, max_size=5))
def test_factorization_reconstructs(p, coeffs):
    f = ffield.reduce(coeffs, p)
    if ffield.deg(f) < 1:
        return
    prod = [f[-1]]
    for g, e in ffield.factor(f, p):
        assert g[-1] == 1
        for _ in range(e):
            prod = ffield.mul(prod, g, p)
    assert prod == f


def test_factors_are_irreducible():
    p = 5
    for f in ([1, 0, 0, 0, 1], [2, 1, 0, 1], [1, 1, 1, 1, 1]):
        for g, _ in ffield.factor(f, p):
            if ffield.deg(g) > 1:
                assert all(sum(c * x**i for i, c in enumerate(g)) % p for x in range(p))


# --- splitting types -----------------------------------------------------

def test_splitting_examples():
    assert splitting_type(QuarticForm(1, 0, 0, 0, 1), 2) == T("1^4")
    assert splitting_type(QuarticForm(0, 1, 0, -1, 0), 5) == T("1111")
    assert splitting_type(QuarticForm(5, 5, 5, 5, 5), 5).is_zero


def test_type_parsing_roundtrip():
    for s in ALL_TYPES:
        assert T(str(s)) == s
    assert T("(1^2 1 1)") == T("1^211")
    assert T("1^211").index == 1 and T("1^4").index == 3 and T("2^2").index == 2


@given(small_forms, primes)
def test_splitting_type_unit_scaling(f, p):
    # the type is invariant under PGL_2(Z) and unit scaling
    g = act(ScaledMap(1, 1, 0, 1), f)
    assert splitting_type(g, p) == splitting_type(f, p)
    if p > 2:
        assert splitting_type(QuarticForm(*(2 * c for c in f.coeffs)), p) == splitting_type(f, p)


def test_density_examples():
    assert density_splitting(T("1111"), 5) == Fraction(12, 625)
    assert density_splitting(T("1^31"), 5) == Fraction(24, 625)
    for p in (3, 5, 7):
        assert sum(density_splitting(s, p) for s in ALL_TYPES) + Fraction(1, p**5) == 1
    assert density_slice(T("1111"), False, 5, 0) == Fraction(1, 125)
    assert density_slice(T("22"), False, 5, 1) == 0
    assert density_slice(T("1^211"), True, 5, 2) == Fraction(64, 625)
    with pytest.raises(UnsupportedPrime):
        density_splitting(T("1111"), 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_splitting_densities_bruteforce(p):
    bf = brute_force_splitting(p)
    for s in ALL_TYPES:
        assert bf[s] == density_splitting(s, p), s


@pytest.mark.parametrize("p", [3, 5, 7])
def test_slice_bruteforce_unramified_rows(p):
    # the non-maximal rows of the slice table, every k
    for k in range(4):
        bf = brute_force_slice(p, k)
        for s in ALL_TYPES:
            assert bf.get((s, False), 0) == density_slice(s, False, p, k), (s, k)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_slice_bruteforce_unit_independent(p):
    nonsquare = next(u for u in range(2, p) if pow(u, (p - 1) // 2, p) == p - 1)
    for k in (0, 1, 2):
        assert brute_force_slice(p, k, 1) == brute_force_slice(p, k, nonsquare)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_slice_k2_k3_agree(p):
    assert brute_force_slice(p, 2) == brute_force_slice(p, 3)


def test_resolvent_maximal_examples():
    p = 5
    # x^2 y (x - y) + e y^4: double root at (0:1), where f takes the value e
    assert is_resolvent_maximal_at(QuarticForm(0, 1, -1, 0, p), p)
    assert not is_resolvent_maximal_at(QuarticForm(0, 1, -1, p, p * p), p)
    # x y^2 (x - y) + a x^4: double root at infinity
    assert is_resolvent_maximal_at(QuarticForm(p, 0, 1, -1, 0), p)
    assert not is_resolvent_maximal_at(QuarticForm(p * p, 0, 1, -1, 0), p)
    assert not is_resolvent_maximal_at(QuarticForm(1, 0, 0, 0, 0), p)
    with pytest.raises(NotRamified):
        is_resolvent_maximal_at(QuarticForm(0, 1, 0, -1, 0), p)


@settings(max_examples=200)
@given(small_forms, st.sampled_from([3, 5, 7]), st.integers(-3, 3))
def test_maximality_depends_on_mod_p2(f, p, t):
    s = splitting_type(f, p)
    if s.is_zero or not s.is_ramified:
        return
    g = QuarticForm(*(c + p * p * t for c in f.coeffs))
    assert is_resolvent_maximal_at(f, p) == is_resolvent_maximal_at(g, p)


# --- solubility ----------------------------------------------------------

def test_solubility_examples():
    assert lp_soluble(QuarticForm(1, 0, 0, 0, 1), 5) == 1
    assert lp_soluble(QuarticForm(3, 0, 0, 0, 3), 3) == 0
    assert linf_soluble(QuarticForm(1, 0, 0, 0, 1)) == 1
    assert linf_soluble(QuarticForm(-1, 0, 0, 0, -1)) == 0
    assert linf_soluble(QuarticForm(1, 0, 0, 0, -1)) == 1


@settings(max_examples=200, deadline=None)
@given(small_forms, st.sampled_from([2, 3, 5]), st.sampled_from([1, 1, 2]))
def test_solubility_matches_point_search(f, p, scale):
    f = QuarticForm(*(c * p ** (scale - 1) if i % 2 else c for i, c in enumerate(f.coeffs)))
    if not nondegenerate(f):
        return
    depth = {2: 11, 3: 7, 5: 5}[p]
    assert lp_soluble(f, p) == lp_point_search(f, p, depth)


@settings(max_examples=200, deadline=None)
@given(small_forms, st.sampled_from([3, 5, 7, 11]))
def test_soluble_when_p2_not_dividing_disc(f, p):
    if not nondegenerate(f) or invariants(f).delta % (p * p) == 0:
        return
    assert lp_soluble(f, p) == 1


@settings(max_examples=200, deadline=None)
@given(small_forms, primes, st.data())
def test_insolubility_stable_past_disc_depth(f, p, data):
    if not nondegenerate(f) or lp_soluble(f, p):
        return
    v = valuation(invariants(f).delta, p)
    k = v // 2
    mod = p ** (2 * k + (2 if p == 2 else 0))
    h = data.draw(st.lists(st.integers(-5, 5), min_size=5, max_size=5))
    g = QuarticForm(*(c + mod * t for c, t in zip(f.coeffs, h)))
    if nondegenerate(g):
        assert lp_soluble(g, p) == 0


@settings(max_examples=200, deadline=None)
@given(small_forms, primes)
def test_solubility_orbit_invariant(f, p):
    if not nondegenerate(f):
        return
    for g in (ScaledMap(1, 3, 0, 1), ScaledMap(0, -1, 1, 0), ScaledMap(2, 1, 1, 1)):
        assert lp_soluble(act(g, f), p) == lp_soluble(f, p)


def test_solubility_depth_reported():
    sol, depth = lp_decide(QuarticForm(3, 0, 0, 0, 3), 3)
    assert sol == 0 and depth >= 1


# --- m_p -----------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_hermite_rep_counts(p):
    for k in range(1, 5):
        reps = hermite_reps(p, k)
        assert len(reps) == (p + 1) * p ** (k - 1)
        assert all(valuation(g.det, p) == k for g in reps)


def test_mp_examples():
    for p in (3, 5, 7):
        f = QuarticForm(1, 0, 0, 0, p * p)
        assert mp_level(f, p, 0) == 1
        assert mp_levels(f, p) == [1, 1, 0, 0]
        assert mp_total(f, p) == 2
        # its swap lies in the same orbit
        assert mp_total(QuarticForm(p * p, 0, 0, 0, 1), p) == 2
    assert len(hermite_reps(5, 2)) == 30


@settings(max_examples=150, deadline=None)
@given(small_forms, st.sampled_from([2, 3, 5]), st.integers(1, 3))
def test_mp_matches_lattice_count(f, p, k):
    f = QuarticForm(f.a * p ** (2 * k), f.b * p**k, f.c, f.d, f.e)
    assert mp_level(f, p, k) == mp_level_lattices(f, p, k)


@settings(max_examples=150, deadline=None)
@given(small_forms, st.sampled_from([2, 3, 5]), st.integers(1, 2), st.data())
def test_mp_periodic(f, p, k, data):
    f = QuarticForm(f.a * p ** (2 * k), f.b * p**k, f.c, f.d, f.e)
    h = data.draw(st.lists(st.integers(-3, 3), min_size=5, max_size=5))
    g = QuarticForm(*(c + p ** (2 * k) * t for c, t in zip(f.coeffs, h)))
    assert mp_level(f, p, k) == mp_level(g, p, k)


@settings(max_examples=150, deadline=None)
@given(small_forms, st.sampled_from([2, 3, 5]), st.integers(1, 3))
def test_mp_support(f, p, k):
    f = QuarticForm(f.a * p ** (2 * k), f.b * p**k, f.c, f.d, f.e)
    d = invariants(f).delta
    if mp_level(f, p, k) > 0:
        assert d % p ** (2 * k) == 0


@settings(max_examples=100, deadline=None)
@given(small_forms, st.sampled_from([2, 3, 5]))
def test_mp_orbit_invariant(f, p):
    f = QuarticForm(f.a * p * p, f.b * p, f.c, f.d, f.e)
    if not nondegenerate(f):
        return
    for g in (ScaledMap(1, 2, 0, 1), ScaledMap(0, 1, 1, 0), ScaledMap(1, 0, 3, 1)):
        assert mp_total(act(g, f), p) == mp_total(f, p)


def test_global_weight_examples():
    assert global_weights(QuarticForm(1, 0, 0, 1, 1)) == (1, 1)
    ell, m = global_weights(QuarticForm(-1, 0, 0, -1, -1))
    assert ell == 0


def test_random_global_weights_invariant():
    rng = random.Random(7)
    seen = 0
    while seen < 30:
        f = QuarticForm(*(rng.randint(-9, 9) for _ in range(5)))
        if not nondegenerate(f):
            continue
        from quarticstats.forms import is_generic
        if not is_generic(f):
            continue
        seen += 1
        g = act(ScaledMap(2, 1, 1, 1), f)
        assert global_weights(g) == global_weights(f)
