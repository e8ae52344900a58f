import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqc.boolfn import AnfForm, BooleanFunction, ResourceCapError, and_n, csf, set_from_mask
from nmqc.polynomial import (
    MultilinearPoly,
    NonDyadicError,
    SymmetricProfile,
    c1_poly,
    csf_power2_poly,
    csf_power2_sparsity,
    csf_power2_xor_profile,
    embed,
    evaluate,
    evaluate_all,
    expand,
    granularity,
    granularity_of,
    poly_from_sets,
    profile_values_by_weight,
    sparsity,
    to_profile,
    verify_mod2,
)

from oracles import inputs, poly_value, represents, two_adic

POLY_AND2 = poly_from_sets(2, {(): Fraction(1, 4), (1,): Fraction(-1, 4), (2,): Fraction(-1, 4),
                               (1, 2): Fraction(1, 4)})


def dyadic_polys(max_n=4):
    def build(n):
        keys = st.integers(0, (1 << n) - 1)
        coeffs = st.builds(Fraction, st.integers(-8, 8), st.sampled_from([1, 2, 4, 8, 16]))
        return st.dictionaries(keys, coeffs, max_size=6).map(lambda d: MultilinearPoly(n, d))
    return st.integers(1, max_n).flatmap(build)


def as_tuple_terms(p):
    return {set_from_mask(s): c for s, c in p.terms.items()}


# --- algebra -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.data())
def test_product_law_pointwise(data):
    p = data.draw(dyadic_polys(4))
    q = MultilinearPoly(p.n, data.draw(st.dictionaries(st.integers(0, (1 << p.n) - 1),
                                                       st.integers(-3, 3).map(Fraction), max_size=4)))
    pq = p * q
    for x in inputs(p.n):
        assert evaluate(pq, x) == evaluate(p, x) * evaluate(q, x)
        assert evaluate(p + q, x) == evaluate(p, x) + evaluate(q, x)
        assert evaluate(p - q, x) == evaluate(p, x) - evaluate(q, x)


@settings(max_examples=60, deadline=None)
@given(dyadic_polys())
def test_evaluate_matches_oracle(p):
    terms = as_tuple_terms(p)
    num, D = evaluate_all(p)
    for idx, x in enumerate(inputs(p.n)):
        assert evaluate(p, x) == poly_value(terms, x)
        assert Fraction(int(num[idx]), D) == poly_value(terms, x)


@settings(max_examples=60, deadline=None)
@given(dyadic_polys())
def test_xor_basis_roundtrip(p):
    assert MultilinearPoly.from_xor_terms(p.n, p.xor_terms()) == p


@settings(max_examples=60, deadline=None)
@given(dyadic_polys())
def test_xor_basis_keeps_nonconstant_support(p):
    assert {s for s in p.xor_terms() if s} == {s for s in p.terms if s}


@settings(max_examples=60, deadline=None)
@given(dyadic_polys())
def test_json_roundtrip(p):
    assert MultilinearPoly.from_json(json.dumps(p.to_json())) == p


def test_zero_coefficients_pruned_and_sparsity():
    p = MultilinearPoly(3, {0: 1, 1: 0, 3: Fraction(1, 2)})
    assert p.terms == {0: Fraction(1), 3: Fraction(1, 2)}
    assert sparsity(p) == 1
    assert sparsity(MultilinearPoly(3, {})) == 0


def test_embed_relabels():
    p = poly_from_sets(2, {(1,): 1, (1, 2): Fraction(1, 2)})
    q = embed(p, 4, [2, 4])
    assert as_tuple_terms(q) == {(2,): 1, (2, 4): Fraction(1, 2)}


# --- granularity ---------------------------------------------------------------

def test_granularity_values():
    assert granularity_of(Fraction(3, 16)) == 4
    assert granularity_of(5) == 0
    with pytest.raises(NonDyadicError):
        granularity_of(Fraction(1, 3))
    assert granularity(POLY_AND2) == 2
    # XOR-basis view: x1 + x2 - (x1 xor x2), halved
    assert granularity(POLY_AND2, basis="xor") == 1


@settings(max_examples=60, deadline=None)
@given(dyadic_polys())
def test_granularity_matches_two_adic_oracle(p):
    assert granularity(p) == max((two_adic(c) for c in p.terms.values()), default=0)


# --- verify_mod2 ------------------------------------------------------------------

def test_verify_and2():
    assert verify_mod2(POLY_AND2, and_n(2))
    assert not verify_mod2(POLY_AND2, csf(1, 2))
    half = MultilinearPoly(2, {0: Fraction(1, 2)})
    assert not verify_mod2(half, and_n(2))


@settings(max_examples=60, deadline=None)
@given(dyadic_polys(3), st.integers(0, 255))
def test_verify_matches_oracle(p, tt):
    n = p.n
    f = BooleanFunction(n, [(tt >> i) & 1 for i in range(1 << n)])
    fvals = {x: f(x) for x in inputs(n)}
    assert verify_mod2(p, f) == represents(as_tuple_terms(p), fvals, n)


@settings(max_examples=60, deadline=None)
@given(dyadic_polys(3), st.integers(0, 255))
def test_verify_invariant_under_negation(p, tt):
    f = BooleanFunction(p.n, [(tt >> i) & 1 for i in range(1 << p.n)])
    assert verify_mod2(p, f) == verify_mod2(-p, f)


def test_verify_cap_and_sampling():
    n = 30
    p = c1_poly(n)
    big = csf(1, n)
    assert verify_mod2(p, big)  # symmetric path, any n
    a = AnfForm(n, frozenset({(1 << n) - 1 ^ 1}))
    q = MultilinearPoly(n, {})
    with pytest.raises(ResourceCapError):
        verify_mod2(q, a)
    assert not verify_mod2(q, AnfForm(n, frozenset({0})), sample=True, samples=16)


# --- symmetric profiles -------------------------------------------------------------

def test_profile_roundtrip():
    sp = SymmetricProfile(4, (Fraction(1, 2), 0, Fraction(-1, 4), 0, 1))
    p = expand(sp)
    assert sparsity(p) == comb(4, 2) + 1 == sp.sparsity
    assert to_profile(p) == sp
    assert to_profile(poly_from_sets(3, {(1,): 1})) is None


@pytest.mark.parametrize("n", range(1, 8))
def test_profile_values_by_weight(n):
    sp = SymmetricProfile(n, tuple(Fraction(i + 1, 1 << i) for i in range(n + 1)))
    p = expand(sp)
    vals = profile_values_by_weight(sp)
    for x in inputs(n):
        assert evaluate(p, x) == vals[sum(x)]


# --- closed forms ------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 4, 8])
def test_power2_closed_form_small(k):
    for n in range(k, 13):
        p = csf_power2_poly(k, n)
        assert verify_mod2(p, csf(k, n))
        assert csf_power2_sparsity(k, n) == sparsity(p)
        vals = profile_values_by_weight(to_profile(p))
        assert vals == [-comb(w // 2, k // 2) for w in range(n + 1)]


@pytest.mark.parametrize("k", [2, 4, 8])
def test_power2_closed_form_values_to_20(k):
    # per-weight values only; xor_S = (1 - chi_S)/2 moves the profile to characters
    for n in range(k, 21):
        xp = csf_power2_xor_profile(k, n).coeff_by_size
        const = xp[0] + sum(comb(n, i) * c for i, c in enumerate(xp) if i) / 2
        vals = profile_values_by_weight(SymmetricProfile(n, (const,) + tuple(-c / 2 for c in xp[1:])))
        assert all(v.denominator == 1 for v in vals)
        assert [int(v) % 2 for v in vals] == list(csf(k, n).value_vector)


def test_c2_and_c4_sparsity():
    for n in range(2, 30):
        assert csf_power2_sparsity(2, n) == n + 1
    for n in range(4, 30):
        assert csf_power2_sparsity(4, n) == (n * n + 3 * n) // 2 + 1


def test_c2_uses_sizes_1_and_n():
    prof = csf_power2_xor_profile(2, 6).coeff_by_size
    assert [i for i, c in enumerate(prof) if c] == [1, 6]


def test_closed_form_rejects_other_degrees():
    with pytest.raises(ValueError):
        csf_power2_xor_profile(6, 10)
    with pytest.raises(ValueError):
        csf_power2_xor_profile(8, 6)


@pytest.mark.parametrize("n", range(1, 10))
def test_c1_poly(n):
    assert verify_mod2(c1_poly(n), csf(1, n))
    assert sparsity(c1_poly(n)) == 1
