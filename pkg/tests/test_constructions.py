from collections import Counter
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqc.boolfn import (
    AnfForm,
    BooleanFunction,
    SymmetricFunction,
    almost_csf,
    and_n,
    anf_from_truth,
    csf,
    decompose_csf,
    parse_function,
    popcount,
    set_from_mask,
    truth_from_anf,
    zeta_c,
)
from nmqc.constructions import (
    METHODS,
    RUNNERS,
    VerificationError,
    _report,
    applicable_methods,
    compare_all,
    construct_csf,
    construct_ef,
    construct_fr,
    construct_kr,
    construct_sc,
    csf_k_poly,
    factor_sparsity,
    growth_exponent,
    monomial_poly_kr,
    sparsity_bound,
)
import numpy as np

from nmqc.polynomial import MultilinearPoly, granularity, sparsity, verify_mod2

from oracles import fourier, inputs, represents


def tables(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n).map(lambda t: BooleanFunction(n, t)))


def sym_fns(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(0, 1), min_size=n + 1, max_size=n + 1).map(
            lambda v: SymmetricFunction(n, tuple(v))))


def terms_by_set(p):
    return {set_from_mask(s): c for s, c in p.terms.items()}


# --- FR ---------------------------------------------------------------------------

def test_fr_and2():
    r = construct_fr(and_n(2))
    assert [r.poly.coefficient(m) for m in range(4)] == [Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4),
                                                         Fraction(1, 4)]
    assert r.sparsity == 3 and r.granularity == 2


@pytest.mark.parametrize("n", range(2, 7))
def test_fr_and_n_sparsity(n):
    assert construct_fr(and_n(n)).sparsity == 2 ** n - 1


@settings(max_examples=40, deadline=None)
@given(tables())
def test_fr_matches_fourier_oracle(f):
    ref = fourier({x: f(x) for x in inputs(f.n)}, f.n)
    got = terms_by_set(construct_fr(f).poly)
    assert got == {S: c for S, c in ref.items() if c}


# --- every method is sound ----------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(tables())
@pytest.mark.parametrize("method", ["FR", "EF", "KR", "SC"])
def test_general_methods_sound(method, f):
    r = RUNNERS[method](f)
    assert represents(terms_by_set(r.poly), {x: f(x) for x in inputs(f.n)}, f.n)


@settings(max_examples=40, deadline=None)
@given(sym_fns())
@pytest.mark.parametrize("method", METHODS)
def test_symmetric_methods_sound(method, f):
    r = RUNNERS[method](f)
    assert verify_mod2(r.poly, f)


def test_random_functions_sound_up_to_12():
    rng = np.random.default_rng(5)
    for i in range(1000):
        n = int(rng.integers(5, 13))
        f = BooleanFunction(n, rng.integers(0, 2, 1 << n))
        # FR on every draw, KR on every tenth, EF and SC on every tenth with n <= 10
        ms = ("FR",) if i % 10 else ("FR", "KR") if n > 10 else ("FR", "KR", "EF", "SC")
        for m in ms:
            assert verify_mod2(RUNNERS[m](f).poly, f), (m, i)


def test_report_gate_rejects_bad_poly():
    bad = MultilinearPoly(2, {1: Fraction(1, 2)})
    with pytest.raises(VerificationError):
        _report("X", and_n(2), bad, 0.0)


# --- EF and KR building blocks -------------------------------------------------------------

@pytest.mark.parametrize("sets", [[(1,)], [(2, 3)], [(1, 3, 4)], [(1, 2, 3, 4)]])
def test_monomial_polys_equal_fourier(sets):
    a = AnfForm.from_sets(4, sets)
    fr = construct_fr(truth_from_anf(a)).poly
    assert construct_ef(a).poly == fr
    m = next(iter(a.monomials))
    assert monomial_poly_kr(m, 4) == fr


def test_kr_equals_ef_per_monomial():
    n = 9
    for size in range(1, 9):
        for start in (0, 1):
            a = AnfForm.from_sets(n, [tuple(range(1 + start, size + 1 + start))])
            assert construct_ef(a).poly == monomial_poly_kr(next(iter(a.monomials)), n)


def test_ef_sparsity_c5():
    r = construct_ef(csf(5, 6))
    assert len(r.poly.terms) == 63
    assert r.sparsity == 62


# --- KR with greedy signs on x1x2 + x2x3 ---------------------------------------------------

def test_kr_example_two():
    f = parse_function("anf: x1*x2 + x2*x3")
    r = construct_kr(f)
    assert r.notes == "signs=+-"
    assert r.sparsity == 4
    assert r.poly.xor_terms() == {1: Fraction(1, 2), 4: Fraction(-1, 2), 3: Fraction(-1, 2), 6: Fraction(1, 2)}
    plain = construct_kr(f, greedy=False)
    assert plain.sparsity >= r.sparsity


@settings(max_examples=40, deadline=None)
@given(tables())
def test_kr_greedy_never_worse_than_plain(f):
    assert construct_kr(f).sparsity <= construct_kr(f, greedy=False).sparsity


@settings(max_examples=40, deadline=None)
@given(tables(5))
def test_kr_granularity_bounded_by_degree(f):
    a = anf_from_truth(f)
    r = construct_kr(a)
    assert granularity(r.poly) <= a.degree


# --- CSF ----------------------------------------------------------------------------------

def test_csf_c5_census_and_angles():
    r = construct_csf(csf(5, 6))
    assert r.sparsity == 43
    census = Counter(popcount(s) for s in r.poly.terms if s)
    assert census == {1: 6, 5: 6, 2: 15, 4: 15, 6: 1}
    by_size = {}
    for s, c in r.poly.terms.items():
        if s:
            by_size.setdefault(popcount(s), set()).add(c)
    # phi = -2c per qubit
    phis = {k: {-2 * c for c in v} for k, v in by_size.items()}
    assert phis == {1: {Fraction(1, 8)}, 5: {Fraction(-1, 8)}, 2: {Fraction(-1, 16)}, 4: {Fraction(1, 16)},
                    6: {Fraction(3, 16)}}


@pytest.mark.parametrize("n", range(1, 11))
def test_csf_factors_and_pointwise(n):
    for k in range(1, n + 1):
        acc = [1] * (n + 1)
        for r in decompose_csf(k):
            acc = [a & b for a, b in zip(acc, csf(1 << r, n).value_vector)]
        assert tuple(acc) == csf(k, n).value_vector


@pytest.mark.parametrize("n", range(1, 9))
def test_product_poly_realizes_csf(n):
    for k in range(1, n + 1):
        assert verify_mod2(csf_k_poly(k, n), csf(k, n))


def test_sparsity_bound_dominates():
    for n in range(2, 11):
        for v in range(0, 1 << (n + 1), 7):
            f = SymmetricFunction(n, tuple((v >> i) & 1 for i in range(n + 1)))
            assert construct_csf(f).sparsity <= sparsity_bound(f)
    assert sparsity_bound(csf(2, 9)) == 9 + 2


def test_csf_no_sparser_than_ef():
    for n in range(1, 13):
        for k in range(1, min(n, 8) + 1):
            assert construct_csf(csf(k, n)).sparsity <= construct_ef(csf(k, n)).sparsity, (k, n)


def test_factor_sparsity_matches_constructions():
    for n in range(8, 13):
        assert factor_sparsity(0, n) == 1
        for r in (1, 2, 3):
            assert factor_sparsity(r, n) == sparsity(csf_k_poly(1 << r, n))


def test_growth_exponent():
    assert [growth_exponent(k) for k in (1, 2, 3, 4, 5, 6, 8, 64)] == [0, 1, 1, 2, 2, 3, 4, 32]
    assert growth_exponent(128) == 127
    assert growth_exponent(127) == sum(1 << (r - 1) for r in range(1, 7))


@pytest.mark.parametrize("k", [2, 4])
def test_csf_polynomial_sparsity_grows_like_exponent(k):
    s = [construct_csf(csf(k, n)).sparsity for n in (16, 32)]
    ratio = s[1] / s[0]
    assert 2 ** growth_exponent(k) * 0.8 <= ratio <= 2 ** growth_exponent(k) * 1.25


# --- SC ----------------------------------------------------------------------------------

def test_sc_takes_zeta_branch_on_almost_csf():
    a = almost_csf(4, 10, 1)
    r = construct_sc(a)
    kr = construct_kr(a)
    assert r.sparsity < kr.sparsity
    assert r.notes.startswith("zeta branch")
    assert r.extra["candidates"] == (kr.sparsity, r.sparsity)
    assert r.sparsity < construct_ef(a).sparsity


def test_sc_zeta_of_almost_csf_is_the_csf():
    assert zeta_c(almost_csf(4, 10, 3)) == csf(4, 10)


@settings(max_examples=30, deadline=None)
@given(tables(4))
def test_sc_never_worse_than_kr(f):
    assert construct_sc(f).sparsity <= construct_kr(f).sparsity


# --- comparison ---------------------------------------------------------------------------

def test_compare_c5():
    rows = {r.method: r for r in compare_all(csf(5, 6))}
    assert rows["CSF"].sparsity == 43 and rows["EF"].sparsity == 62
    assert rows["FR"].sparsity == 43


def test_compare_sorted_and_constant():
    out = compare_all(and_n(3))
    assert [r.sparsity for r in out] == sorted(r.sparsity for r in out)
    assert all(r.sparsity == 7 for r in out)
    zero = compare_all(parse_function("anf: 1"))
    assert all(r.sparsity == 0 for r in zero) and len(zero) == len(METHODS)


def test_compare_budget_skips(monkeypatch):
    monkeypatch.setenv("NMQC_TIME_BUDGET_MS", "0")
    out = compare_all(csf(8, 20))
    assert out.skipped and all(":" in s for s in out.skipped)


def test_applicable_methods():
    assert "CSF" not in applicable_methods(parse_function("anf: x1*x2 + x3"))
    assert applicable_methods(csf(3, 5)) == list(METHODS)
