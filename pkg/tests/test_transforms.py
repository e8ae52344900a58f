from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqc.boolfn import BooleanFunction, SymmetricFunction, and_n, csf, eval_fn, mask_from_set
from nmqc.transforms import (
    _fwht_int,
    krawtchouk_coefficients,
    krawtchouk_four_branch,
    krawtchouk_matrix,
    walsh_hadamard,
    walsh_hadamard_int,
)

from oracles import fourier, inputs, krawtchouk_entry


def tables(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n).map(lambda t: BooleanFunction(n, t)))


@settings(max_examples=60, deadline=None)
@given(tables())
def test_walsh_matches_definition(f):
    ref = fourier({x: eval_fn(f, x) for x in inputs(f.n)}, f.n)
    got = walsh_hadamard(f)
    for S, c in ref.items():
        assert got[mask_from_set(S)] == c


@settings(max_examples=60, deadline=None)
@given(tables(6))
def test_walsh_parseval_and_inverse(f):
    raw = walsh_hadamard_int(f).astype(np.int64)
    n = f.n
    # sum_S c_S^2 = mean of f^2 = mean of f
    assert int((raw ** 2).sum()) == (1 << n) * int(f.table.sum())
    # applying the butterfly twice gives 2^n times the input
    assert np.array_equal(_fwht_int(raw, n), (1 << n) * f.table.astype(np.int64))


def test_and2_fourier():
    c = walsh_hadamard(and_n(2))
    assert [c[m] for m in range(4)] == [Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), Fraction(1, 4)]


@pytest.mark.parametrize("n", range(0, 9))
def test_krawtchouk_matches_counting(n):
    K = krawtchouk_matrix(n)
    for s in range(n + 1):
        for j in range(n + 1):
            assert K.entries[s][j] == krawtchouk_entry(n, s, j)


@pytest.mark.parametrize("n", range(1, 12))
def test_four_branch_form_is_the_transpose(n):
    K = krawtchouk_matrix(n).entries
    for i in range(n + 1):
        for j in range(n + 1):
            assert krawtchouk_four_branch(n, i, j) == K[j][i]


def test_krawtchouk_n2_example():
    assert krawtchouk_matrix(2).entries == ((1, 2, 1), (1, 0, -1), (1, -2, 1))


@pytest.mark.parametrize("n", range(1, 9))
def test_krawtchouk_square_is_scaled_identity(n):
    K = krawtchouk_matrix(n).as_array()
    # K_{s,j} C(n,s) = K_{j,s} C(n,j), and K^2 = 2^n I
    assert (K.dot(K) == (1 << n) * np.eye(n + 1, dtype=object)).all()
    for s in range(n + 1):
        for j in range(n + 1):
            assert K[s][j] * comb(n, s) == K[j][s] * comb(n, j)


def test_krawtchouk_coefficients_example():
    assert krawtchouk_coefficients([0, 0, 1]) == [Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4)]


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n + 1, max_size=n + 1)))
def test_krawtchouk_agrees_with_walsh_on_symmetric(vec):
    f = SymmetricFunction(len(vec) - 1, tuple(vec))
    coeffs = krawtchouk_coefficients(f)
    full = walsh_hadamard(f.to_boolean())
    for m, c in full.items():
        assert c == coeffs[bin(m).count("1")]


@pytest.mark.parametrize("n", [8, 10])
def test_walsh_constant_on_size_classes_for_symmetric(n):
    rng = np.random.default_rng(n)
    f = SymmetricFunction(n, tuple(int(b) for b in rng.integers(0, 2, n + 1)))
    by_size = {}
    for m, c in walsh_hadamard(f.to_boolean()).items():
        by_size.setdefault(bin(m).count("1"), set()).add(c)
    assert all(len(v) == 1 for v in by_size.values())


def test_krawtchouk_coefficients_of_csf_sum_to_value_at_zero():
    for n in range(1, 10):
        for k in range(n + 1):
            c = krawtchouk_coefficients(csf(k, n))
            assert sum(comb(n, s) * c[s] for s in range(n + 1)) == csf(k, n).value_vector[0]
