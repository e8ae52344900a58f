"""Exact Walsh-Hadamard and Krawtchouk transforms.

Characters are chi_S(x) = (-1)^(XOR of x_i over S) on the {0,1} domain, and
every coefficient is a ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence, Union

import numpy as np

from .boolfn import BooleanFunction, SymmetricFunction, _check_dense


def _fwht_int(values: np.ndarray, n: int) -> np.ndarray:
    """Unnormalized integer butterfly: out[S] = sum_x values[x] * chi_S(x)."""
    a = np.array(values, dtype=np.int64).reshape(-1)
    for i in range(n):
        a = a.reshape(-1, 2, 1 << i)
        lo = a[:, 0, :].copy()
        hi = a[:, 1, :]
        a[:, 0, :] = lo + hi
        a[:, 1, :] = lo - hi
    return a.reshape(-1)


def walsh_hadamard(f: BooleanFunction) -> dict[int, Fraction]:
    """Fourier coefficients of the 0/1-valued f, keyed by subset bitmask.

    f(x) = sum_S c_S chi_S(x) with c_S = 2^-n sum_x f(x) chi_S(x).
    """
    _check_dense(f.n)
    raw = _fwht_int(f.table, f.n)
    den = 1 << f.n
    return {s: Fraction(int(v), den) for s, v in enumerate(raw)}


def walsh_hadamard_int(f: BooleanFunction) -> np.ndarray:
    """Integer numerators 2^n * c_S as an int64 array indexed by mask."""
    _check_dense(f.n)
    return _fwht_int(f.table, f.n)


@dataclass(frozen=True)
class KrawtchoukMatrix:
    n: int
    entries: tuple[tuple[int, ...], ...]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)


@lru_cache(maxsize=None)
def _kraw(n: int) -> tuple[tuple[int, ...], ...]:
    # row s = subset size, column j = input weight:
    # sum over x of weight j of chi_S(x) for a fixed |S| = s
    rows = []
    for s in range(n + 1):
        rows.append(tuple(
            sum((-1) ** k * comb(s, k) * comb(n - s, j - k) for k in range(0, min(s, j) + 1))
            for j in range(n + 1)
        ))
    return tuple(rows)


def krawtchouk_matrix(n: int) -> KrawtchoukMatrix:
    if n < 0:
        raise ValueError(f"arity must be >= 0, got {n}")
    return KrawtchoukMatrix(n, _kraw(n))


def _b(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def krawtchouk_four_branch(n: int, i: int, j: int) -> int:
    """Piecewise entry indexed (weight i, size j); equals ``entries[j][i]``.

    Kept only as an independent cross-check of the unified sum.
    """
    if i < j and i + j <= n:
        return sum((-1) ** k * _b(j, k) * _b(n - j, i - k) for k in range(0, i + 1))
    if i >= j and i + j < n:
        return sum((-1) ** k * _b(j, k) * _b(n - j, i - k) for k in range(0, j + 1))
    if i >= j and i + j >= n:
        return sum((-1) ** k * _b(j, k) * _b(n - j, i - k) for k in range(j + i - n, j + 1))
    return sum((-1) ** (i - k) * _b(j, i - k) * _b(n - j, k) for k in range(0, n - j + 1))


def krawtchouk_coefficients(v: Union[SymmetricFunction, Sequence[int]]) -> list[Fraction]:
    """Shared Fourier coefficient of every size-i subset, i = 0..n."""
    vec = list(v.value_vector) if isinstance(v, SymmetricFunction) else [int(b) for b in v]
    n = len(vec) - 1
    if n < 0:
        raise ValueError("value vector must be non-empty")
    K = _kraw(n)
    den = 1 << n
    return [Fraction(sum(K[s][j] * vec[j] for j in range(n + 1)), den) for s in range(n + 1)]
