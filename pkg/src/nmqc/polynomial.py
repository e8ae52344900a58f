"""Multilinear polynomials over parity characters, with pi factored out.

A polynomial p represents f when p(x) is an integer congruent to f(x) mod 2
for every input x.  Terms are keyed by subset bitmask; key 0 is the constant.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .boolfn import (
    MAX_DENSE_ARITY,
    AnfForm,
    ArityError,
    BooleanFunction,
    ResourceCapError,
    SymmetricFunction,
    as_boolean,
    as_symmetric,
    canonical_key,
    mask_from_set,
    popcount,
    set_from_mask,
    subsets_of_size,
)
from .transforms import _fwht_int, _kraw

CLOSED_FORM_DEGREES = (2, 4, 8, 16, 32, 64)


class NonDyadicError(ValueError):
    pass


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    n: int
    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ArityError(f"arity must be >= 0, got {self.n}")
        clean = {}
        for s, c in self.terms.items():
            s = int(s)
            if s < 0 or s >> self.n:
                raise ArityError(f"subset {set_from_mask(s)} outside arity {self.n}")
            c = _frac(c)
            if c:
                clean[s] = c
        object.__setattr__(self, "terms", clean)

    # basic protocol

    def __eq__(self, other):
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self):
        return f"MultilinearPoly(n={self.n}, sparsity={sparsity(self)}, terms={len(self.terms)})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, negate(other))

    def __neg__(self):
        return negate(self)

    def __mul__(self, other):
        if isinstance(other, MultilinearPoly):
            return multiply(self, other)
        return scale(self, _frac(other))

    __rmul__ = __mul__

    @property
    def constant(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    def coefficient(self, s: Union[int, Iterable[int]]) -> Fraction:
        key = s if isinstance(s, int) else mask_from_set(s)
        return self.terms.get(key, Fraction(0))

    def sorted_terms(self) -> list[tuple[int, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: canonical_key(kv[0]))

    def support(self) -> list[int]:
        """Non-constant subsets in canonical order."""
        return [s for s, _ in self.sorted_terms() if s]

    @classmethod
    def constant_poly(cls, n: int, c) -> "MultilinearPoly":
        return cls(n, {0: _frac(c)})

    @classmethod
    def from_xor_terms(cls, n: int, xor_terms: Mapping[int, Fraction]) -> "MultilinearPoly":
        """Build from coefficients on XOR-valued bases, using XOR_S = (1 - chi_S)/2."""
        out: dict[int, Fraction] = {}
        for s, c in xor_terms.items():
            c = _frac(c)
            if s == 0:
                out[0] = out.get(0, 0) + c
                continue
            out[0] = out.get(0, 0) + c / 2
            out[s] = out.get(s, 0) - c / 2
        return cls(n, out)

    def xor_terms(self) -> dict[int, Fraction]:
        """Inverse of ``from_xor_terms``: constant plus XOR-basis coefficients."""
        out = {s: -2 * c for s, c in self.terms.items() if s}
        const = self.constant + sum(c for s, c in self.terms.items() if s)
        if const:
            out[0] = const
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"S": list(set_from_mask(s)), "c": f"{c.numerator}/{c.denominator}"}
                for s, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: Union[str, dict]) -> "MultilinearPoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["n"]), {mask_from_set(t["S"]): Fraction(t["c"]) for t in obj["terms"]})

    def pretty(self, xor_basis: bool = False) -> str:
        items = (MultilinearPoly(self.n, self.xor_terms()) if xor_basis else self).sorted_terms()
        if not items:
            return "0"
        out = ""
        for s, c in items:
            if s == 0:
                body = str(abs(c))
            else:
                name = ("+".join if xor_basis else "".join)(f"x{i}" for i in set_from_mask(s))
                body = f"{abs(c)}*{'(' + name + ')' if xor_basis else 'chi[' + name + ']'}"
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


# --- arithmetic ---------------------------------------------------------------

def _same_arity(p: MultilinearPoly, q: MultilinearPoly) -> None:
    if p.n != q.n:
        raise ArityError(f"arity mismatch: {p.n} vs {q.n}")


def add(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    _same_arity(p, q)
    out = dict(p.terms)
    for s, c in q.terms.items():
        out[s] = out.get(s, 0) + c
    return MultilinearPoly(p.n, out)


def negate(p: MultilinearPoly) -> MultilinearPoly:
    return MultilinearPoly(p.n, {s: -c for s, c in p.terms.items()})


def sub(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    return add(p, negate(q))


def scale(p: MultilinearPoly, c: Fraction) -> MultilinearPoly:
    return MultilinearPoly(p.n, {s: c * v for s, v in p.terms.items()})


def multiply(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    """Product in the character algebra: chi_S * chi_T = chi_(S xor T)."""
    _same_arity(p, q)
    out: dict[int, Fraction] = {}
    for s, a in p.terms.items():
        for t, b in q.terms.items():
            u = s ^ t
            out[u] = out.get(u, 0) + a * b
    return MultilinearPoly(p.n, out)


def embed(p: MultilinearPoly, n: int, positions: Sequence[int]) -> MultilinearPoly:
    """Relabel variable i+1 of p as variable positions[i] (1-based) in arity n."""
    if len(positions) != p.n:
        raise ArityError("need one target position per variable")
    bits = [1 << (j - 1) for j in positions]
    out = {}
    for s, c in p.terms.items():
        m = 0
        i = 0
        while s:
            if s & 1:
                m |= bits[i]
            s >>= 1
            i += 1
        out[m] = c
    return MultilinearPoly(n, out)


# --- metrics ---------------------------------------------------------------

def sparsity(p: MultilinearPoly) -> int:
    """Number of non-zero non-constant coefficients (qubits needed)."""
    return sum(1 for s in p.terms if s)


def granularity_of(r) -> int:
    r = _frac(r)
    d = r.denominator
    if d & (d - 1):
        raise NonDyadicError(f"{r} is not dyadic")
    return d.bit_length() - 1


def granularity(p: MultilinearPoly, basis: str = "character") -> int:
    """Largest 2-adic denominator exponent among the coefficients.

    ``basis="character"`` looks at every stored coefficient including the
    constant.  ``basis="xor"`` looks at the non-constant XOR-basis
    coefficients, which are -2 times the character ones.
    """
    if basis == "character":
        vals: Iterable[Fraction] = p.terms.values()
    elif basis == "xor":
        vals = (-2 * c for s, c in p.terms.items() if s)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return max((granularity_of(c) for c in vals), default=0)


# --- evaluation -----------------------------------------------------------

def evaluate(p: MultilinearPoly, x: Sequence[int]) -> Fraction:
    if len(x) != p.n:
        raise ArityError(f"expected {p.n} bits, got {len(x)}")
    xm = 0
    for i, b in enumerate(x):
        if b not in (0, 1):
            raise ValueError(f"input bits must be 0/1, got {b}")
        xm |= b << i
    total = Fraction(0)
    for s, c in p.terms.items():
        total += -c if popcount(s & xm) & 1 else c
    return total


def _common_den(p: MultilinearPoly) -> int:
    d = 1
    for c in p.terms.values():
        d = d * c.denominator // gcd(d, c.denominator)
    return d


def evaluate_all(p: MultilinearPoly) -> tuple[np.ndarray, int]:
    """All 2^n values as (numerators, D) with value[x] = numerators[x] / D."""
    if p.n > MAX_DENSE_ARITY:
        raise ResourceCapError(f"dense evaluation is capped at n={MAX_DENSE_ARITY}")
    D = _common_den(p)
    scaled = {s: int(c * D) for s, c in p.terms.items()}
    bound = sum(abs(v) for v in scaled.values())
    dtype = np.int64 if bound < (1 << 62) else object
    vec = np.zeros(1 << p.n, dtype=dtype)
    for s, v in scaled.items():
        vec[s] = v
    if dtype is object:
        a = vec
        for i in range(p.n):
            a = a.reshape(-1, 2, 1 << i)
            lo = a[:, 0, :].copy()
            hi = a[:, 1, :].copy()
            a[:, 0, :] = lo + hi
            a[:, 1, :] = lo - hi
        return a.reshape(-1), D
    # chi_S(x) is symmetric in (S, x), so the forward butterfly evaluates p
    return _fwht_int(vec, p.n), D


def profile_values_by_weight(sp: "SymmetricProfile") -> list[Fraction]:
    """Value of the expanded profile at any input of weight w, w = 0..n."""
    K = _kraw(sp.n)
    # sum over |S| = s of chi_S(x) for |x| = w is K[w][s]
    return [sum((K[w][s] * c for s, c in enumerate(sp.coeff_by_size) if c), Fraction(0))
            for w in range(sp.n + 1)]


def verify_mod2(p: MultilinearPoly, f, *, sample: bool = False, samples: int = 4096,
                seed: int = 0) -> bool:
    """True iff p(x) is an integer congruent to f(x) mod 2 on every input.

    Exhaustive when n <= 24.  A symmetric p against a symmetric f is checked
    per Hamming weight at any n.  Otherwise, for n > 24, ``sample=True``
    switches to seeded random spot checks.
    """
    if p.n != f.n:
        raise ArityError(f"arity mismatch: poly {p.n}, function {f.n}")
    if isinstance(f, SymmetricFunction) and p.n > MAX_DENSE_ARITY:
        sp = to_profile(p)
        if sp is not None:
            return _profile_matches(sp, f)
    if p.n <= MAX_DENSE_ARITY:
        table = as_boolean(f).table
        num, D = evaluate_all(p)
        if D == 1:
            return bool(np.all((num - table) % 2 == 0))
        if np.any(num % D != 0):
            return False
        return bool(np.all(((num // D) - table) % 2 == 0))
    if not sample:
        raise ResourceCapError("exhaustive verification is capped at n=24; pass sample=True")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x = [int(b) for b in rng.integers(0, 2, size=p.n)]
        v = evaluate(p, x)
        if v.denominator != 1 or (v.numerator - f(x)) % 2:
            return False
    return True


def _profile_matches(sp: "SymmetricProfile", f: SymmetricFunction) -> bool:
    for w, v in enumerate(profile_values_by_weight(sp)):
        if v.denominator != 1 or (v.numerator - f.value_vector[w]) % 2:
            return False
    return True


# --- symmetric profiles -----------------------------------------------------

@dataclass(frozen=True)
class SymmetricProfile:
    n: int
    coeff_by_size: tuple[Fraction, ...]

    def __post_init__(self):
        c = tuple(_frac(v) for v in self.coeff_by_size)
        if len(c) != self.n + 1:
            raise ArityError(f"profile length {len(c)} != n+1 = {self.n + 1}")
        object.__setattr__(self, "coeff_by_size", c)

    @property
    def sparsity(self) -> int:
        return sum(comb(self.n, i) for i, c in enumerate(self.coeff_by_size) if i and c)


def expand(sp: SymmetricProfile, xor_basis: bool = False) -> MultilinearPoly:
    """Assign entry i to every size-i subset.

    With ``xor_basis=True`` the entries are read as XOR-basis coefficients
    (entry 0 stays the constant) and converted to characters.
    """
    terms: dict[int, Fraction] = {}
    for i, c in enumerate(sp.coeff_by_size):
        if c:
            for s in subsets_of_size(sp.n, i):
                terms[s] = c
    if xor_basis:
        return MultilinearPoly.from_xor_terms(sp.n, terms)
    return MultilinearPoly(sp.n, terms)


def to_profile(p: MultilinearPoly) -> Optional[SymmetricProfile]:
    by_size: dict[int, Fraction] = {}
    count: dict[int, int] = {}
    for s, c in p.terms.items():
        i = popcount(s)
        if by_size.setdefault(i, c) != c:
            return None
        count[i] = count.get(i, 0) + 1
    if any(count[i] != comb(p.n, i) for i in count):
        return None
    return SymmetricProfile(p.n, tuple(by_size.get(i, Fraction(0)) for i in range(p.n + 1)))


# --- closed-form CSF polynomials ---------------------------------------------

def csf_power2_xor_profile(k: int, n: int) -> SymmetricProfile:
    """XOR-basis profile of the closed form for C^k, k a power of two <= 64."""
    if k not in CLOSED_FORM_DEGREES:
        raise ValueError(f"closed form only available for k in {CLOSED_FORM_DEGREES}, got {k}")
    if k > n:
        raise ValueError(f"need k <= n, got k={k}, n={n}")
    h = k // 2
    den = 1 << (k - 1)
    prof = [Fraction(0)] * (n + 1)
    for j in range(1, h + 1):
        a = Fraction((-1) ** j * comb(n - h - j, h - j), den)
        prof[j] += a
        prof[n - j + 1] -= a
    return SymmetricProfile(n, tuple(prof))


def csf_power2_poly(k: int, n: int) -> MultilinearPoly:
    return expand(csf_power2_xor_profile(k, n), xor_basis=True)


def csf_power2_sparsity(k: int, n: int) -> int:
    """Sparsity of the closed form without expanding it."""
    prof = csf_power2_xor_profile(k, n)
    return sum(comb(n, i) for i, c in enumerate(prof.coeff_by_size) if i and c)


def c1_poly(n: int) -> MultilinearPoly:
    """C^1 (parity) as -XOR_[n] = -1/2 + 1/2 chi_[n].

    The sign is free mod 2; the negative one makes C^1 * C^4 land on the
    conventional worked form of C^5.
    """
    return MultilinearPoly(n, {0: Fraction(-1, 2), (1 << n) - 1: Fraction(1, 2)})


def poly_from_sets(n: int, terms: Mapping[Iterable[int], Fraction]) -> MultilinearPoly:
    return MultilinearPoly(n, {mask_from_set(s): _frac(c) for s, c in terms.items()})
