"""Boolean functions: dense truth tables, ANF, symmetric value vectors.

Input bit ``x_{i+1}`` is bit ``i`` of the truth-table index (little-endian).
Monomials and parity sets are stored as integer bitmasks with the same
convention, so ``{1, 3}`` is ``0b101``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

MAX_DENSE_ARITY = 24


class ArityError(ValueError):
    pass


class ResourceCapError(ValueError):
    """Raised when a dense object would exceed the configured arity cap."""


def mask_from_set(s: Iterable[int]) -> int:
    """1-based variable indices -> bitmask."""
    m = 0
    for i in s:
        if i < 1:
            raise ValueError(f"variable indices are 1-based, got {i}")
        m |= 1 << (i - 1)
    return m


def set_from_mask(m: int) -> tuple[int, ...]:
    out = []
    i = 1
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def popcount(m: int) -> int:
    return bin(m).count("1")


def canonical_key(m: int) -> tuple[int, tuple[int, ...]]:
    """Sort key: by size, then lexicographically on the 1-based index list."""
    return popcount(m), set_from_mask(m)


def subsets_of_size(n: int, k: int) -> list[int]:
    """All k-subsets of {1..n} as bitmasks, in lexicographic order."""
    return [mask_from_set(c) for c in combinations(range(1, n + 1), k)]


def _check_dense(n: int) -> None:
    if n < 1:
        raise ArityError(f"arity must be >= 1, got {n}")
    if n > MAX_DENSE_ARITY:
        raise ResourceCapError(f"dense truth tables are capped at n={MAX_DENSE_ARITY}, got {n}")


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    n: int
    table: np.ndarray

    def __post_init__(self):
        _check_dense(self.n)
        t = np.asarray(self.table, dtype=np.uint8).reshape(-1)
        if t.size != 1 << self.n:
            raise ArityError(f"table length {t.size} != 2^{self.n}")
        if np.any(t > 1):
            raise ValueError("truth table entries must be 0/1")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        return f"BooleanFunction(n={self.n}, tt={to_hex(self)})"

    def __call__(self, x: Sequence[int]) -> int:
        return eval_fn(self, x)

    def __xor__(self, other: "BooleanFunction") -> "BooleanFunction":
        if other.n != self.n:
            raise ArityError("arity mismatch")
        return BooleanFunction(self.n, self.table ^ other.table)

    def __and__(self, other: "BooleanFunction") -> "BooleanFunction":
        if other.n != self.n:
            raise ArityError("arity mismatch")
        return BooleanFunction(self.n, self.table & other.table)

    def __invert__(self) -> "BooleanFunction":
        return BooleanFunction(self.n, 1 - self.table)

    @classmethod
    def from_callable(cls, n: int, fn) -> "BooleanFunction":
        _check_dense(n)
        return cls(n, [fn(bits_of(i, n)) & 1 for i in range(1 << n)])


@dataclass(frozen=True)
class AnfForm:
    n: int
    monomials: frozenset[int]

    def __post_init__(self):
        if self.n < 1:
            raise ArityError(f"arity must be >= 1, got {self.n}")
        mons = frozenset(self.monomials)
        if any(m >> self.n for m in mons):
            raise ArityError("monomial uses a variable beyond the arity")
        object.__setattr__(self, "monomials", mons)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "AnfForm":
        mons: set[int] = set()
        for s in sets:
            mons ^= {mask_from_set(s)}  # repeated monomials cancel
        return cls(n, frozenset(mons))

    def sorted_monomials(self) -> list[int]:
        return sorted(self.monomials, key=canonical_key)

    def as_sets(self) -> list[tuple[int, ...]]:
        return [set_from_mask(m) for m in self.sorted_monomials()]

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.monomials), default=0)

    def __call__(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise ArityError(f"expected {self.n} bits, got {len(x)}")
        xm = index_of(x)
        return sum(1 for m in self.monomials if m & xm == m) & 1

    def __xor__(self, other: "AnfForm") -> "AnfForm":
        if other.n != self.n:
            raise ArityError("arity mismatch")
        return AnfForm(self.n, self.monomials ^ other.monomials)

    def __str__(self):
        if not self.monomials:
            return "0"
        parts = []
        for s in self.as_sets():
            parts.append("*".join(f"x{i}" for i in s) if s else "1")
        return " + ".join(parts)


@dataclass(frozen=True)
class SymmetricFunction:
    n: int
    value_vector: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ArityError(f"arity must be >= 0, got {self.n}")
        v = tuple(int(b) for b in self.value_vector)
        if len(v) != self.n + 1:
            raise ArityError(f"value vector length {len(v)} != n+1 = {self.n + 1}")
        if any(b not in (0, 1) for b in v):
            raise ValueError("value vector entries must be 0/1")
        object.__setattr__(self, "value_vector", v)

    def __call__(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise ArityError(f"expected {self.n} bits, got {len(x)}")
        return self.value_vector[sum(x)]

    def __xor__(self, other: "SymmetricFunction") -> "SymmetricFunction":
        if other.n != self.n:
            raise ArityError("arity mismatch")
        return SymmetricFunction(self.n, tuple(a ^ b for a, b in zip(self.value_vector, other.value_vector)))

    def __and__(self, other: "SymmetricFunction") -> "SymmetricFunction":
        if other.n != self.n:
            raise ArityError("arity mismatch")
        return SymmetricFunction(self.n, tuple(a & b for a, b in zip(self.value_vector, other.value_vector)))

    def __invert__(self) -> "SymmetricFunction":
        return SymmetricFunction(self.n, tuple(1 - a for a in self.value_vector))

    def to_boolean(self) -> BooleanFunction:
        _check_dense(self.n)
        w = hamming_weights(self.n)
        return BooleanFunction(self.n, np.asarray(self.value_vector, dtype=np.uint8)[w])

    def csf_coefficients(self) -> tuple[int, ...]:
        """Coefficients c_k of f = XOR_k c_k C^k.

        Peels from low weight upward: C^k vanishes below weight k and is 1 at
        weight k, so the residual at weight k is exactly c_k.
        """
        residual = list(self.value_vector)
        coeffs = []
        for k in range(self.n + 1):
            c = residual[k]
            coeffs.append(c)
            if c:
                for w in range(k, self.n + 1):
                    residual[w] ^= _binom_odd(w, k)
        return tuple(coeffs)

    def to_anf(self) -> AnfForm:
        mons: set[int] = set()
        for k, c in enumerate(self.csf_coefficients()):
            if c:
                mons.update(subsets_of_size(self.n, k))
        return AnfForm(max(self.n, 1), frozenset(mons))

    @property
    def degree(self) -> int:
        return max((k for k, c in enumerate(self.csf_coefficients()) if c), default=0)


def bits_of(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def index_of(x: Sequence[int]) -> int:
    idx = 0
    for i, b in enumerate(x):
        if b not in (0, 1):
            raise ValueError(f"input bits must be 0/1, got {b}")
        idx |= b << i
    return idx


def hamming_weights(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    w = np.zeros_like(idx)
    for i in range(n):
        w += (idx >> i) & 1
    return w


def eval_fn(f, x: Sequence[int]) -> int:
    """f(x) for any of the three representations."""
    if len(x) != f.n:
        raise ArityError(f"expected {f.n} bits, got {len(x)}")
    if isinstance(f, BooleanFunction):
        return int(f.table[index_of(x)])
    return int(f(x))


def _mobius(table: np.ndarray, n: int) -> np.ndarray:
    a = np.array(table, dtype=np.uint8).reshape(-1)
    for i in range(n):
        a = a.reshape(-1, 2, 1 << i)
        a[:, 1, :] ^= a[:, 0, :]
    return a.reshape(-1)


def anf_from_truth(f: BooleanFunction) -> AnfForm:
    coeffs = _mobius(f.table, f.n)
    return AnfForm(f.n, frozenset(int(m) for m in np.flatnonzero(coeffs)))


def truth_from_anf(a: AnfForm) -> BooleanFunction:
    _check_dense(a.n)
    coeffs = np.zeros(1 << a.n, dtype=np.uint8)
    for m in a.monomials:
        coeffs[m] = 1
    # the binary Moebius transform is an involution
    return BooleanFunction(a.n, _mobius(coeffs, a.n))


def is_symmetric(f: BooleanFunction) -> Optional[SymmetricFunction]:
    w = hamming_weights(f.n)
    v = np.zeros(f.n + 1, dtype=np.uint8)
    v[w] = f.table  # last write wins; checked below
    if np.array_equal(v[w], f.table):
        return SymmetricFunction(f.n, tuple(int(b) for b in v))
    return None


def _binom_odd(w: int, k: int) -> int:
    # Lucas: binom(w, k) is odd iff the bits of k are a subset of the bits of w
    return int(k & ~w == 0) if 0 <= k <= w else 0


def csf(k: int, n: int) -> SymmetricFunction:
    """Complete symmetric function C^k; value at weight w is binom(w, k) mod 2."""
    if k < 0 or k > n:
        raise ValueError(f"csf degree must satisfy 0 <= k <= n, got k={k}, n={n}")
    return SymmetricFunction(n, tuple(_binom_odd(w, k) for w in range(n + 1)))


def count_fn(m: int, n: int) -> SymmetricFunction:
    """Count(x, m) = 1 iff |x| is divisible by m (m a power of two)."""
    if m < 2 or m & (m - 1):
        raise ValueError(f"modulus must be a power of two >= 2, got {m}")
    return SymmetricFunction(n, tuple(int(w % m == 0) for w in range(n + 1)))


def decompose_csf(k: int) -> tuple[int, ...]:
    """Exponents r with C^k = AND_r C^(2^r): the set bits of k."""
    if k < 1:
        raise ValueError(f"decomposition needs k >= 1, got {k}")
    return tuple(r for r in range(k.bit_length()) if (k >> r) & 1)


def and_n(n: int) -> BooleanFunction:
    t = np.zeros(1 << n, dtype=np.uint8)
    t[-1] = 1
    return BooleanFunction(n, t)


def parity(n: int) -> BooleanFunction:
    return BooleanFunction(n, hamming_weights(n) & 1)


def almost_csf(k: int, n: int, t: int) -> AnfForm:
    """Member of [aC^k]: C^k with its t lexicographically-first k-monomials removed."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    mons = subsets_of_size(n, k)
    if t > len(mons):
        raise ValueError(f"C^{k} on {n} bits has only {len(mons)} monomials, cannot drop {t}")
    return AnfForm(n, frozenset(mons[t:]))


def zeta_c(f: AnfForm) -> SymmetricFunction:
    """Symmetrization that completes every monomial size present in f to its CSF."""
    sizes = {popcount(m) for m in f.monomials}
    v = [0] * (f.n + 1)
    for k in sizes:
        for w, b in enumerate(csf(k, f.n).value_vector):
            v[w] ^= b
    return SymmetricFunction(f.n, tuple(v))


def complement_anf(f: AnfForm, sym: SymmetricFunction) -> AnfForm:
    """ANF of f XOR sym, computed on monomial sets (no truth table)."""
    if f.n != sym.n:
        raise ArityError("arity mismatch")
    return f ^ sym.to_anf()


def complement_tilde(f: AnfForm, sym: SymmetricFunction) -> BooleanFunction:
    if f.n != sym.n:
        raise ArityError("arity mismatch")
    return truth_from_anf(f) ^ sym.to_boolean()


# --- textual function specs -------------------------------------------------

class ParseError(ValueError):
    pass


_MONO_RE = re.compile(r"^x(\d+)$")


def parse_anf(body: str, n: Optional[int] = None) -> AnfForm:
    """Parse ``x1*x2 + x2*x3 + 1``; ``+`` is XOR."""
    sets: list[tuple[int, ...]] = []
    body = body.strip()
    if body and body != "0":
        for term in body.split("+"):
            term = term.strip()
            if term == "1":
                sets.append(())
                continue
            idx = []
            for factor in term.split("*"):
                m = _MONO_RE.match(factor.strip())
                if not m:
                    raise ParseError(f"bad ANF factor {factor!r}")
                idx.append(int(m.group(1)))
            if any(i < 1 for i in idx):
                raise ParseError("variables are numbered from x1")
            sets.append(tuple(sorted(set(idx))))
    top = max((max(s) for s in sets if s), default=1)
    if n is None:
        n = top
    elif n < top:
        raise ParseError(f"arity {n} too small for variable x{top}")
    return AnfForm.from_sets(n, sets)


def parse_truth_hex(body: str) -> BooleanFunction:
    """``tt:<hex>`` (low index first, bit b of digit d is entry 4d+b) or ``tt:<n>:<hex>``."""
    n = None
    if ":" in body:
        n_str, body = body.split(":", 1)
        n = int(n_str)
    digits = body.strip().lower()
    if not digits or any(c not in "0123456789abcdef" for c in digits):
        raise ParseError(f"bad hex truth table {body!r}")
    bits = [(int(c, 16) >> b) & 1 for c in digits for b in range(4)]
    if n is None:
        size = len(bits)
        n = size.bit_length() - 1
        if size != 1 << n or n < 2:
            raise ParseError("hex length must be a power of two; use tt:<n>:<hex> for n=1")
    if len(bits) < (1 << n) or any(bits[1 << n:]):
        raise ParseError(f"hex table does not match arity {n}")
    return BooleanFunction(n, bits[: 1 << n])


def to_hex(f: BooleanFunction) -> str:
    t = list(f.table) + [0] * (-len(f.table) % 4)
    return "".join(f"{sum(int(t[4 * d + b]) << b for b in range(4)):x}" for d in range(len(t) // 4))


def parse_function(spec: str):
    """Resolve a function spec string.

    Returns a BooleanFunction, AnfForm or SymmetricFunction depending on the
    form used: ``anf:``, ``tt:``, ``sym:`` or ``builtin:NAME:...``.
    """
    if ":" not in spec:
        raise ParseError(f"function spec needs a kind prefix, got {spec!r}")
    kind, body = spec.split(":", 1)
    kind = kind.strip().lower()
    try:
        if kind == "anf":
            return parse_anf(body)
        if kind == "tt":
            return parse_truth_hex(body)
        if kind == "sym":
            bits = [int(b) for b in body.split(",") if b.strip()]
            return SymmetricFunction(len(bits) - 1, tuple(bits))
        if kind == "builtin":
            return _parse_builtin(body)
    except ParseError:
        raise
    except (ValueError, IndexError) as exc:
        raise ParseError(f"cannot parse {spec!r}: {exc}") from exc
    raise ParseError(f"unknown function kind {kind!r}")


def _parse_builtin(body: str):
    name, *args = body.split(":")
    nums = [int(a) for a in args]
    name = name.upper()
    if name == "AND" and len(nums) == 1:
        return csf(nums[0], nums[0])
    if name == "PARITY" and len(nums) == 1:
        return csf(1, nums[0])
    if name == "C" and len(nums) == 2:
        return csf(nums[0], nums[1])
    if name == "COUNT" and len(nums) == 2:
        return count_fn(nums[0], nums[1])
    if name == "AC" and len(nums) == 3:
        return almost_csf(*nums)
    raise ParseError(f"unknown builtin {body!r}")


def as_anf(f) -> AnfForm:
    if isinstance(f, AnfForm):
        return f
    if isinstance(f, SymmetricFunction):
        return f.to_anf()
    return anf_from_truth(f)


def as_boolean(f) -> BooleanFunction:
    if isinstance(f, BooleanFunction):
        return f
    if isinstance(f, SymmetricFunction):
        return f.to_boolean()
    return truth_from_anf(f)


def as_symmetric(f) -> Optional[SymmetricFunction]:
    if isinstance(f, SymmetricFunction):
        return f
    return is_symmetric(as_boolean(f))
