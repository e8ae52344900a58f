"""Smith normal form over the integers and the symmetric-support decision.

Question answered: given a symmetric f and a set T of allowed subset sizes,
is there a symmetric polynomial representing f whose non-constant support
uses only sizes in T?  Such a polynomial has integer values g = v_f + 2 v_h
per weight, and its size-i coefficient is 2^-n (K g)_i, so the question is
whether 2 K_E v_h = -K_E v_f has an integer solution, E being the sizes
outside T.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .boolfn import SymmetricFunction, csf
from .polynomial import MultilinearPoly, SymmetricProfile, expand, profile_values_by_weight, verify_mod2
from .transforms import _kraw

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def det_bareiss(A: Matrix) -> int:
    """Exact integer determinant by fraction-free elimination."""
    M = [list(r) for r in A]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


@dataclass
class SnfDecomposition:
    """U A V = D with U, V unimodular and d_1 | d_2 | ... on the diagonal."""
    U: Optional[Matrix]
    D: Matrix
    V: Optional[Matrix]
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    def max_diag_bits(self) -> int:
        return max((abs(d).bit_length() for d in self.diagonal), default=0)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = gcd(a, b) >= 0 and x a + y b = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _hermite_rows(rows: Sequence[list[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite form of the first ``ncols`` columns, rows added one at a time.

    Extra trailing columns ride along, so appending an identity block records
    the transform.  Entries above each pivot are reduced into [0, pivot) after
    every insertion, which keeps intermediate growth in check.
    """
    piv: list[list] = []  # [column, row], columns increasing
    zero = []
    for r in rows:
        r = list(r)
        first = None
        for idx in range(len(piv)):
            c, p = piv[idx]
            lead = next((j for j in range(ncols) if r[j]), ncols)
            if lead < c:
                break  # r opens a new pivot column before this one
            b = r[c]
            if b == 0:
                continue
            a = p[c]
            if b % a == 0:
                q = b // a
                r = [v - q * u for u, v in zip(p, r)]
            else:
                g, x, y = xgcd(a, b)
                a1, b1 = a // g, b // g
                piv[idx][1] = [x * u + y * v for u, v in zip(p, r)]
                r = [a1 * v - b1 * u for u, v in zip(p, r)]
                if first is None:
                    first = idx
        lead = next((j for j in range(ncols) if r[j]), None)
        if lead is None:
            zero.append(r)
        else:
            if r[lead] < 0:
                r = [-v for v in r]
            pos = 0
            while pos < len(piv) and piv[pos][0] < lead:
                pos += 1
            piv.insert(pos, [lead, r])
            if first is None or pos < first:
                first = pos
        if first is None:
            continue
        for j in range(first, len(piv)):
            c, p = piv[j]
            d = p[c]
            for i in range(j):
                row = piv[i][1]
                e = row[c]
                if e < 0 or e >= d:
                    q = e // d
                    piv[i][1] = [u - q * v for u, v in zip(row, p)]
    return [p for _, p in piv] + zero


def _transpose(M: Matrix) -> Matrix:
    return [list(r) for r in zip(*M)]


def _monomial_pattern(M: Matrix) -> bool:
    """At most one nonzero in every row and every column."""
    return (all(sum(1 for v in r if v) <= 1 for r in M)
            and all(sum(1 for v in c if v) <= 1 for c in zip(*M)))


def smith_normal_form(A: Sequence[Sequence[int]], track: bool = True,
                      track_v: Optional[bool] = None) -> SnfDecomposition:
    """Alternate row and column Hermite forms until diagonal, then fix divisibility.

    ``track=False`` skips both transforms; ``track_v=False`` keeps U only,
    which is all a yes/no solvability test needs.
    """
    track_v = track if track_v is None else track_v
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0 or n == 0:
        raise ValueError("matrix dimensions must be positive")
    D = [[int(v) for v in row] for row in A]
    U = identity(m) if track else [[] for _ in range(m)]
    V = identity(n) if track_v else [[] for _ in range(n)]

    while True:
        aug = _hermite_rows([D[i] + U[i] for i in range(m)], n)
        D = [r[:n] for r in aug]
        U = [r[n:] for r in aug]
        if _monomial_pattern(D):
            break
        Dt = _transpose(D)
        aug = _hermite_rows([Dt[j] + V[j] for j in range(n)], m)
        D = _transpose([r[:m] for r in aug])
        V = [r[m:] for r in aug]  # kept transposed until the end
        if _monomial_pattern(D):
            break

    # one nonzero per row and column: permute rows and columns onto the diagonal
    pairs = [(i, next(j for j, v in enumerate(row) if v)) for i, row in enumerate(D) if any(row)]
    rank = len(pairs)
    rows_used = {i for i, _ in pairs}
    cols_used = {j for _, j in pairs}
    rperm = [i for i, _ in pairs] + [i for i in range(m) if i not in rows_used]
    cperm = [j for _, j in pairs] + [j for j in range(n) if j not in cols_used]
    D = [[D[i][j] for j in cperm] for i in rperm]
    U = [U[i] for i in rperm]
    V = [V[j] for j in cperm]
    for i in range(rank):
        if D[i][i] < 0:
            D[i][i] = -D[i][i]
            U[i] = [-v for v in U[i]]

    # gcd/lcm exchange on each diagonal pair: diag(a, b) -> diag(g, ab/g)
    for i in range(rank):
        for j in range(i + 1, rank):
            a, b = D[i][i], D[j][j]
            if b % a == 0:
                continue
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            U[i] = [u + v for u, v in zip(U[i], U[j])]
            ci, cj = V[i], V[j]
            V[i] = [x * p + y * q for p, q in zip(ci, cj)]
            V[j] = [ag * q - bg * p for p, q in zip(ci, cj)]
            q = y * bg
            U[j] = [v - q * u for u, v in zip(U[i], U[j])]
            D[i][i], D[j][j] = g, a * bg
    return SnfDecomposition(U if track else None, D, _transpose(V) if track_v else None, rank)


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int],
                  snf: Optional[SnfDecomposition] = None) -> Optional[list[int]]:
    """One integer solution of A w = b, or None if there is none."""
    snf = snf or smith_normal_form(A)
    c = matvec(snf.U, b)
    diag = snf.diagonal
    y = [0] * len(snf.V)
    for i, ci in enumerate(c):
        if i < snf.rank:
            if ci % diag[i]:
                return None
            y[i] = ci // diag[i]
        elif ci:
            return None
    return matvec(snf.V, y)


# --- symmetric support decision ------------------------------------------------

def allowed_sizes(n: int, t: int, rows: str = "growth", deg: Optional[int] = None) -> frozenset[int]:
    """Sizes allowed at growth level t.

    ``growth``: {0} + {1..t} + {n-t..n}, i.e. every size whose binomial is O(n^t).
    ``literal``: the printed row set read verbatim, forbidding sizes i with
    i > deg + s and i > n - deg/2 - s, where s = 0 at t = deg/2 - 1 and s = 1 at
    t = deg/2.  Needs ``deg``.
    """
    if rows == "growth":
        return frozenset({0} | set(range(1, min(t, n) + 1)) | set(range(max(n - t, 0), n + 1)))
    if rows == "literal":
        if deg is None:
            raise ValueError("the literal row set needs deg")
        s = 1 if 2 * t >= deg else 0
        forbidden = {i for i in range(n + 1) if i > deg + s and i > n - deg / 2 - s}
        return frozenset(set(range(n + 1)) - forbidden)
    raise ValueError(f"unknown row reading {rows!r}")


@lru_cache(maxsize=4096)
def _system_snf(n: int, E: tuple[int, ...], track_v: bool) -> SnfDecomposition:
    K = _kraw(n)
    return smith_normal_form([[2 * v for v in K[i]] for i in E], track=True, track_v=track_v)


def _divisibility_test(snf: SnfDecomposition, b: Sequence[int]) -> bool:
    c = matvec(snf.U, b)
    diag = snf.diagonal
    return all((ci % diag[i] == 0) if i < snf.rank else ci == 0 for i, ci in enumerate(c))


@dataclass
class FeasibilityResult:
    feasible: bool
    n: int
    allowed: frozenset
    witness: Optional[list[int]] = None  # v_h
    values: Optional[list[int]] = None   # g = v_f + 2 v_h, per weight
    certified: Optional[bool] = None
    max_diag_bits: int = 0
    elapsed: float = 0.0

    def profile(self) -> Optional[SymmetricProfile]:
        if self.values is None:
            return None
        K = _kraw(self.n)
        den = 1 << self.n
        return SymmetricProfile(self.n, tuple(
            Fraction(sum(K[s][j] * g for j, g in enumerate(self.values)), den) for s in range(self.n + 1)))

    def poly(self) -> Optional[MultilinearPoly]:
        sp = self.profile()
        return expand(sp) if sp is not None else None


def decide_symmetric_support(f: SymmetricFunction, T: Iterable[int], certify: Optional[bool] = None,
                             witness: bool = True) -> FeasibilityResult:
    """Decide whether f has a symmetric polynomial supported on sizes in T (0 always allowed).

    Feasible answers carry the witness v_h; with ``certify`` (default for
    n <= 14) the witness polynomial is expanded and checked exhaustively.
    """
    t0 = time.perf_counter()
    n = f.n
    allowed = frozenset(T) | {0}
    E = tuple(i for i in range(n + 1) if i not in allowed)
    v = list(f.value_vector)
    if not E:
        res = FeasibilityResult(True, n, allowed, [0] * (n + 1), v)
    else:
        K = _kraw(n)
        b = [-sum(K[i][j] * v[j] for j in range(n + 1)) for i in E]
        snf = _system_snf(n, E, witness)
        if witness:
            w = solve_integer(None, b, snf)
            feasible = w is not None
        else:
            w = None
            feasible = _divisibility_test(snf, b)
        res = FeasibilityResult(feasible, n, allowed, w,
                                [vj + 2 * wj for vj, wj in zip(v, w)] if w is not None else None,
                                max_diag_bits=snf.max_diag_bits())
    certify = (n <= 14) if certify is None else certify
    if res.feasible and res.values is not None and certify:
        res.certified = certify_witness(f, res)
    res.elapsed = time.perf_counter() - t0
    return res


def feasible_by_invariants(f: SymmetricFunction, T: Iterable[int]) -> bool:
    """Independent criterion: A w = b is solvable over the integers iff
    [A | b] has the same Smith invariants as A.  No transforms are tracked.
    """
    n = f.n
    allowed = frozenset(T) | {0}
    E = [i for i in range(n + 1) if i not in allowed]
    if not E:
        return True
    K = _kraw(n)
    b = [-sum(K[i][j] * f.value_vector[j] for j in range(n + 1)) for i in E]
    base = smith_normal_form([[2 * v for v in K[i]] for i in E], track=False)
    ext = smith_normal_form([[2 * v for v in K[i]] + [bi] for i, bi in zip(E, b)], track=False)
    if ext.rank != base.rank:
        return False
    return ext.diagonal[:ext.rank] == base.diagonal[:base.rank]


def certify_witness(f: SymmetricFunction, res: FeasibilityResult) -> bool:
    """Expand the witness polynomial, check its support sizes and verify it."""
    sp = res.profile()
    for i, c in enumerate(sp.coeff_by_size):
        if c and i not in res.allowed:
            return False
    if any(val != g for val, g in zip(profile_values_by_weight(sp), res.values)):
        return False
    if f.n <= 20:
        return verify_mod2(expand(sp), f)
    return all((g - b) % 2 == 0 for g, b in zip(res.values, f.value_vector))


def minimal_profile(f: SymmetricFunction, rows: str = "growth") -> Optional[int]:
    """Smallest t for which T(t) admits a representation (None if none does)."""
    deg = f.degree
    for t in range(0, f.n // 2 + 2):
        if decide_symmetric_support(f, allowed_sizes(f.n, t, rows, deg), certify=False, witness=False).feasible:
            return t
    return None


# --- conjecture scan -----------------------------------------------------------

SCAN_FIELDS = ("k", "n", "t", "feasible", "elapsed_ms", "snf_max_diag_bits")


@dataclass
class ScanRow:
    k: int
    n: int
    t: int
    feasible: bool
    elapsed_ms: float
    snf_max_diag_bits: int


@dataclass
class ScanReport:
    rows: list[ScanRow] = field(default_factory=list)
    counterexamples: list[tuple[int, int]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_FIELDS)
        for r in self.rows:
            w.writerow([r.k, r.n, r.t, int(r.feasible), f"{r.elapsed_ms:.3f}", r.snf_max_diag_bits])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"fields": list(SCAN_FIELDS),
                "rows": [[r.k, r.n, r.t, r.feasible, round(r.elapsed_ms, 3), r.snf_max_diag_bits] for r in self.rows],
                "counterexamples": [list(c) for c in self.counterexamples]}


def conjecture_scan(k_list: Iterable[int], n_range: Iterable[int], rows: str = "growth",
                    progress=None) -> ScanReport:
    """For each C^k and n, test t = k/2 (expect feasible) and t = k/2 - 1 (expect not)."""
    report = ScanReport()
    for k in k_list:
        for n in n_range:
            if n < k:
                continue
            f = csf(k, n)
            hi_t = (k + 1) // 2
            outcome = {}
            for t in (hi_t - 1, hi_t):
                t0 = time.perf_counter()
                T = allowed_sizes(n, t, rows, k)
                res = decide_symmetric_support(f, T, certify=False, witness=False)
                report.rows.append(ScanRow(k, n, t, res.feasible, (time.perf_counter() - t0) * 1000,
                                           res.max_diag_bits))
                outcome[t] = res.feasible
            if not (outcome[hi_t] and not outcome[hi_t - 1]):
                report.counterexamples.append((k, n))
            if progress:
                progress(k, n, outcome)
    return report


# --- bounded brute force (test oracle) ------------------------------------------

class BruteForceTable:
    """Meet-in-the-middle search for v_h with entries in [-bound, bound].

    Built once per (n, E); ``find(f)`` then answers for any f.  Keys are a
    random linear hash of K_E-images, checked exactly before returning.
    """

    def __init__(self, n: int, allowed: Iterable[int], bound: int = 4, seed: int = 0):
        self.n = n
        self.allowed = frozenset(allowed) | {0}
        self.E = [i for i in range(n + 1) if i not in self.allowed]
        self.bound = bound
        K = np.array(_kraw(n), dtype=np.int64)
        self.KE = K[self.E] if self.E else np.zeros((0, n + 1), dtype=np.int64)
        rng = np.random.default_rng(seed)
        self.r = rng.integers(1, 1 << 62, size=len(self.E), dtype=np.int64).astype(np.uint64)
        self.m = (n + 1 + 1) // 2
        vals = np.arange(-bound, bound + 1, dtype=np.int64)
        self.left = self._grid(vals, self.m)
        self.right = self._grid(vals, n + 1 - self.m)
        lk = self._hash(2 * self.left @ self.KE[:, : self.m].T)
        self.order = np.argsort(lk, kind="stable")
        self.lkeys = lk[self.order]
        self.rkeys = self._hash(2 * self.right @ self.KE[:, self.m:].T)

    @staticmethod
    def _grid(vals: np.ndarray, d: int) -> np.ndarray:
        if d == 0:
            return np.zeros((1, 0), dtype=np.int64)
        g = np.stack(np.meshgrid(*([vals] * d), indexing="ij"), axis=-1)
        return g.reshape(-1, d)

    def _hash(self, rows: np.ndarray) -> np.ndarray:
        if rows.shape[1] == 0:
            return np.zeros(rows.shape[0], dtype=np.uint64)
        return (rows.astype(np.uint64) * self.r).sum(axis=1, dtype=np.uint64)

    def find(self, f: SymmetricFunction) -> Optional[list[int]]:
        if not self.E:
            return [0] * (self.n + 1)
        v = np.array(f.value_vector, dtype=np.int64)
        target = -(self.KE @ v)
        tkey = self._hash(target[None, :])[0]
        need = tkey - self.rkeys  # uint64 wraparound
        pos = np.searchsorted(self.lkeys, need)
        pos_c = np.minimum(pos, len(self.lkeys) - 1)
        hits = np.flatnonzero(self.lkeys[pos_c] == need)
        for ri in hits:
            p = pos_c[ri]
            while p < len(self.lkeys) and self.lkeys[p] == need[ri]:
                h = np.concatenate([self.left[self.order[p]], self.right[ri]])
                if np.array_equal(2 * (self.KE @ h), target):
                    return [int(x) for x in h]
                p += 1
        return None
