"""Compilation strategies from Boolean functions to multilinear polynomials.

FR   Fourier transform of the whole truth table.
EF   Fourier transform of each ANF monomial, summed.
KR   Krawtchouk transform of each monomial with a greedy sign choice.
CSF  symmetric functions via products of closed-form CSF polynomials.
SC   min(KR(f), KR(f ^ zeta(f)) + CSF(zeta(f))).
"""
from __future__ import annotations

import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Callable, Optional, Union

import numpy as np

from .boolfn import (
    MAX_DENSE_ARITY,
    AnfForm,
    BooleanFunction,
    ResourceCapError,
    SymmetricFunction,
    and_n,
    as_anf,
    as_boolean,
    as_symmetric,
    canonical_key,
    complement_anf,
    csf,
    decompose_csf,
    popcount,
    zeta_c,
)
from .polynomial import (
    CLOSED_FORM_DEGREES,
    MultilinearPoly,
    add,
    c1_poly,
    csf_power2_poly,
    csf_power2_sparsity,
    embed,
    granularity,
    multiply,
    sparsity,
    verify_mod2,
)
from .transforms import krawtchouk_coefficients, walsh_hadamard_int

METHODS = ("FR", "EF", "KR", "CSF", "SC")
MAX_MONOMIAL_DEGREE = 24


class VerificationError(RuntimeError):
    """A construction produced a polynomial that fails the mod-2 check."""


@dataclass
class ConstructionReport:
    method: str
    poly: MultilinearPoly
    sparsity: int
    granularity: int
    elapsed: float
    notes: str = ""
    op_count: int = 0
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "sparsity": self.sparsity,
            "granularity": self.granularity,
            "elapsed_ms": round(self.elapsed * 1000, 3),
            "terms": len(self.poly.terms),
            "notes": self.notes,
        }


def _report(method: str, f, poly: MultilinearPoly, t0: float, notes: str = "",
            op_count: int = 0, verify: bool = True, **extra) -> ConstructionReport:
    if verify and not _verify(poly, f):
        raise VerificationError(f"{method} polynomial does not represent the input function")
    return ConstructionReport(method, poly, sparsity(poly), granularity(poly),
                              time.perf_counter() - t0, notes, op_count, dict(extra))


def _verify(poly: MultilinearPoly, f) -> bool:
    if isinstance(f, AnfForm) and f.n > MAX_DENSE_ARITY:
        sym = as_symmetric_anf(f)
        if sym is None:
            return verify_mod2(poly, f, sample=True, samples=2048)
        return verify_mod2(poly, sym)
    return verify_mod2(poly, f)


def as_symmetric_anf(f: AnfForm) -> Optional[SymmetricFunction]:
    """Symmetric view of an ANF without building a truth table, if it is one."""
    sizes: dict[int, int] = {}
    for m in f.monomials:
        k = popcount(m)
        sizes[k] = sizes.get(k, 0) + 1
    if any(c != comb(f.n, k) for k, c in sizes.items()):
        return None
    v = [0] * (f.n + 1)
    for k in sizes:
        for w, b in enumerate(csf(k, f.n).value_vector):
            v[w] ^= b
    return SymmetricFunction(f.n, tuple(v))


# --- FR -------------------------------------------------------------------------

def construct_fr(f) -> ConstructionReport:
    t0 = time.perf_counter()
    bf = as_boolean(f)
    raw = walsh_hadamard_int(bf)
    den = 1 << bf.n
    nz = np.flatnonzero(raw)
    poly = MultilinearPoly(bf.n, {int(s): Fraction(int(raw[s]), den) for s in nz})
    return _report("FR", bf, poly, t0, op_count=bf.n << bf.n)


# --- EF -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _and_fourier(d: int) -> tuple[tuple[int, Fraction], ...]:
    """Fourier coefficients of AND on d variables (mask over those d)."""
    if d == 0:
        return ((0, Fraction(1)),)
    raw = walsh_hadamard_int(and_n(d))
    return tuple((int(s), Fraction(int(raw[s]), 1 << d)) for s in np.flatnonzero(raw))


def _positions(m: int) -> list[int]:
    return [i + 1 for i in range(m.bit_length()) if (m >> i) & 1]


def construct_ef(f) -> ConstructionReport:
    t0 = time.perf_counter()
    a = as_anf(f)
    if a.degree > MAX_MONOMIAL_DEGREE:
        raise ResourceCapError(f"EF is capped at degree {MAX_MONOMIAL_DEGREE}, got {a.degree}")
    acc: dict[int, Fraction] = {}
    ops = 0
    for m in a.sorted_monomials():
        d = popcount(m)
        coeffs = _and_fourier(d)
        local = MultilinearPoly(d, dict(coeffs))
        for s, c in embed(local, a.n, _positions(m)).terms.items():
            acc[s] = acc.get(s, 0) + c
        ops += (d << d) + (1 << d)
    return _report("EF", a, MultilinearPoly(a.n, acc), t0, op_count=ops)


# --- KR -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _delta_profile(d: int) -> tuple[Fraction, ...]:
    """Per-size Fourier coefficients of the monomial x_1...x_d (value vector delta_d)."""
    return tuple(krawtchouk_coefficients([0] * d + [1]))


@lru_cache(maxsize=None)
def _submask_table(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Local submasks of a d-bit full mask and their popcounts."""
    local = np.arange(1 << d, dtype=np.int64)
    pc = np.zeros_like(local)
    for i in range(d):
        pc += (local >> i) & 1
    return local, pc


def _scatter_submasks(m: int, n: int) -> np.ndarray:
    """Global masks of every subset of m, ordered as the local index."""
    pos = [p - 1 for p in _positions(m)]
    local, _ = _submask_table(len(pos))
    out = np.zeros_like(local)
    for i, p in enumerate(pos):
        out |= ((local >> i) & 1) << p
    return out


def monomial_poly_kr(m: int, n: int) -> MultilinearPoly:
    """Per-monomial KR polynomial: shared coefficient per subset size of m."""
    d = popcount(m)
    prof = _delta_profile(d)
    _, pc = _submask_table(d)
    glob = _scatter_submasks(m, n)
    return MultilinearPoly(n, {int(g): prof[int(k)] for g, k in zip(glob, pc)})


def _kr_dense(a: AnfForm, order: list[int], greedy: bool):
    """Accumulate signed monomial polys on a dense integer array scaled by 2^deg."""
    deg = a.degree
    acc = np.zeros(1 << a.n, dtype=np.int64)
    signs = []
    ops = 0
    for m in order:
        d = popcount(m)
        prof = _delta_profile(d)
        scaled = np.array([int(c * (1 << deg)) for c in prof], dtype=np.int64)
        _, pc = _submask_table(d)
        glob = _scatter_submasks(m, a.n)
        vals = scaled[pc]
        sign = 1
        if greedy:
            cur = acc[glob]
            nonconst = glob != 0
            live = (cur != 0) & nonconst
            plus = int(np.count_nonzero(live & (cur + vals == 0)))
            minus = int(np.count_nonzero(live & (cur - vals == 0)))
            sign = -1 if minus > plus else 1
        acc[glob] += sign * vals
        signs.append(sign)
        ops += (d + 1) ** 2 + (1 << d)
    den = 1 << deg
    nz = np.flatnonzero(acc)
    poly = MultilinearPoly(a.n, {int(s): Fraction(int(acc[s]), den) for s in nz})
    return poly, signs, ops


def _kr_sparse(a: AnfForm, order: list[int], greedy: bool):
    acc: dict[int, Fraction] = {}
    signs = []
    ops = 0
    for m in order:
        local = monomial_poly_kr(m, a.n).terms
        sign = 1
        if greedy:
            plus = minus = 0
            for s, c in local.items():
                cur = acc.get(s)
                if s and cur:
                    plus += cur + c == 0
                    minus += cur - c == 0
            sign = -1 if minus > plus else 1
        for s, c in local.items():
            v = acc.get(s, 0) + sign * c
            if v:
                acc[s] = v
            else:
                acc.pop(s, None)
        signs.append(sign)
        d = popcount(m)
        ops += (d + 1) ** 2 + (1 << d)
    return MultilinearPoly(a.n, acc), signs, ops


def construct_kr(f, greedy: bool = True, verify: bool = True) -> ConstructionReport:
    """KR with the greedy sign heuristic.

    Monomials are visited by decreasing size (lexicographic within a size);
    each gets the sign that cancels the most non-constant coefficients of the
    running sum, ties going to +.  The all-positive sum is also formed and the
    sparser of the two is kept, so the heuristic never loses sparsity.
    """
    t0 = time.perf_counter()
    a = as_anf(f)
    if a.degree > MAX_MONOMIAL_DEGREE:
        raise ResourceCapError(f"KR is capped at degree {MAX_MONOMIAL_DEGREE}, got {a.degree}")
    order = sorted(a.monomials, key=lambda m: (-popcount(m), canonical_key(m)[1]))
    dense = a.n <= 16 and a.degree < 62
    run = _kr_dense if dense else _kr_sparse
    poly, signs, ops = run(a, order, greedy)
    note = "signs=" + "".join("+" if s > 0 else "-" for s in signs)
    if greedy and any(s < 0 for s in signs):
        plain, _, ops2 = run(a, order, False)
        ops += ops2
        if sparsity(plain) < sparsity(poly):
            poly, note = plain, "signs=all+ (sparser than the greedy choice)"
    return _report("KR", a, poly, t0, notes=note, op_count=ops, verify=verify,
                   signs=tuple(signs), monomials=tuple(order))


# --- CSF ------------------------------------------------------------------------

@lru_cache(maxsize=256)
def csf_factor_poly(r: int, n: int) -> MultilinearPoly:
    """Polynomial for C^(2^r): parity for r=0, closed form up to 64, EF beyond."""
    k = 1 << r
    if k > n:
        raise ValueError(f"C^{k} needs n >= {k}")
    if r == 0:
        return c1_poly(n)
    if k in CLOSED_FORM_DEGREES:
        return csf_power2_poly(k, n)
    return construct_ef(csf(k, n).to_anf()).poly


@lru_cache(maxsize=256)
def csf_k_poly(k: int, n: int) -> MultilinearPoly:
    """Product of power-of-two factors realizing C^k."""
    if k == 0:
        return MultilinearPoly.constant_poly(n, 1)
    p = MultilinearPoly.constant_poly(n, 1)
    for r in decompose_csf(k):
        p = multiply(p, csf_factor_poly(r, n))
    return p


def construct_csf(f) -> ConstructionReport:
    t0 = time.perf_counter()
    sym = as_symmetric(f) if not isinstance(f, AnfForm) else as_symmetric_anf(f)
    if sym is None:
        raise ValueError("CSF construction needs a symmetric function")
    coeffs = sym.csf_coefficients()
    used = [k for k, c in enumerate(coeffs) if c]
    poly = MultilinearPoly(sym.n, {})
    for k in used:
        poly = add(poly, csf_k_poly(k, sym.n))
    fallback = [k for k in used if k and any((1 << r) > 64 for r in decompose_csf(k))]
    note = "C^" + ",".join(map(str, used)) if used else "constant 0"
    if fallback:
        note += f"; EF fallback for factors of {fallback}"
    return _report("CSF", sym, poly, t0, notes=note, op_count=len(poly.terms), csf_degrees=tuple(used))


# --- SC -------------------------------------------------------------------------

def construct_sc(f, zeta: Callable[[AnfForm], SymmetricFunction] = zeta_c) -> ConstructionReport:
    t0 = time.perf_counter()
    a = as_anf(f)
    r1 = construct_kr(a)
    sym = zeta(a)
    tilde = complement_anf(a, sym)
    r_tilde = construct_kr(tilde)
    r_sym = construct_csf(sym)
    p2 = add(r_tilde.poly, r_sym.poly)
    if not _verify(p2, a):
        raise VerificationError("SC second candidate failed verification")
    s1, s2 = sparsity(r1.poly), sparsity(p2)
    if s2 < s1:
        poly, note = p2, f"zeta branch ({s2} < KR {s1}); tilde has {len(tilde.monomials)} monomials"
    else:
        poly, note = r1.poly, f"KR branch ({s1} <= zeta {s2})"
    return _report("SC", a, poly, t0, notes=note, op_count=r1.op_count + r_tilde.op_count,
                   verify=False, candidates=(s1, s2))


# --- bounds -------------------------------------------------------------------

def factor_sparsity(r: int, n: int) -> int:
    """Sparsity of the CSF factor polynomial used for C^(2^r)."""
    k = 1 << r
    if r == 0:
        return 1
    if k in CLOSED_FORM_DEGREES:
        return csf_power2_sparsity(k, n)
    # EF support of C^k: every non-empty subset of size <= k
    return sum(comb(n, i) for i in range(1, k + 1))


def sparsity_bound(f: SymmetricFunction) -> int:
    """Sum over set CSF coefficients of prod (factor sparsity + 1)."""
    total = 0
    for i, c in enumerate(f.csf_coefficients()):
        if c and i:
            prod = 1
            for r in decompose_csf(i):
                prod *= factor_sparsity(r, f.n) + 1
            total += prod
    return total


def growth_exponent(k: int) -> int:
    """Exponent rho with sparsity(C^k) = O(n^rho) from the factor scalings.

    Factors up to C^64 grow as n^(2^(r-1)).  Beyond that the exponent is the
    n^(k-1) scaling known from the literature; the EF fallback actually used
    by ``csf_factor_poly`` grows as n^k, one power more.
    """
    rho = 0
    for r in decompose_csf(k):
        if r == 0:
            continue
        rho += (1 << (r - 1)) if r <= 6 else (1 << r) - 1
    return rho


# --- comparison -------------------------------------------------------------

def _budget_seconds(default: float = 30.0) -> float:
    env = os.environ.get("NMQC_TIME_BUDGET_MS")
    return float(env) / 1000 if env else default


def applicable_methods(f) -> list[str]:
    sym = as_symmetric_anf(f) if isinstance(f, AnfForm) else as_symmetric(f)
    n = f.n
    out = []
    if n <= MAX_DENSE_ARITY:
        out.append("FR")
    out += ["EF", "KR"]
    if sym is not None:
        out.append("CSF")
    out.append("SC")
    return out


RUNNERS: dict[str, Callable] = {
    "FR": construct_fr, "EF": construct_ef, "KR": construct_kr,
    "CSF": construct_csf, "SC": construct_sc,
}


def _child(method: str, f, conn) -> None:
    try:
        conn.send(("ok", RUNNERS[method](f)))
    except Exception as exc:  # shipped back to the parent as-is
        conn.send(("err", exc))
    finally:
        conn.close()


def compare_all(f, timeout: Optional[float] = None, methods=None) -> list[ConstructionReport]:
    """Run every applicable method under a shared time budget, sparsest first.

    Each method runs in a forked child so that one past the deadline can be
    terminated.  Methods that time out or hit a resource cap are dropped from
    the table; their names are listed in the ``skipped`` attribute of the
    returned list.  A verification failure is re-raised.
    """
    timeout = _budget_seconds() if timeout is None else timeout
    methods = methods or applicable_methods(f)
    results: list[ConstructionReport] = []
    skipped: list[str] = []
    if "fork" not in mp.get_all_start_methods():
        # no cheap way to abandon work; run in-process and ignore the budget
        for m in methods:
            try:
                results.append(RUNNERS[m](f))
            except (ResourceCapError, ValueError) as exc:
                if isinstance(exc, VerificationError):
                    raise
                skipped.append(f"{m}:{type(exc).__name__}")
    else:
        ctx = mp.get_context("fork")
        procs = {}
        for m in methods:
            recv, send = ctx.Pipe(duplex=False)
            p = ctx.Process(target=_child, args=(m, f, send), daemon=True)
            p.start()
            send.close()
            procs[m] = (p, recv)
        deadline = time.perf_counter() + timeout
        try:
            for m, (p, recv) in procs.items():
                if not recv.poll(max(0.0, deadline - time.perf_counter())):
                    skipped.append(f"{m}:timeout")
                    continue
                try:
                    status, payload = recv.recv()
                except EOFError:
                    skipped.append(f"{m}:crashed")
                    continue
                if status == "ok":
                    results.append(payload)
                elif isinstance(payload, VerificationError):
                    raise payload
                else:
                    skipped.append(f"{m}:{type(payload).__name__}")
        finally:
            for p, recv in procs.values():
                if p.is_alive():
                    p.terminate()
                p.join()
                recv.close()
    results.sort(key=lambda r: (r.sparsity, METHODS.index(r.method)))
    out = _ReportList(results)
    out.skipped = skipped
    return out


class _ReportList(list):
    skipped: list
