"""Measurement assignments on GHZ states.

Qubit i measures M(alpha) = cos(alpha) X + sin(alpha) Y with
alpha = pi * (theta_i + phi_i * s_i), where s_i = L_i(x) is a parity of the
input.  Angles are stored as multiples of pi, reduced into [0, 2).
The output is final_constant XOR the parity of the outcome bits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .boolfn import ArityError, ResourceCapError, canonical_key, mask_from_set, popcount, set_from_mask
from .polynomial import MultilinearPoly, NonDyadicError, granularity_of

MAX_DENSE_QUBITS = 12


class NondeterministicPoint(ValueError):
    """Total angle at this input is not an integer multiple of pi."""


class EmptyAssignmentError(ValueError):
    pass


def reduce_angle(t) -> Fraction:
    t = t if isinstance(t, Fraction) else Fraction(t)
    if 0 <= t < 2:
        return t
    return t % 2


def angle_str(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"


@dataclass(frozen=True)
class LinearForm:
    constant: int
    support: int

    def __post_init__(self):
        if self.constant not in (0, 1):
            raise ValueError("constant must be a bit")

    def __call__(self, x: Sequence[int]) -> int:
        xm = 0
        for i, b in enumerate(x):
            xm |= (b & 1) << i
        return self.constant ^ (popcount(self.support & xm) & 1)

    @property
    def size(self) -> int:
        return popcount(self.support)

    def __str__(self):
        parts = [f"x{i}" for i in set_from_mask(self.support)]
        if self.constant:
            parts.insert(0, "1")
        return "+".join(parts) or "0"


@dataclass(frozen=True)
class Qubit:
    selector: LinearForm
    theta: Fraction
    phi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_angle(self.theta))
        object.__setattr__(self, "phi", reduce_angle(self.phi))

    def angle(self, s: int) -> Fraction:
        return self.theta + self.phi * s


@dataclass(frozen=True)
class MeasurementAssignment:
    n: int
    qubits: tuple[Qubit, ...]
    final_constant: int = 0

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        for q in self.qubits:
            if q.selector.support >> self.n:
                raise ArityError("selector uses a variable beyond the arity")

    @property
    def k(self) -> int:
        return len(self.qubits)

    def selector_bits(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.n:
            raise ArityError(f"expected {self.n} bits, got {len(x)}")
        return [q.selector(x) for q in self.qubits]

    def total_angle(self, x: Sequence[int]) -> Fraction:
        """Sum of qubit angles at x, as a multiple of pi (not reduced)."""
        return sum((q.angle(s) for q, s in zip(self.qubits, self.selector_bits(x))), Fraction(0))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "qubits": [
                {"S": list(set_from_mask(q.selector.support)), "a0": q.selector.constant,
                 "theta": angle_str(q.theta), "phi": angle_str(q.phi)}
                for q in self.qubits
            ],
            "final_constant": self.final_constant,
        }

    @classmethod
    def from_json(cls, obj: Union[str, dict]) -> "MeasurementAssignment":
        if isinstance(obj, str):
            obj = json.loads(obj)
        qubits = tuple(
            Qubit(LinearForm(int(q.get("a0", 0)), mask_from_set(q["S"])),
                  Fraction(q["theta"]), Fraction(q["phi"]))
            for q in obj["qubits"]
        )
        a = cls(int(obj["n"]), qubits, int(obj.get("final_constant", 0)))
        if "k" in obj and int(obj["k"]) != a.k:
            raise ValueError(f"k={obj['k']} does not match {a.k} qubits")
        return a


def assignment_from_poly(p: MultilinearPoly, allow_empty: bool = False) -> MeasurementAssignment:
    """One qubit per non-constant term, in (size, lex) order.

    theta_i = (sum of all coefficients) / k and phi_i = -2 c_S, so the total
    angle at x is exactly p(x).  A constant polynomial has no qubits; with
    ``allow_empty`` it becomes a k = 0 assignment whose output is the
    constant's parity.
    """
    support = [s for s in sorted(p.terms, key=canonical_key) if s]
    k = len(support)
    if k == 0:
        c = p.constant
        if not allow_empty:
            raise EmptyAssignmentError("polynomial has no non-constant terms")
        if c.denominator != 1:
            raise NondeterministicPoint(f"constant {c} is not an integer")
        return MeasurementAssignment(p.n, (), c.numerator & 1)
    theta = sum(p.terms.values(), Fraction(0)) / k
    qubits = tuple(Qubit(LinearForm(0, s), theta, -2 * p.terms[s]) for s in support)
    return MeasurementAssignment(p.n, qubits, 0)


def normalize(a: MeasurementAssignment) -> MeasurementAssignment:
    """Move all of theta onto qubit 0 and fold its integer part into the output bit."""
    if a.k == 0:
        return a
    T = sum((q.theta for q in a.qubits), Fraction(0))
    whole = math.floor(T)
    frac = T - whole
    qubits = [replace(q, theta=Fraction(0)) for q in a.qubits]
    qubits[0] = replace(qubits[0], theta=frac)
    return MeasurementAssignment(a.n, tuple(qubits), a.final_constant ^ (whole & 1))


def evaluate_deterministic(a: MeasurementAssignment, x: Sequence[int]) -> int:
    total = a.total_angle(x)
    if total.denominator != 1:
        raise NondeterministicPoint(f"total angle {total}*pi at x={tuple(x)} is not a multiple of pi")
    return (total.numerator & 1) ^ a.final_constant


def evaluate_all(a: MeasurementAssignment) -> list[int]:
    out = []
    for idx in range(1 << a.n):
        out.append(evaluate_deterministic(a, [(idx >> i) & 1 for i in range(a.n)]))
    return out


def is_deterministic(a: MeasurementAssignment) -> bool:
    try:
        evaluate_all(a)
    except NondeterministicPoint:
        return False
    return True


# --- sampling ----------------------------------------------------------------

@dataclass
class OutcomeStats:
    shots: int
    ones: int
    p_one: float
    seed: Optional[int]

    @property
    def rate(self) -> float:
        return self.ones / self.shots

    @property
    def sigma(self) -> float:
        return math.sqrt(max(self.p_one * (1 - self.p_one), 0.0) / self.shots)

    def within(self, n_sigma: float = 3.0) -> bool:
        if self.sigma == 0:
            return self.ones in (0, self.shots) and abs(self.rate - self.p_one) < 1e-12
        return abs(self.rate - self.p_one) <= n_sigma * self.sigma


def output_probability(a: MeasurementAssignment, x: Sequence[int]) -> float:
    """P(output = 1) from the cosine law."""
    c = math.cos(math.pi * float(a.total_angle(x)))
    p_parity_one = (1 - c) / 2
    return 1 - p_parity_one if a.final_constant else p_parity_one


def sample_outcomes(a: MeasurementAssignment, x: Sequence[int], shots: int,
                    seed: Optional[int] = None, rng: Optional[np.random.Generator] = None,
                    return_bits: bool = False):
    """Sample k-bit outcome strings and report the output-bit statistics.

    The first k-1 bits are uniform; the last fixes the parity, which is 1 with
    probability (1 - cos alpha)/2.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    if a.k == 0:
        out = np.full(shots, a.final_constant, dtype=np.uint8)
        stats = OutcomeStats(shots, int(out.sum()), float(a.final_constant), seed)
        return (stats, np.zeros((shots, 0), dtype=np.uint8)) if return_bits else stats
    c = math.cos(math.pi * float(a.total_angle(x)))
    p_par = min(max((1 - c) / 2, 0.0), 1.0)
    parity = (rng.random(shots) < p_par).astype(np.uint8)
    free = rng.integers(0, 2, size=(shots, a.k - 1), dtype=np.uint8)
    last = (free.sum(axis=1) & 1).astype(np.uint8) ^ parity
    bits = np.concatenate([free, last[:, None]], axis=1)
    out = (bits.sum(axis=1) & 1).astype(np.uint8) ^ a.final_constant
    stats = OutcomeStats(shots, int(out.sum()), 1 - p_par if a.final_constant else p_par, seed)
    return (stats, bits) if return_bits else stats


# --- dense oracle -------------------------------------------------------------

def _equatorial(alpha: float) -> np.ndarray:
    return np.array([[0, np.exp(-1j * alpha)], [np.exp(1j * alpha), 0]], dtype=complex)


def ghz_state(k: int) -> np.ndarray:
    if k > MAX_DENSE_QUBITS:
        raise ResourceCapError(f"dense GHZ capped at k={MAX_DENSE_QUBITS}")
    psi = np.zeros((2,) * k, dtype=complex)
    psi[(0,) * k] = psi[(1,) * k] = 1 / math.sqrt(2)
    return psi


def dense_expectation(a: MeasurementAssignment, x: Sequence[int]) -> float:
    """<GHZ| M_1 (x) ... (x) M_k |GHZ> by explicit tensor contraction."""
    if a.k > MAX_DENSE_QUBITS:
        raise ResourceCapError(f"dense oracle capped at k={MAX_DENSE_QUBITS}, got {a.k}")
    if a.k == 0:
        raise EmptyAssignmentError("no qubits")
    psi = ghz_state(a.k)
    phi = psi
    for i, (q, s) in enumerate(zip(a.qubits, a.selector_bits(x))):
        M = _equatorial(math.pi * float(q.angle(s)))
        phi = np.moveaxis(np.tensordot(M, phi, axes=([1], [i])), 0, i)
    val = np.vdot(psi, phi)
    return float(val.real)


def dense_output_probability(a: MeasurementAssignment, x: Sequence[int]) -> float:
    p_par = (1 - dense_expectation(a, x)) / 2
    return 1 - p_par if a.final_constant else p_par


# --- Clifford hierarchy ---------------------------------------------------------

def clifford_level(a: MeasurementAssignment, normalized: bool = True) -> int:
    """Highest Clifford-hierarchy level among the measured operators.

    M(pi t) sits at level gran(t) + 1; both settings s = 0 and s = 1 count.
    """
    b = normalize(a) if normalized else a
    level = 1
    for q in b.qubits:
        try:
            g = max(granularity_of(q.theta), granularity_of(q.theta + q.phi))
        except NonDyadicError:
            raise NonDyadicError(f"qubit angle {q.theta}, {q.phi} is not dyadic") from None
        level = max(level, g + 1)
    return level


def perturb(a: MeasurementAssignment, i: int, dphi=Fraction(0), dtheta=Fraction(0)) -> MeasurementAssignment:
    qs = list(a.qubits)
    qs[i] = replace(qs[i], phi=reduce_angle(qs[i].phi + dphi), theta=reduce_angle(qs[i].theta + dtheta))
    return MeasurementAssignment(a.n, tuple(qs), a.final_constant)


def random_assignment(n: int, k: int, rng: np.random.Generator, max_gran: int = 4) -> MeasurementAssignment:
    """Random selectors and dyadic angles, for sampler checks."""
    den = 1 << max_gran
    qubits = []
    for _ in range(k):
        sel = LinearForm(int(rng.integers(0, 2)), int(rng.integers(0, 1 << n)))
        qubits.append(Qubit(sel, Fraction(int(rng.integers(0, 2 * den)), den),
                            Fraction(int(rng.integers(0, 2 * den)), den)))
    return MeasurementAssignment(n, tuple(qubits), int(rng.integers(0, 2)))
