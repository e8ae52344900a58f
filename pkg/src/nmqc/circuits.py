"""Gate-level realizations of measurement assignments and their costs.

Cost models follow the XOR-tree / GHZ-cascade / Z-rotation accounting;
``emit_netlist`` produces an explicit layered program that ``run_netlist``
executes on a dense statevector for small k.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .assignment import (
    MAX_DENSE_QUBITS,
    MeasurementAssignment,
    clifford_level,
    normalize,
    reduce_angle,
)
from .boolfn import ResourceCapError, popcount, set_from_mask

DEFAULT_C = 2.5
Number = Union[int, float]


def _clog2(k: int) -> int:
    return (k - 1).bit_length() if k > 1 else 0


@dataclass(frozen=True)
class CircuitCost:
    depth: Number
    width: Number
    gates: Number

    def __post_init__(self):
        if min(self.depth, self.width, self.gates) < 0:
            raise ValueError("costs must be non-negative")

    def as_dict(self) -> dict:
        return {"depth": self.depth, "width": self.width, "gates": self.gates}


@dataclass(frozen=True)
class MeasurementLayer:
    cost: CircuitCost
    exact: bool
    level: int


# --- cost models ---------------------------------------------------------------

def _sizes(selectors) -> list[int]:
    out = []
    for s in selectors:
        m = s if isinstance(s, int) else s.support
        if m:
            out.append(popcount(m))
    return out


def linear_stage_cost(selectors: Iterable) -> CircuitCost:
    """Parallel XOR trees, one per selector (ints are taken as support masks)."""
    sizes = _sizes(selectors)
    if not sizes:
        return CircuitCost(0, 0, 0)
    return CircuitCost(max(_clog2(s) for s in sizes), sum(sizes), sum(s - 1 for s in sizes))


def post_stage_cost(k: int) -> CircuitCost:
    if k < 1:
        raise ValueError("k must be >= 1")
    return CircuitCost(_clog2(k), k, k - 1)


def ghz_log_layers(k: int) -> list[list[tuple]]:
    """H on qubit 0, then doubling CNOT layers: layer l pairs i -> i + 2^l."""
    if k < 1:
        raise ValueError("k must be >= 1")
    layers: list[list[tuple]] = [[("h", 0)]]
    span = 1
    while span < k:
        layers.append([("cnot", i, i + span) for i in range(span) if i + span < k])
        span *= 2
    return layers


def ghz_log_cost(k: int) -> CircuitCost:
    # counts the H layer, one more than the bare cascade
    return CircuitCost(_clog2(k) + 1, k, k)


def ghz_const_depth_cost(k: int) -> CircuitCost:
    if k < 4 or k % 2:
        raise ValueError(f"constant-depth GHZ needs even k >= 4, got {k}")
    return CircuitCost(6 + _clog2(k // 2 - 1), k, math.floor(Fraction(k * k, 8) + Fraction(11 * k, 4) - 4))


def ghz_cost(k: int, variant: str = "log") -> CircuitCost:
    if variant == "log":
        return ghz_log_cost(k)
    if variant == "const":
        return ghz_const_depth_cost(k)
    raise ValueError(f"unknown GHZ variant {variant!r}")


def _phase_gate_needed(q) -> bool:
    return q.theta != 0 or q.phi != 0


def rotation_depth(k: int, eps: float, c: float = DEFAULT_C) -> float:
    """Depth of one approximated Z-rotation at total accuracy eps."""
    return 4 * c * (2 + math.log2(k) + math.log2(1 / eps))


def measurement_layer(a: MeasurementAssignment, eps: Optional[float] = None,
                      c: float = DEFAULT_C) -> MeasurementLayer:
    level = clifford_level(a)
    b = normalize(a)
    k = b.k
    if level <= 2:
        phases = sum(1 for q in b.qubits if _phase_gate_needed(q))
        return MeasurementLayer(CircuitCost(2 if phases else 1, k, k + phases), True, level)
    if eps is None or not (0 < eps <= 1):
        if eps is None:
            raise ValueError(f"level-{level} measurements are approximated; give an accuracy 0 < eps <= 1")
        raise ValueError(f"accuracy must satisfy 0 < eps <= 1, got {eps}")
    depth = rotation_depth(k, eps, c)
    gates = 4 * c * k * math.log2(4 * k / eps)
    return MeasurementLayer(CircuitCost(depth, k, gates), False, level)


def approx_cost(k: int, xor_gates: int, eps: float, c: float = DEFAULT_C) -> CircuitCost:
    """Closed-form depth, width and gate totals for approximate realizations."""
    r = rotation_depth(k, eps, c)
    return CircuitCost(2 * math.log2(k) + r, k + xor_gates, xor_gates + k * (2 + r))


def total_cost(a: MeasurementAssignment, eps: Optional[float] = None, c: float = DEFAULT_C,
               ghz_variant: str = "log") -> tuple[CircuitCost, bool]:
    """Whole-program cost and exactness flag.

    Level >= 3 returns the closed-form totals.  Level <= 2 composes the exact
    stages: max(linear, GHZ) + measurement + post-processing in depth.
    """
    b = normalize(a)
    k = b.k
    if k == 0:
        # a constant: no quantum resources, at most one classical NOT
        return CircuitCost(b.final_constant, 0, b.final_constant), True
    xor_gates = sum(popcount(q.selector.support) - 1 for q in b.qubits if q.selector.support)
    meas = measurement_layer(b, eps, c)
    if not meas.exact:
        if ghz_variant != "log":
            base = approx_cost(k, xor_gates, eps, c)
            g = ghz_cost(k, ghz_variant)
            log = ghz_log_cost(k)
            return CircuitCost(base.depth - math.log2(k) + g.depth, base.width,
                               base.gates - log.gates + g.gates), False
        return approx_cost(k, xor_gates, eps, c), False
    lin = linear_stage_cost(q.selector for q in b.qubits)
    ghz = ghz_cost(k, ghz_variant)
    post = post_stage_cost(k)
    depth = max(lin.depth, ghz.depth) + meas.cost.depth + post.depth
    gates = lin.gates + ghz.gates + meas.cost.gates + post.gates
    return CircuitCost(depth, k + xor_gates, gates), True


# --- netlists -----------------------------------------------------------------

GATES = {"h", "x", "z", "s", "sdg", "cnot", "rz", "measure", "xor", "not"}

_NAMED_PHASE = {Fraction(0): None, Fraction(1, 2): "s", Fraction(1): "z", Fraction(3, 2): "sdg"}


@dataclass
class Netlist:
    qregs: int
    cregs: int
    layers: list[list[dict]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def gates(self) -> list[dict]:
        return [g for layer in self.layers for g in layer]

    def count(self, kind: Optional[str] = None) -> int:
        return sum(1 for g in self.gates() if kind is None or g["g"] == kind)

    def quantum_gate_count(self) -> int:
        return sum(1 for g in self.gates() if g["g"] not in ("xor", "not", "measure"))

    def to_json(self) -> dict:
        return {"qregs": self.qregs, "cregs": self.cregs, "layers": self.layers, "meta": self.meta}

    @classmethod
    def from_json(cls, obj: Union[str, dict]) -> "Netlist":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["qregs"], obj["cregs"], obj["layers"], obj.get("meta", {}))

    def to_text(self) -> str:
        lines = [f"qregs {self.qregs}", f"cregs {self.cregs}"]
        for li, layer in enumerate(self.layers):
            for g in layer:
                parts = [f"L{li}", g["g"]]
                parts += [f"q{i}" for i in g.get("q", [])]
                parts += [f"c{i}" for i in g.get("c", [])]
                if "t" in g:
                    parts.append(f"t={g['t']}")
                if "if" in g:
                    parts.append(f"if=c{g['if']}")
                lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"


def _operands(g: dict) -> set:
    ops = {("q", i) for i in g.get("q", [])} | {("c", i) for i in g.get("c", [])}
    if "if" in g:
        ops.add(("c", g["if"]))
    return ops


def schedule(gates: Sequence[dict]) -> list[list[dict]]:
    """ASAP layering; a gate goes one layer after the last use of any operand."""
    last: dict = {}
    layers: list[list[dict]] = []
    for g in gates:
        ops = _operands(g)
        li = max((last[o] for o in ops if o in last), default=-1) + 1
        while len(layers) <= li:
            layers.append([])
        layers[li].append(g)
        for o in ops:
            last[o] = li
    return layers


def _phase(q: int, t: Fraction, cond: Optional[int] = None) -> Optional[dict]:
    t = reduce_angle(t)
    if t == 0:
        return None
    name = _NAMED_PHASE.get(t) or "rz"
    g = {"g": name, "q": [q]}
    if name == "rz":
        g["t"] = f"{t.numerator}/{t.denominator}"
    if cond is not None:
        g["if"] = cond
    return g


def ghz_log_netlist(k: int) -> tuple[Netlist, CircuitCost]:
    gates = []
    for layer in ghz_log_layers(k):
        for op in layer:
            gates.append({"g": "h", "q": [op[1]]} if op[0] == "h" else {"g": "cnot", "q": [op[1], op[2]]})
    return Netlist(k, 0, schedule(gates)), ghz_log_cost(k)


def emit_netlist(a: MeasurementAssignment, ghz_variant: str = "log") -> Netlist:
    """Full program: selectors and GHZ in parallel, basis changes, measurement, parity.

    Classical registers: inputs [0, n), selectors [n, n+k), outcomes
    [n+k, n+2k), output n+2k.
    """
    if ghz_variant != "log":
        raise ValueError(f"netlists are only emitted for the log-depth GHZ variant, got {ghz_variant!r}")
    b = normalize(a)
    n, k = b.n, b.k
    sel0, out0, res = n, n + k, n + 2 * k
    gates: list[dict] = []
    for i, q in enumerate(b.qubits):
        for v in set_from_mask(q.selector.support):
            gates.append({"g": "xor", "c": [sel0 + i, v - 1]})
        if q.selector.constant:
            gates.append({"g": "not", "c": [sel0 + i]})
    if k:
        for layer in ghz_log_layers(k):
            for op in layer:
                gates.append({"g": "h", "q": [op[1]]} if op[0] == "h" else {"g": "cnot", "q": [op[1], op[2]]})
    for i, q in enumerate(b.qubits):
        for g in (_phase(i, -q.theta), _phase(i, -q.phi, cond=sel0 + i)):
            if g:
                gates.append(g)
        gates.append({"g": "h", "q": [i]})
        gates.append({"g": "measure", "q": [i], "c": [out0 + i]})
    for i in range(k):
        gates.append({"g": "xor", "c": [res, out0 + i]})
    if b.final_constant:
        gates.append({"g": "not", "c": [res]})
    level = clifford_level(b) if k else 1
    return Netlist(k, n + 2 * k + 1, schedule(gates),
                   {"n": n, "k": k, "output": res, "exact": level <= 2, "level": level})


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _diag(t: Fraction) -> np.ndarray:
    return np.diag([1, np.exp(1j * math.pi * float(t))])


_SINGLE = {"h": _H, "x": _X, "z": _diag(Fraction(1)), "s": _diag(Fraction(1, 2)), "sdg": _diag(Fraction(3, 2))}


def _apply1(psi: np.ndarray, U: np.ndarray, q: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(U, psi, axes=([1], [q])), 0, q)


def _apply_cnot(psi: np.ndarray, c: int, t: int) -> np.ndarray:
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[c] = 1
    sub = psi[tuple(idx)]
    tt = t if t < c else t - 1
    psi[tuple(idx)] = np.flip(sub, axis=tt)
    return psi


def run_netlist(net: Netlist, inputs: Sequence[int] = (), return_state: bool = False):
    """Execute on a statevector; returns P(output bit = 1).

    Measurements are deferred: each classical bit is an array over the 2^k
    computational-basis outcomes, so classical logic on outcomes is exact.
    """
    k = net.qregs
    if k > MAX_DENSE_QUBITS:
        raise ResourceCapError(f"netlist execution capped at k={MAX_DENSE_QUBITS}")
    size = 1 << k
    basis = np.arange(size)
    creg = [np.zeros(size, dtype=np.uint8) for _ in range(net.cregs)]
    for i, v in enumerate(inputs):
        creg[i][:] = v
    psi = np.zeros((2,) * k, dtype=complex) if k else np.ones((), dtype=complex)
    if k:
        psi[(0,) * k] = 1
    for layer in net.layers:
        for g in layer:
            name = g["g"]
            if name == "xor":
                d, s = g["c"]
                creg[d] = creg[d] ^ creg[s]
                continue
            if name == "not":
                creg[g["c"][0]] = creg[g["c"][0]] ^ 1
                continue
            if name == "measure":
                q = g["q"][0]
                # axis q is the most significant of the flattened index
                creg[g["c"][0]] = ((basis >> (k - 1 - q)) & 1).astype(np.uint8)
                continue
            if "if" in g:
                cond = creg[g["if"]]
                if cond.min() != cond.max():
                    raise ValueError("quantum gate conditioned on an outcome-dependent bit")
                if not cond[0]:
                    continue
            if name == "cnot":
                psi = _apply_cnot(psi, *g["q"])
            elif name == "rz":
                psi = _apply1(psi, _diag(Fraction(g["t"])), g["q"][0])
            elif name in _SINGLE:
                psi = _apply1(psi, _SINGLE[name], g["q"][0])
            else:
                raise ValueError(f"unknown gate {name!r}")
    probs = np.abs(psi.reshape(-1)) ** 2
    out = creg[net.meta.get("output", net.cregs - 1)] if net.cregs else np.zeros(size, dtype=np.uint8)
    p1 = float(np.sum(probs * out))
    return (p1, psi) if return_state else p1
