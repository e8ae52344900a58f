#!/usr/bin/env python3
"""Rebuild the three worked examples and print what each one produces.

    python3 scripts/reproduce_examples.py
"""
from collections import Counter

from nmqc.assignment import assignment_from_poly, clifford_level, dense_expectation, evaluate_all
from nmqc.boolfn import and_n, csf, parse_function, popcount
from nmqc.circuits import total_cost
from nmqc.constructions import compare_all, construct_csf, construct_fr, construct_kr


def inputs(n):
    return [[(i >> b) & 1 for b in range(n)] for i in range(1 << n)]


def and2():
    print("== AND on 2 bits, Fourier construction")
    r = construct_fr(and_n(2))
    print("polynomial:", r.poly.pretty())
    a = assignment_from_poly(r.poly)
    for q in a.qubits:
        print(f"  selector {q.selector}  theta={q.theta}pi  phi={q.phi}pi")
    for x in inputs(2):
        print(f"  x={x}  exact={evaluate_all(a)[x[0] + 2 * x[1]]}  <M>={dense_expectation(a, x):+.3f}")
    print("clifford level:", clifford_level(a), " cost:", total_cost(a)[0].as_dict())


def example_two():
    print("\n== x1 x2 + x2 x3, Krawtchouk construction with greedy signs")
    f = parse_function("anf: x1*x2 + x2*x3")
    r = construct_kr(f)
    print("XOR basis:", r.poly.pretty(xor_basis=True), f"({r.notes})")
    a = assignment_from_poly(r.poly)
    print("truth table:", "".join(map(str, evaluate_all(a))))


def c5():
    print("\n== C^5 on 6 bits")
    f = csf(5, 6)
    r = construct_csf(f)
    a = assignment_from_poly(r.poly)
    census = Counter(popcount(s) for s in r.poly.terms if s)
    print("qubits:", a.k, " selector sizes:", dict(sorted(census.items())))
    print("phi classes:", sorted({str(q.phi if q.phi <= 1 else q.phi - 2) for q in a.qubits}))
    ok = evaluate_all(a) == [f(x) for x in inputs(6)]
    print("64 inputs correct:", ok, " clifford level:", clifford_level(a))
    cost, exact = total_cost(a, 0.01, 2.5)
    print(f"cost at eps=0.01, c=2.5: depth={cost.depth:.2f} width={cost.width} gates={cost.gates:.2f}")
    print("method comparison:")
    for row in compare_all(f):
        print(f"  {row.method:4s} sparsity={row.sparsity:3d} terms={len(row.poly.terms)}")


if __name__ == "__main__":
    and2()
    example_two()
    c5()
