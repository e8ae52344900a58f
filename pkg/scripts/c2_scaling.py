#!/usr/bin/env python3
"""Exact C^2 circuits: gates and width grow linearly in n.

    python3 scripts/c2_scaling.py 8 16 32 64 128 256
"""
import sys
from fractions import Fraction

from nmqc.assignment import assignment_from_poly, clifford_level
from nmqc.circuits import total_cost
from nmqc.polynomial import csf_power2_poly


def main(ns):
    rows = []
    print("n,k,level,exact,depth,width,gates")
    for n in ns:
        a = assignment_from_poly(csf_power2_poly(2, n))
        cost, exact = total_cost(a)
        rows.append((n, cost))
        print(f"{n},{a.k},{clifford_level(a)},{int(exact)},{cost.depth},{cost.width},{cost.gates}")
    if len(rows) >= 2:
        (n0, c0), (n1, c1) = rows[0], rows[1]
        for attr in ("gates", "width"):
            alpha = Fraction(getattr(c1, attr) - getattr(c0, attr), n1 - n0)
            beta = getattr(c0, attr) - alpha * n0
            fits = all(getattr(c, attr) == alpha * n + beta for n, c in rows)
            print(f"# {attr} = {alpha}*n + {beta}  (exact on all rows: {fits})", file=sys.stderr)


if __name__ == "__main__":
    main([int(v) for v in sys.argv[1:]] or [8, 16, 32, 64, 128])
