#!/usr/bin/env python3
"""Profile scan for C^k: feasible at t = k/2, infeasible at t = k/2 - 1?

    python3 scripts/conjecture_scan.py --k 2,4,6,8 --n 8..64 --out scan.csv
"""
import argparse
import sys
import time

from nmqc.feasibility import conjecture_scan


def int_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return range(int(lo), int(hi) + 1)
    return [int(v) for v in text.split(",") if v]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", default="2,4,6,8")
    ap.add_argument("--n", default="8..64")
    ap.add_argument("--rows", choices=("growth", "literal"), default="growth")
    ap.add_argument("--out", help="CSV path (default stdout)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()

    def progress(k, n, outcome):
        if args.verbose:
            print(f"k={k} n={n} {outcome}", file=sys.stderr)

    t0 = time.perf_counter()
    rep = conjecture_scan(int_range(args.k), int_range(args.n), rows=args.rows, progress=progress)
    text = rep.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(rep.rows) // 2} (k, n) pairs, {len(rep.counterexamples)} counterexamples "
          f"{rep.counterexamples}, {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 1 if rep.counterexamples else 0


if __name__ == "__main__":
    sys.exit(main())
