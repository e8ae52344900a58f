"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 verification failure, 4 resource cap,
5 infeasible when ``--assert-feasible`` was given.

Every run has a seed (default 0) that is echoed in the output header; all
sampling draws from one generator built from it.  Timing columns are left
blank unless ``--timing`` is passed, so output is byte-for-byte repeatable.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .assignment import (
    MAX_DENSE_QUBITS,
    MeasurementAssignment,
    NondeterministicPoint,
    assignment_from_poly,
    clifford_level,
    dense_output_probability,
    evaluate_deterministic,
    output_probability,
    sample_outcomes,
)
from .boolfn import ParseError, ResourceCapError, as_boolean, as_symmetric, eval_fn, parse_function
from .circuits import DEFAULT_C, emit_netlist, run_netlist, total_cost
from .constructions import RUNNERS, VerificationError, compare_all, construct_kr
from .feasibility import SCAN_FIELDS, allowed_sizes, conjecture_scan, decide_symmetric_support

EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_CAP, EXIT_INFEASIBLE = 0, 2, 3, 4, 5
DEFAULT_SEED = 0


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


@dataclass
class RunConfig:
    subcommand: str
    fn: Optional[str] = None
    method: Optional[str] = None
    epsilon: Optional[float] = None
    c: float = DEFAULT_C
    ghz: str = "log"
    seed: int = DEFAULT_SEED
    format: str = "text"
    time_budget_ms: Optional[float] = None
    timing: bool = False

    def __post_init__(self):
        if self.epsilon is not None and not (0 < self.epsilon <= 1):
            raise CliError(EXIT_PARSE, f"--epsilon must lie in (0, 1], got {self.epsilon}")

    def header(self) -> dict:
        return {"tool": "nmqc", "version": __version__, **{k: v for k, v in asdict(self).items() if v is not None}}


# --- helpers -------------------------------------------------------------------

def _parse_bits(s: str, n: int) -> list[int]:
    s = s.replace(",", "").strip()
    if len(s) != n or any(ch not in "01" for ch in s):
        raise CliError(EXIT_PARSE, f"input must be {n} bits, got {s!r}")
    return [int(ch) for ch in s]


def _inputs(args, n: int) -> list[list[int]]:
    if args.all:
        if n > 20:
            raise CliError(EXIT_CAP, f"--all enumerates 2^{n} inputs; cap is n=20")
        return [[(i >> j) & 1 for j in range(n)] for i in range(1 << n)]
    if not args.x:
        raise CliError(EXIT_PARSE, "give --x BITS (repeatable) or --all")
    return [_parse_bits(x, n) for x in args.x]


def _bits_str(x: Sequence[int]) -> str:
    return "".join(str(b) for b in x)


def _load_assignment(path: str) -> MeasurementAssignment:
    try:
        return MeasurementAssignment.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read assignment {path}: {exc}") from exc


def _fn(spec: str):
    try:
        return parse_function(spec)
    except ParseError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc


def _ms(cfg: RunConfig, seconds: float):
    return round(seconds * 1000, 3) if cfg.timing else None


def _emit_table(cfg: RunConfig, title: str, fields: Sequence[str], rows: list[list], extra: Optional[dict] = None) -> str:
    if cfg.format == "json":
        return json.dumps({"header": cfg.header(), title: [dict(zip(fields, r)) for r in rows], **(extra or {})},
                          indent=2) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(f"# nmqc {cfg.subcommand} seed={cfg.seed}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow(["" if v is None else v for v in r])
        return buf.getvalue()
    lines = [f"# nmqc {cfg.subcommand} seed={cfg.seed}"]
    widths = [max(len(str(f)), *(len("" if r[i] is None else str(r[i])) for r in rows)) if rows else len(str(f))
              for i, f in enumerate(fields)]
    lines.append("  ".join(str(f).ljust(w) for f, w in zip(fields, widths)).rstrip())
    for r in rows:
        lines.append("  ".join(("" if v is None else str(v)).ljust(w) for v, w in zip(r, widths)).rstrip())
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


# --- subcommands ------------------------------------------------------------------

def cmd_compile(args, cfg: RunConfig) -> int:
    f = _fn(args.fn)
    method = args.method.upper()
    if method == "BEST":
        reports = compare_all(f, timeout=cfg.time_budget_ms / 1000 if cfg.time_budget_ms else None)
        if not reports:
            raise CliError(EXIT_CAP, f"no method finished: {', '.join(reports.skipped)}")
        rep = reports[0]
    elif method == "KR" and args.no_greedy:
        rep = construct_kr(f, greedy=False)
    else:
        rep = RUNNERS[method](f)
    a = assignment_from_poly(rep.poly, allow_empty=True)
    if f.n <= 12:
        bf = as_boolean(f)
        for i in range(1 << f.n):
            x = [(i >> j) & 1 for j in range(f.n)]
            if evaluate_deterministic(a, x) != eval_fn(bf, x):
                raise CliError(EXIT_VERIFY, f"assignment disagrees with the function at x={_bits_str(x)}")
    if args.poly:
        Path(args.poly).write_text(json.dumps(rep.poly.to_json(), indent=2) + "\n")
    if args.assignment:
        Path(args.assignment).write_text(json.dumps(a.to_json(), indent=2) + "\n")
    summary = rep.summary()
    summary["elapsed_ms"] = _ms(cfg, rep.elapsed)
    summary["k"] = a.k
    summary["level"] = clifford_level(a) if a.k else 1
    if cfg.format == "json":
        out = {"header": cfg.header(), "report": summary, "poly": rep.poly.to_json(), "assignment": a.to_json()}
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        fields = ["method", "sparsity", "terms", "granularity", "k", "level", "elapsed_ms", "notes"]
        sys.stdout.write(_emit_table(cfg, "report", fields, [[summary[k] for k in fields]]))
        if cfg.format == "text":
            sys.stdout.write(rep.poly.pretty(xor_basis=args.xor_basis) + "\n")
    return EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    a = _load_assignment(args.assignment)
    f = as_boolean(_fn(args.fn)) if args.fn else None
    if f is not None and f.n != a.n:
        raise CliError(EXIT_PARSE, f"function has n={f.n}, assignment has n={a.n}")
    rows, bad = [], 0
    for x in _inputs(args, a.n):
        try:
            y = evaluate_deterministic(a, x)
        except NondeterministicPoint as exc:
            raise CliError(EXIT_VERIFY, str(exc)) from exc
        expect = eval_fn(f, x) if f is not None else None
        if expect is not None and expect != y:
            bad += 1
        rows.append([_bits_str(x), y, expect])
    extra = {"truth_table": "".join(str(r[1]) for r in rows)} if args.all else {}
    sys.stdout.write(_emit_table(cfg, "results", ["x", "output", "expected"], rows, extra))
    if bad:
        sys.stderr.write(f"{bad} input(s) disagree with {args.fn}\n")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig) -> int:
    a = _load_assignment(args.assignment)
    rng = np.random.default_rng(cfg.seed)
    rows, fails = [], 0
    for x in _inputs(args, a.n):
        st = sample_outcomes(a, x, args.shots, seed=cfg.seed, rng=rng)
        p_dense = dense_output_probability(a, x) if 0 < a.k <= MAX_DENSE_QUBITS else None
        ok = st.within(3.0)
        fails += not ok
        rows.append([_bits_str(x), args.shots, st.ones, f"{st.rate:.6f}", f"{st.p_one:.6f}",
                     None if p_dense is None else f"{p_dense:.6f}", int(ok)])
    fields = ["x", "shots", "ones", "rate", "p_one", "p_dense", "within_3sigma"]
    sys.stdout.write(_emit_table(cfg, "results", fields, rows))
    return EXIT_OK if not (args.strict and fails) else EXIT_VERIFY


def cmd_cost(args, cfg: RunConfig) -> int:
    a = _load_assignment(args.assignment)
    try:
        cost, exact = total_cost(a, cfg.epsilon, cfg.c, cfg.ghz)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    level = clifford_level(a) if a.k else 1
    row = [a.k, level, int(exact), _num(cost.depth), _num(cost.width), _num(cost.gates)]
    sys.stdout.write(_emit_table(cfg, "cost", ["k", "level", "exact", "depth", "width", "gates"], [row]))
    return EXIT_OK


def _num(v):
    return v if isinstance(v, int) else float(f"{v:.6f}")


def cmd_netlist(args, cfg: RunConfig) -> int:
    a = _load_assignment(args.assignment)
    net = emit_netlist(a, cfg.ghz)
    if cfg.format == "json":
        sys.stdout.write(json.dumps({"header": cfg.header(), "netlist": net.to_json()}, indent=2) + "\n")
    else:
        sys.stdout.write(f"# nmqc netlist seed={cfg.seed}\n" + net.to_text())
    if args.run:
        if a.k > MAX_DENSE_QUBITS:
            raise CliError(EXIT_CAP, f"statevector run capped at k={MAX_DENSE_QUBITS}")
        bad = 0
        for x in _inputs(args, a.n):
            p = run_netlist(net, x)
            want = output_probability(a, x)
            bad += abs(p - want) > 1e-9
            sys.stdout.write(f"run x={_bits_str(x)} p_one={p:.6f}\n")
        if bad:
            return EXIT_VERIFY
    return EXIT_OK


def _size_set(text: str) -> set[int]:
    try:
        return {int(t) for t in text.split(",") if t.strip()}
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad size list {text!r}") from exc


def cmd_feasible(args, cfg: RunConfig) -> int:
    f = _fn(args.fn)
    sym = as_symmetric(f)
    if sym is None:
        raise CliError(EXIT_PARSE, "feasibility needs a symmetric function")
    if args.sizes is not None:
        T = _size_set(args.sizes)
    elif args.t is not None:
        T = allowed_sizes(sym.n, args.t, args.rows, sym.degree)
    else:
        raise CliError(EXIT_PARSE, "give --t or --sizes")
    res = decide_symmetric_support(sym, T, certify=None if not args.no_certify else False)
    if res.feasible and res.certified is False:
        raise CliError(EXIT_VERIFY, "witness polynomial failed certification")
    out = {"n": sym.n, "allowed": sorted(res.allowed), "feasible": res.feasible,
           "certified": res.certified, "witness": res.witness, "values": res.values,
           "snf_max_diag_bits": res.max_diag_bits, "elapsed_ms": _ms(cfg, res.elapsed)}
    if cfg.format == "json":
        sys.stdout.write(json.dumps({"header": cfg.header(), "decision": out}, indent=2) + "\n")
    else:
        fields = ["n", "allowed", "feasible", "certified", "snf_max_diag_bits", "elapsed_ms"]
        row = [out["n"], " ".join(map(str, out["allowed"])), int(res.feasible),
               "" if res.certified is None else int(res.certified), res.max_diag_bits, out["elapsed_ms"]]
        sys.stdout.write(_emit_table(cfg, "decision", fields, [row],
                                     {"witness": res.witness} if res.witness is not None else None))
    if args.assert_feasible and not res.feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _int_range(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad range {text!r}") from exc


def cmd_scan(args, cfg: RunConfig) -> int:
    ks, ns = _int_range(args.k), _int_range(args.n)
    rep = conjecture_scan(ks, ns, rows=args.rows)
    rows = [[r.k, r.n, r.t, int(r.feasible), _ms(cfg, r.elapsed_ms / 1000), r.snf_max_diag_bits] for r in rep.rows]
    if cfg.format == "json":
        body = {"header": cfg.header(), "fields": list(SCAN_FIELDS), "rows": rows,
                "counterexamples": [list(c) for c in rep.counterexamples]}
        sys.stdout.write(json.dumps(body, indent=2) + "\n")
    else:
        fmt = cfg.format if cfg.format == "csv" else "text"
        cfg_out = RunConfig(**{**asdict(cfg), "format": fmt})
        sys.stdout.write(_emit_table(cfg_out, "rows", SCAN_FIELDS, rows))
        if cfg.format == "text":
            sys.stdout.write(f"counterexamples: {len(rep.counterexamples)}\n")
    if args.assert_feasible and rep.counterexamples:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    f = _fn(args.fn)
    methods = [m.upper() for m in args.methods.split(",")] if args.methods else None
    reports = compare_all(f, timeout=cfg.time_budget_ms / 1000 if cfg.time_budget_ms else None, methods=methods)
    rows = [[r.method.lower(), r.sparsity, len(r.poly.terms), r.granularity, _ms(cfg, r.elapsed)] for r in reports]
    extra = {"skipped": ",".join(reports.skipped)} if reports.skipped else None
    sys.stdout.write(_emit_table(cfg, "methods", ["method", "sparsity", "terms", "granularity", "elapsed_ms"],
                                 rows, extra))
    return EXIT_OK


# --- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed (default 0)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--timing", action="store_true", help="fill elapsed_ms columns")
    common.add_argument("--budget-ms", type=float, default=None,
                        help="per-method time budget (default: NMQC_TIME_BUDGET_MS or 30000)")

    p = argparse.ArgumentParser(prog="nmqc", description="Compile Boolean functions to GHZ measurement programs.")
    p.add_argument("--version", action="version", version=f"nmqc {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("compile", parents=[common], help="build a polynomial and measurement assignment")
    c.add_argument("--fn", required=True)
    c.add_argument("--method", default="best", choices=("fr", "ef", "kr", "csf", "sc", "best"))
    c.add_argument("--no-greedy", action="store_true", help="KR with all signs positive")
    c.add_argument("--poly", help="write the polynomial JSON here")
    c.add_argument("--assignment", help="write the assignment JSON here")
    c.add_argument("--xor-basis", action="store_true", help="print the polynomial in the XOR basis")

    for name, hlp in (("eval", "exact evaluation"), ("simulate", "sample measurement outcomes")):
        e = sub.add_parser(name, parents=[common], help=hlp)
        e.add_argument("assignment")
        e.add_argument("--x", action="append", help="input bits, x1 first (repeatable)")
        e.add_argument("--all", action="store_true")
        if name == "eval":
            e.add_argument("--fn", help="cross-check against this function")
        else:
            e.add_argument("--shots", type=int, default=10000)
            e.add_argument("--strict", action="store_true", help="exit 3 if any rate is off by more than 3 sigma")

    for name in ("cost", "netlist"):
        e = sub.add_parser(name, parents=[common], help=f"circuit {name}")
        e.add_argument("assignment")
        e.add_argument("--epsilon", type=float, default=None)
        e.add_argument("--c", type=float, default=DEFAULT_C)
        e.add_argument("--ghz", choices=("log", "const"), default="log")
        if name == "netlist":
            e.add_argument("--run", action="store_true", help="execute on a statevector")
            e.add_argument("--x", action="append")
            e.add_argument("--all", action="store_true")

    fe = sub.add_parser("feasible", parents=[common], help="symmetric support decision")
    fe.add_argument("--fn", required=True)
    fe.add_argument("--t", type=int)
    fe.add_argument("--sizes", help="explicit allowed sizes, comma separated")
    fe.add_argument("--rows", choices=("growth", "literal"), default="growth")
    fe.add_argument("--no-certify", action="store_true")
    fe.add_argument("--assert-feasible", action="store_true")

    sc = sub.add_parser("scan", parents=[common], help="C^k profile scan")
    sc.add_argument("--k", default="2,4,6,8")
    sc.add_argument("--n", default="8..64", help="lo..hi or a comma list")
    sc.add_argument("--rows", choices=("growth", "literal"), default="growth")
    sc.add_argument("--assert-feasible", action="store_true", help="exit 5 on any counterexample")

    cm = sub.add_parser("compare", parents=[common], help="all methods side by side")
    cm.add_argument("--fn", required=True)
    cm.add_argument("--methods", help="comma list, default all applicable")
    return p


COMMANDS = {
    "compile": cmd_compile, "eval": cmd_eval, "simulate": cmd_simulate, "cost": cmd_cost,
    "netlist": cmd_netlist, "feasible": cmd_feasible, "scan": cmd_scan, "compare": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    budget = args.budget_ms
    if budget is None and os.environ.get("NMQC_TIME_BUDGET_MS"):
        budget = float(os.environ["NMQC_TIME_BUDGET_MS"])
    try:
        cfg = RunConfig(args.cmd, getattr(args, "fn", None), getattr(args, "method", None),
                        getattr(args, "epsilon", None), getattr(args, "c", DEFAULT_C), getattr(args, "ghz", "log"),
                        args.seed, args.format, budget, args.timing)
        if args.cmd == "simulate" and args.shots < 1:
            raise CliError(EXIT_PARSE, "--shots must be >= 1")
        return COMMANDS[args.cmd](args, cfg)
    except CliError as exc:
        sys.stderr.write(f"nmqc: {exc}\n")
        return exc.code
    except ParseError as exc:
        sys.stderr.write(f"nmqc: parse error: {exc}\n")
        return EXIT_PARSE
    except VerificationError as exc:
        sys.stderr.write(f"nmqc: verification failed: {exc}\n")
        return EXIT_VERIFY
    except ResourceCapError as exc:
        sys.stderr.write(f"nmqc: resource cap: {exc}\n")
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
