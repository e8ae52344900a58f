import json
import os
from fractions import Fraction
from pathlib import Path

import pytest

from nmqc.assignment import MeasurementAssignment, assignment_from_poly, perturb
from nmqc.boolfn import and_n
from nmqc.cli import main
from nmqc.constructions import construct_fr

GOLDEN = Path(__file__).parent / "golden"

# (golden name, argv); {dir} is the golden directory
CASES = [
    ("compile_and2", ["compile", "--fn", "builtin:AND:2", "--method", "fr"]),
    ("compile_c5_csf", ["compile", "--fn", "builtin:C:5:6", "--method", "csf"]),
    ("compile_example2_xor", ["compile", "--fn", "anf: x1*x2 + x2*x3", "--method", "kr", "--xor-basis"]),
    ("eval_and2", ["eval", "{dir}/and2.json", "--all", "--fn", "builtin:AND:2"]),
    ("simulate_perturbed", ["simulate", "{dir}/and2_perturbed.json", "--all", "--shots", "10000", "--seed", "7"]),
    ("cost_and2", ["cost", "{dir}/and2.json"]),
    ("netlist_and2", ["netlist", "{dir}/and2.json"]),
    ("feasible_c4_t1", ["feasible", "--fn", "builtin:C:4:12", "--t", "1"]),
    ("scan_small_csv", ["scan", "--k", "2,4", "--n", "8..12", "--format", "csv"]),
    ("compare_c5", ["compare", "--fn", "builtin:C:5:6"]),
]


def run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, out


def expand(argv):
    return [a.replace("{dir}", str(GOLDEN)) for a in argv]


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden(capsys, name, argv):
    rc, out = run(capsys, expand(argv))
    assert rc == 0
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("NMQC_REGEN_GOLDEN"):
        path.write_text(out)
    assert out == path.read_text()


@pytest.mark.parametrize("argv", [CASES[4][1], CASES[9][1], ["simulate", "{dir}/and2_perturbed.json",
                                                             "--x", "11", "--format", "json", "--seed", "3"]])
def test_byte_determinism(capsys, argv):
    first = run(capsys, expand(argv))
    second = run(capsys, expand(argv))
    assert first == second


def test_golden_assignment_files_are_current():
    a = assignment_from_poly(construct_fr(and_n(2)).poly)
    assert MeasurementAssignment.from_json((GOLDEN / "and2.json").read_text()) == a
    b = perturb(a, 0, dphi=Fraction(1, 8))
    assert MeasurementAssignment.from_json((GOLDEN / "and2_perturbed.json").read_text()) == b


def test_compile_writes_files(capsys, tmp_path):
    poly, asg = tmp_path / "p.json", tmp_path / "a.json"
    rc, _ = run(capsys, ["compile", "--fn", "builtin:C:5:6", "--method", "csf",
                         "--poly", str(poly), "--assignment", str(asg)])
    assert rc == 0
    a = MeasurementAssignment.from_json(asg.read_text())
    assert a.k == 43
    assert json.loads(poly.read_text())["n"] == 6


def test_compile_empty_anf(capsys, tmp_path):
    asg = tmp_path / "a.json"
    rc, out = run(capsys, ["compile", "--fn", "anf:", "--format", "json", "--assignment", str(asg)])
    assert rc == 0
    assert json.loads(out)["report"]["k"] == 0


def test_simulate_deterministic_full_agreement(capsys):
    rc, out = run(capsys, ["simulate", str(GOLDEN / "and2.json"), "--all", "--shots", "10000",
                           "--seed", "7", "--format", "json", "--strict"])
    assert rc == 0
    rows = json.loads(out)["results"]
    assert [r["ones"] for r in rows] == [0, 0, 0, 10000]


def test_netlist_run(capsys):
    rc, out = run(capsys, ["netlist", str(GOLDEN / "and2.json"), "--run", "--all"])
    assert rc == 0
    assert "x=11 p_one=1.000000" in out


def test_cost_k43(capsys, tmp_path):
    asg = tmp_path / "a.json"
    run(capsys, ["compile", "--fn", "builtin:C:5:6", "--method", "csf", "--assignment", str(asg)])
    rc, out = run(capsys, ["cost", str(asg), "--epsilon", "0.01", "--c", "2.5", "--format", "json"])
    assert rc == 0
    row = json.loads(out)["cost"][0]
    assert row["k"] == 43 and not row["exact"]


# --- exit codes ---------------------------------------------------------------------

@pytest.mark.parametrize("argv,code", [
    (["compile", "--fn", "bogus"], 2),
    (["compile", "--fn", "builtin:AND:30", "--method", "fr"], 4),
    (["cost", "{dir}/and2.json", "--epsilon", "2"], 2),
    (["feasible", "--fn", "builtin:C:4:12", "--t", "1", "--assert-feasible"], 5),
    (["eval", "{dir}/and2.json", "--all", "--fn", "builtin:PARITY:2"], 3),
    (["eval", "{dir}/and2_perturbed.json", "--all"], 3),
    (["eval", "{dir}/missing.json", "--all"], 2),
])
def test_exit_codes(capsys, argv, code):
    rc, _ = run(capsys, expand(argv))
    assert rc == code


def test_cost_without_epsilon_on_level5(capsys, tmp_path):
    asg = tmp_path / "a.json"
    run(capsys, ["compile", "--fn", "builtin:C:5:6", "--method", "csf", "--assignment", str(asg)])
    rc, _ = run(capsys, ["cost", str(asg)])
    assert rc == 2


def test_scan_empty_range(capsys):
    rc, out = run(capsys, ["scan", "--k", "2", "--n", "8..7", "--format", "csv"])
    assert rc == 0
    assert out.splitlines()[-1] == "k,n,t,feasible,elapsed_ms,snf_max_diag_bits"


def test_env_budget_is_used(capsys, monkeypatch):
    monkeypatch.setenv("NMQC_TIME_BUDGET_MS", "0")
    rc, out = run(capsys, ["compare", "--fn", "builtin:C:8:20"])
    assert rc == 0
    assert "skipped" in out
