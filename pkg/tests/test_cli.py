import json
import shutil
import subprocess
import sys

import pytest

from test_classify import S_ODD_TEXT
from test_formula import S_TEXT
from zhorn.cli import main
from zhorn.formula import evaluate, parse_formula

HORN_INSTANCE = """\
relation PLUS1/2 := x1 + 1 = x2
relation ONE/1 := x1 = 1
constraints
ONE(a)
PLUS1(a, b)
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "horn.csp": HORN_INSTANCE,
        "unsat.csp": "relation ONE/1 := x1 = 1\nconstraints\nONE(a)\n+(a, a, a)\n",
        "nothorn.csp": "relation B/1 := (x1 = 0 | x1 = 1)\nconstraints\nB(a)\n",
        "s.csp": f"relation S/2 := {S_TEXT}\n",
        "s_odd.csp": f"relation S/2 := {S_ODD_TEXT}\n",
        "rk.csp": "relation R/1 := (x1 = 0 | !(x1 = 0 mod 3))\nrelation K/1 := x1 = 1 mod 3\n",
        "mod6.csp": "relation R/1 := x1 = 0 mod 6\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


class TestSolve:
    def test_sat(self, capsys, files):
        code, out, _ = run(capsys, "solve", files["horn.csp"])
        assert code == 0 and out.splitlines() == ["SAT", "a = 1", "b = 2"]

    def test_unsat(self, capsys, files):
        code, out, _ = run(capsys, "solve", files["unsat.csp"])
        assert code == 10 and out.startswith("UNSAT")

    def test_not_horn(self, capsys, files):
        code, _, _ = run(capsys, "solve", files["nothorn.csp"])
        assert code == 30

    def test_raw_formula(self, capsys):
        code, out, _ = run(capsys, "solve", "(x + y = 0) & (x != 0)")
        assert code == 0 and "x = 2" in out and "y = -2" in out

    def test_json(self, capsys, files):
        code, out, _ = run(capsys, "--format", "json", "solve", files["horn.csp"])
        doc = json.loads(out)
        assert doc["exit_code"] == 0 and doc["status"] == "SAT" and doc["witness"] == {"a": 1, "b": 2}

    def test_structured_per_command(self, capsys, files):
        _, out, _ = run(capsys, "solve", "--format", "structured", files["horn.csp"])
        assert "status: SAT" in out and "witness: a = 1" in out


class TestSmallCommands:
    def test_implies(self, capsys):
        assert run(capsys, "implies", "x+y=2; x-y=0", "x=1")[:2] == (0, "true\n")
        assert run(capsys, "implies", "x+y=2", "x=1")[:2] == (10, "false\n")

    def test_sat(self, capsys):
        code, out, _ = run(capsys, "sat", "(x = 0 | x = 1) & (x != 0)")
        assert code == 0 and out.splitlines() == ["SAT", "x = 1"]
        assert run(capsys, "sat", "(x = 1 mod 2) & (x = 0 mod 4)")[0] == 10

    def test_sat_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("ZHORN_DNF_CAP", "2")
        assert run(capsys, "sat", "(x = 0 | x = 1) & (y = 0 | y = 1)")[0] == 20

    def test_hnf(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "hnf", "2 4; 1 3")
        doc = json.loads(out)
        assert code == 0 and doc["H"] == [[2, 0], [0, 1]]

    def test_normalize(self, capsys):
        code, out, _ = run(capsys, "normalize", "--reduce", "(2*x = 4) & (x = 2 | y = 1)")
        assert code == 0 and parse_formula(out) == parse_formula("x = 2")

    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "oracle", "--box", "2", "(x + y = 0) & (x != 0)")
        assert code == 0 and out.splitlines()[1:] == ["x = -2", "y = 2"]
        assert run(capsys, "oracle", "--box", "2", "x = 9")[0] == 20


class TestLanguageCommands:
    def test_core(self, capsys, files):
        code, out, _ = run(capsys, "core", files["s.csp"])
        assert code == 0 and out.startswith("ONE-ELEMENT-CORE") and "{0} u 1+2Z" in out

    def test_classify(self, capsys, files):
        assert "verdict: NP-COMPLETE" in run(capsys, "classify", files["rk.csp"])[1]
        assert "verdict: NP-COMPLETE" in run(capsys, "classify", "--jobs", "2", files["s_odd.csp"])[1]
        assert "verdict: TRIVIAL-P" in run(capsys, "classify", files["mod6.csp"])[1]

    def test_quotient(self, capsys, files):
        code, out, _ = run(capsys, "quotient", files["rk.csp"], "--modulus", "3")
        assert code == 0 and "R: {(0), (1), (2)}" in out.replace(",)", ")")
        assert run(capsys, "quotient", files["s.csp"], "--modulus", "2")[0] == 10

    def test_gadget_round_trip(self, capsys, files, tmp_path):
        code, out, _ = run(capsys, "gadget", files["s_odd.csp"], "--relation", "S", "--clauses", "p,q,r")
        assert code == 0 and "warning" not in out
        inst = tmp_path / "gadget.csp"
        inst.write_text(out)
        code, out, _ = run(capsys, "oracle", "--box", "1", str(inst))
        assert code == 0


class TestErrors:
    def test_usage(self, capsys):
        assert run(capsys, "bogus")[0] == 1
        assert run(capsys, "quotient", "x = 0")[0] == 1

    def test_input(self, capsys):
        code, _, err = run(capsys, "sat", "(x = ")
        assert code == 2 and "line 1" in err
        assert run(capsys, "solve", "relation R/1 := x1 = 0\nconstraints\nQ(a)\n")[0] == 2


def test_deterministic(capsys, files):
    first = run(capsys, "classify", files["rk.csp"])
    assert run(capsys, "classify", files["rk.csp"]) == first


def test_stdin_and_entry_point():
    exe = shutil.which("zhorn")
    cmd = [exe] if exe else [sys.executable, "-m", "zhorn.cli"]
    proc = subprocess.run(cmd + ["solve", "-"], input=HORN_INSTANCE, capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines() == ["SAT", "a = 1", "b = 2"]


def test_witness_reverified(capsys):
    phi = "(x + 2*y = 7) & (x != 1 | y = 3) & (x - y != 0)"
    code, out, _ = run(capsys, "--format", "json", "solve", phi)
    assert code == 0 and evaluate(parse_formula(phi), json.loads(out)["witness"])
