import json
import subprocess
import sys

import pytest

from fglcalc.cli import main
from fglcalc.errors import ExpressionError
from fglcalc.expr import evaluate, generator_dim, names
from fglcalc.rings import QQ, CoefRing
from fglcalc.series import GradedSeries


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


# -- expression language ------------------------------------------------------------


def test_expr_parse_and_eval():
    R = CoefRing(QQ, (("b1", 1),))
    s = evaluate("x + b1 * x ^ 2", R, ("x",), 3)
    x = GradedSeries.gen(R, ("x",), 3, "x")
    assert s == x + R.gen("b1") * x**2
    assert names("2*x1*x2 - v1^3") == ["v1", "x1", "x2"]
    assert str(evaluate("-(b1+1)^2", R)) == "-1 - 2*b1 - b1^2"


@pytest.mark.parametrize("bad", ["", "x/2", "x**-1", "f(x)", "x.y", "1.5*x", "x^y"])
def test_expr_rejects(bad):
    R = CoefRing(QQ)
    with pytest.raises(ExpressionError):
        evaluate(bad, R, ("x", "y"), 3)


def test_generator_dims():
    assert generator_dim("t2", 3) == 8
    assert generator_dim("v1", 2) == 1
    assert generator_dim("b3") == 3


# -- commands -----------------------------------------------------------------------


def test_fgl_commands(capsys):
    code, out = run(capsys, "fgl", "show", "--theory", "multiplicative", "--trunc", "4")
    assert code == 0 and out["text"] == "x + y - x*y"
    code, out = run(capsys, "fgl", "nseries", "--theory", "additive", "-n", "5")
    assert code == 0 and out["text"] == "5*x"
    code, out = run(capsys, "fgl", "axioms", "--theory", "universal-p-typical", "-p", "2", "--trunc", "8")
    assert code == 0 and out["passed"] is True
    code, out = run(capsys, "fgl", "revert", "--series", "x+x^2", "--trunc", "4")
    assert out["text"] == "x - x^2 + 2*x^3 - 5*x^4"
    code, out = run(capsys, "fgl", "compose-morphisms", "--gamma", "x+b1*x^2", "--gamma", "x+b1*x^2",
                    "--trunc", "3")
    assert code == 0 and out["text"] == "x + 2*b1*x^2 + 2*b1^2*x^3"


def test_bp_commands(capsys):
    code, out = run(capsys, "bp", "log", "-p", "2", "--trunc", "8")
    assert out["text"] == "x + m1*x^2 + m2*x^4 + m3*x^8"
    code, out = run(capsys, "bp", "hazewinkel", "-p", "2", "--upto", "2")
    assert out["table"]["v2"]["text"] == "-4*m1^3 + 2*m2"
    code, out = run(capsys, "bp", "ln-total", "-p", "2", "--trunc", "4")
    assert out["phi"]["v1"]["text"] == "v1 + 2*t1"
    code, out = run(capsys, "bp", "invariance", "-p", "2", "-m", "2", "--degree", "8")
    assert code == 0 and out["status"] == "pass"
    code, out = run(capsys, "bp", "invariance", "-p", "2", "--ideal", "v1", "--degree", "4")
    assert code == 1 and out["status"] == "fail"
    code, out = run(capsys, "bp", "mtl0", "-p", "2", "-r", "1", "--mmax", "3")
    assert code == 0 and out["meta"]["lowest_degrees"] == [2, 4, 8]
    code, out = run(capsys, "bp", "pseries", "-p", "2", "-m", "1", "-k", "1", "--trunc", "4")
    assert out["lowest_degree"] == 2


def test_coh_commands(capsys):
    code, out = run(capsys, "coh", "pair", "--space", "P2", "--theory", "chow-mod:2", "--u", "x", "--v", "x")
    assert code == 0 and out["pairing"] == "1"
    code, out = run(capsys, "coh", "ci", "--space", "P3", "--theory", "chow-mod:2", "--degrees", "2,1")
    assert out["numerically_trivial"] is True
    code, out = run(capsys, "coh", "rr", "--space", "P1xP1", "--gamma", "x+b1*x^2", "--trunc", "4")
    assert code == 0 and out["status"] == "pass"
    code, out = run(capsys, "coh", "todd", "--space", "P1", "--gamma", "x+b1*x^2", "--trunc", "3")
    assert out["todd"] == "1 - 2*b1*x"
    code, out = run(capsys, "coh", "ring", "--space", "P1xP1")
    assert out["presentation"]["basis"] == ["1", "x1", "x2", "x1*x2"]
    code, out = run(capsys, "coh", "kernel", "--space", "P3", "--codim", "2")
    assert out["codims"]["2"]["kernel"] == []
    code, out = run(capsys, "coh", "descent", "--space", "P2", "--theory", "k:1", "-p", "2", "--degree", "4")
    assert code == 0


def test_exit_codes(capsys):
    assert main(["verify", "all", "-p", "4"]) == 2
    assert main(["coh", "ring", "--space", "Q3"]) == 2
    assert main(["fgl", "nope"]) == 2
    assert main(["fgl", "revert", "--series", "x/2"]) == 2
    capsys.readouterr()


def test_verify_all_low_trunc(capsys):
    code, out = run(capsys, "verify", "all", "-p", "2", "--trunc", "1")
    assert code == 0
    skipped = [i for i in out["items"] if i["status"] == "skipped"]
    assert skipped and all("TruncationTooLow" in i["reason"] for i in skipped)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert main(["fgl", "show", "--theory", "additive", "--trunc", "2", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["text"] == "x + y"


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "fglcalc", "fgl", "nseries", "--theory", "additive", "-n", "3"],
                       capture_output=True, text=True, env={"FGLCALC_CACHE": str(tmp_path), "PATH": ""})
    assert r.returncode == 0 and json.loads(r.stdout)["text"] == "3*x"
