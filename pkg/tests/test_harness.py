import io
import json
import subprocess
import sys

import pytest

from kingap import relations
from kingap.cli import main
from kingap.harness import SUITES, SuiteConfig, UnknownSuite, run_suite

FIELDS = ["suite", "samples", "seed", "passed", "checks_run", "failures", "duration_ms"]


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def flipped_lambda(p, q):
    dt, dx, dy, dz = (p[i] - q[i] for i in range(4))
    return dt * dt + dx * dx == dy * dy + dz * dz


def test_list_suites():
    code, out, _ = run_cli("list-suites")
    assert code == 0
    assert out.split() == list(SUITES)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite(SuiteConfig("nope"))
    code, out, err = run_cli("verify", "--suite", "nope")
    assert code == 2 and out == "" and "unknown suite" in err


@pytest.mark.parametrize("argv", [["verify"], ["verify", "--suite", "cor-6.5", "--format", "xml"], ["verify", "--suite", "cor-6.5", "--samples", "0"], ["frobnicate"]])
def test_usage_errors(argv):
    assert run_cli(*argv)[0] == 2


def test_all_suites_json():
    code, out, _ = run_cli("verify", "--suite", "all", "--samples", "2", "--seed", "42")
    assert code == 0
    reports = [json.loads(line) for line in out.splitlines()]
    assert [r["suite"] for r in reports] == list(SUITES)
    for r in reports:
        assert list(r)[: len(FIELDS)] == FIELDS
        assert r["passed"] is True and r["failures"] == [] and r["seed"] == 42
        assert r["claim"]


def test_text_format():
    code, out, _ = run_cli("verify", "--suite", "prop-6.6", "--samples", "5", "--format", "text")
    assert code == 0 and out.startswith("prop-6.6: PASS")


def test_seed_env_override(monkeypatch):
    monkeypatch.setenv("KIN_GAP_SEED", "99")
    code, out, _ = run_cli("verify", "--suite", "prop-6.6", "--samples", "3", "--seed", "1")
    assert code == 0 and json.loads(out)["seed"] == 99
    monkeypatch.setenv("KIN_GAP_SEED", "x")
    assert run_cli("verify", "--suite", "prop-6.6")[0] == 2


def test_failing_suite_exits_one(monkeypatch):
    monkeypatch.setitem(relations.RELATIONS, "lambda", relations.Relation("lambda", 2, flipped_lambda))
    code, out, _ = run_cli("verify", "--suite", "prop-2.1", "--samples", "3")
    report = json.loads(out)
    assert code == 1 and not report["passed"]
    assert report["failures"][0]["inputs"]["relation"] == "lambda"


def test_report_is_deterministic():
    a = run_suite(SuiteConfig("borisov2-steps", 10, 5)).to_json()
    b = run_suite(SuiteConfig("borisov2-steps", 10, 5)).to_json()
    a.pop("duration_ms"), b.pop("duration_ms")
    assert json.dumps(a) == json.dumps(b)
    c = run_suite(SuiteConfig("borisov2-steps", 10, 6)).to_json()
    assert c["witnesses"] != a["witnesses"]


def test_classify_command(tmp_path):
    path = tmp_path / "boost.mat"
    path.write_text("5/4 -3/4 0 0\n-3/4 5/4 0 0\n0 0 1 0\n0 0 0 1\n0 0 0 0\n")
    code, out, _ = run_cli("classify", "--matrix", str(path))
    assert code == 0
    flags = out.split("\n")
    assert "lorentz" in flags and "trivial" not in flags
    path.write_text("1 0 0 0\n")
    assert run_cli("classify", "--matrix", str(path))[0] == 2
    assert run_cli("classify", "--matrix", str(tmp_path / "missing"))[0] == 2


def test_eval_command(tmp_path):
    path = tmp_path / "phi.sexp"
    path.write_text("(exists v2 (= (* v2 v2) v1))\n")
    assert run_cli("eval", "--formula", str(path), "--assign", "v1=1/2")[:2] == (0, "true\n")
    assert run_cli("eval", "--formula", str(path), "--assign", "v1=-1/2")[:2] == (0, "false\n")
    assert run_cli("eval", "--formula", str(path), "--assign", "v1=0+1*sqrt(2)")[:2] == (0, "true\n")
    assert run_cli("eval", "--formula", str(path))[0] == 2
    assert run_cli("eval", "--formula", str(path), "--assign", "x=1")[0] == 2
    path.write_text("(= v1")
    code, _, err = run_cli("eval", "--formula", str(path), "--assign", "v1=1")
    assert code == 2 and "byte 5" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kingap", "list-suites"], capture_output=True, text=True)
    assert proc.returncode == 0 and "prop-2.1" in proc.stdout
