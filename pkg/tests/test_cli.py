import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nmecut.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY, OUTPUT_ENV, parse_schmidt, run, schmidt_for_robustness


def _run(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def _json(*argv):
    code, out = _run(*argv)
    return code, json.loads(out)


def _csv(*argv):
    code, out = _run(*argv)
    return code, list(csv.DictReader(io.StringIO(out)))


def test_overhead_table():
    code, rows = _csv("overhead", "--table")
    assert code == EXIT_OK
    for r in rows:
        n, R = int(r["n"]), float(r["R"])
        assert float(r["gamma"]) == 2 ** (n + 1) - 1
        assert abs(float(r["gamma_nme"]) - (2 ** (n + 1) / (R + 1) - 1)) <= 1e-12
    assert {(r["n"], r["R"]) for r in rows} >= {("1", "0.0"), ("2", "0.0"), ("3", "0.0")}


def test_overhead_single():
    code, rec = _json("overhead", "--n", "1", "--robustness", "0.6")
    assert code == EXIT_OK and rec["gamma_nme"] == pytest.approx(1.5)
    code, rec = _json("overhead", "--n", "1", "--schmidt", "0.1,0.9")
    assert rec["schmidt"][0] > rec["schmidt"][1]
    assert rec["R"] == pytest.approx(2 * 0.9 * 0.1 / (0.81 + 0.01))
    assert _run("overhead", "--n", "1", "--robustness", "5")[0] == EXIT_USAGE
    assert _run("overhead")[0] == EXIT_USAGE


def test_verify_examples():
    code, rec = _json("verify", "--n", "2", "--schmidt", "0.8,0.4,0.4,0.2")
    assert code == EXIT_OK
    assert rec["max_abs_error"] <= 1e-10
    assert rec["schema_version"] == 1
    assert rec["spec"]["schmidt"] == "0.8,0.4,0.4,0.2"
    assert {"n", "kappa", "terms", "max_abs_error"} <= set(rec)
    code, rec = _json("verify", "--n", "3", "--baseline")
    assert code == EXIT_OK and rec["kappa"] == 15
    code, rec = _json("verify", "--n", "3", "--streamlined", "1", "--schmidt", "2,1")
    assert code == EXIT_OK and rec["builder"] == "streamlined"
    code, rec = _json("verify", "--n", "2", "--schmidt", "maximal")
    assert code == EXIT_OK and rec["terms"] == 4


def test_verify_failure_exit_code():
    code, rec = _json("verify", "--n", "1", "--baseline", "--tol", "1e-30")
    assert code == EXIT_VERIFY and rec["status"] == "failed"


def test_mub_check():
    code, rec = _json("mub-check", "--n", "3")
    assert code == EXIT_OK
    assert all(v <= 1e-10 for v in rec["checks"].values())


def test_usage_errors():
    assert _run("verify", "--n", "9")[0] == EXIT_USAGE
    assert _run("verify", "--n", "2", "--schmidt", "1,2,3")[0] == EXIT_USAGE
    assert _run("verify", "--n", "2", "--schmidt", "a,b,c,d")[0] == EXIT_USAGE
    assert _run("verify", "--n", "2", "--schmidt", "0,0,0,0")[0] == EXIT_USAGE
    assert _run("verify", "--n", "2", "--streamlined", "1")[0] == EXIT_USAGE
    assert _run("estimate", "--n", "1", "--observable", "XX")[0] == EXIT_USAGE
    assert _run("estimate", "--n", "1", "--observable", "X", "--shots", "0")[0] == EXIT_USAGE
    assert _run("nonsense")[0] == EXIT_USAGE
    assert _run("sweep", "--n", "1", "--observable", "X", "--grid", "65")[0] == EXIT_USAGE


def test_estimate_deterministic():
    args = ("estimate", "--n", "2", "--schmidt", "3,1,1,1", "--observable", "XY",
            "--input", "random:4", "--shots", "20000", "--seed", "8")
    c1, a = _run(*args)
    c2, b = _run(*args)
    assert c1 == c2 == EXIT_OK and a == b
    rec = json.loads(a)
    assert rec["abs_error"] <= 5 * rec["std_error"] + 1e-12
    assert sum(rec["term_counts"]) == 20000


@pytest.mark.parametrize("spec,expected", [("plus^1", 1.0), ("zero^1", 0.0), ("1,1", 1.0), ("1,-1", -1.0)])
def test_input_specs(spec, expected):
    code, rec = _json("estimate", "--n", "1", "--schmidt", "maximal", "--observable", "X",
                      "--input", spec, "--shots", "100")
    assert code == EXIT_OK
    assert rec["exact"] == pytest.approx(expected, abs=1e-12)


def test_sweep():
    code, rows = _csv("sweep", "--n", "1", "--grid", "6", "--observable", "X", "--shots", "20000")
    assert code == EXIT_OK and len(rows) == 6
    k = [float(r["kappa_theory"]) for r in rows]
    assert k[0] == 3 and k[-1] == pytest.approx(1) and np.all(np.diff(k) < 0)
    for r in rows:
        assert float(r["kappa_empirical"]) == pytest.approx(float(r["kappa_theory"]), rel=1e-9)
        assert float(r["abs_error"]) <= 5 * float(r["kappa_theory"]) / math.sqrt(20000)


def test_schmidt_for_robustness():
    assert schmidt_for_robustness(1, 0.6).robustness == pytest.approx(0.6, abs=1e-12)
    np.testing.assert_allclose(schmidt_for_robustness(1, 0.6).alpha, [np.sqrt(0.9), np.sqrt(0.1)], atol=1e-9)
    assert schmidt_for_robustness(2, 0).robustness == 0
    assert schmidt_for_robustness(2, 3).robustness == pytest.approx(3)
    code, rows = _csv("sweep", "--n", "2", "--grid", "2", "--observable", "ZZ", "--shots", "1000")
    assert [float(r["kappa_theory"]) for r in rows] == [7.0, pytest.approx(1.0)]


def test_parse_schmidt_echo():
    sv = parse_schmidt("0.2,0.4,0.8,0.4", 2)
    np.testing.assert_allclose(sv.alpha, [0.8, 0.4, 0.4, 0.2])


def test_output_file_and_env(tmp_path, monkeypatch):
    out = tmp_path / "v.json"
    code, text = _run("verify", "--n", "1", "--baseline", "--output", str(out))
    assert code == EXIT_OK and out.read_text() == text
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    code, text = _run("mub-check", "--n", "1")
    assert (tmp_path / "env" / "mub-check.json").read_text() == text


def test_json_never_holds_nan():
    code, out = _run("estimate", "--n", "1", "--schmidt", "maximal", "--observable", "Z",
                     "--input", "zero^1", "--shots", "1")
    assert "NaN" not in out
    json.loads(out)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nmecut", "verify", "--n", "1", "--schmidt", "0.9,0.1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["max_abs_error"] <= 1e-10
