import csv
import json
import subprocess
import sys

import pytest


def run(*args, cwd=None):
    proc = subprocess.run([sys.executable, "-m", "peano_lab", *args], capture_output=True, text=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


def run_json(*args):
    code, out, err = run(*args)
    assert code == 0, err
    return json.loads(out)


def test_curve_eval():
    out = run_json("curve", "eval", "--kind", "hilbert", "--dim", "2", "--depth", "1", "--t", "1/4")
    assert out["point"] == ["0", "1/2"]
    out = run_json("curve", "eval", "--kind", "peano", "--depth", "3", "--t", "1")
    assert out["point"] == ["1", "1"]


def test_curve_trace_csv(tmp_path):
    path = tmp_path / "points.csv"
    code, _, err = run("curve", "trace", "--samples", "5", "--depth", "3", "--out", str(path))
    assert code == 0, err
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["t", "x1", "x2"] and len(rows) == 6
    assert rows[-1] == ["1.0", "1.0", "0.0"]


def test_surjection_commands():
    out = run_json("surjection", "eval", "--target", "r2", "--t", "5/2", "--depth", "8")
    assert out["tile"] == {"k": 1, "n": 2, "local": "1/2"}
    out = run_json("surjection", "witnesses", "--point", "0.3,0.7", "--count", "2", "--beyond", "100",
                   "--tol", "1/100")
    assert out["pass"] and len(out["witnesses"]) == 2
    assert all(r <= 0.01 for r in out["residuals"])


def test_order_commands(tmp_path):
    path = tmp_path / "f.json"
    code, _, _ = run("order", "coeffs", "--alpha", "1.5", "--n", "60", "--out", str(path))
    assert code == 0
    out = run_json("order", "estimate", "--series", str(path))
    assert out["estimate"] == pytest.approx(1.5) and out["method"] == "limsup"
    assert set(out) >= {"estimate", "method", "window", "residual"}


def test_algebra_order():
    out = run_json("algebra", "order", "--orders", "0.7,1.9", "--poly", "z1*z2+z1")
    assert abs(out["estimate"] - 1.9) <= 0.15


def test_family_roundtrip(tmp_path):
    path = tmp_path / "family.json"
    code, _, err = run("family", "build", "--seeds", "sqrt2,sqrt3,phi", "--prefix", "16", "--out", str(path))
    assert code == 0, err
    out = run_json("family", "rank", "--family", str(path), "--samples-per-member", "4")
    assert out["rank"] == 3 and len(out["singular_values"]) == 3


def test_seq_commands(tmp_path):
    out = run_json("seq", "phi", "--r", "1.0", "--t", "1.0")
    assert out["phi"] == pytest.approx(2.3504023872876028)
    (tmp_path / "x.json").write_text(json.dumps({"entries": [1.0]}))
    (tmp_path / "y.json").write_text(json.dumps({"entries": []}))
    out = run_json("seq", "metric", "--kind", "product", "--x", str(tmp_path / "x.json"), "--y", str(tmp_path / "y.json"))
    assert out["value"] == pytest.approx(0.25)


def test_verify_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        code, _, err = run("verify", "--suite", "adset", "--seed", "3", "--out", str(p))
        assert code == 0, err
    assert a.read_bytes() == b.read_bytes()


def test_exit_codes():
    assert run("curve", "eval", "--dim", "5", "--t", "1/2")[0] == 2
    assert run("surjection", "eval", "--target", "q7", "--t", "1")[0] == 2
    assert run("order", "estimate", "--series", "/nonexistent.json")[0] == 2
    code, _, err = run("surjection", "witnesses", "--point", "50,50", "--tol", "1/10", "--max-tiles", "10")
    assert code == 1 and "BudgetExhausted" in err
    assert run("curve", "bogus")[0] == 2
