"""Smoke tests for the python bindings and the CLI binary."""

import json
import os
import re
import subprocess
import sys

import pytest

import hypotor

FIXTURES = os.environ.get("HYPOTOR_FIXTURES", "tests/fixtures")
BIN = os.environ.get("HYPOTOR_BIN")


def test_version():
    assert hypotor.version().startswith("hypotor ")


def test_classify_rational_lattice():
    out = hypotor.classify([("1/2", "0"), ("1/3", "0")])
    assert out["mn"]["kind"] == "discrete-lattice"
    assert out["mn"]["step"] == "1/6"
    assert out["base_gh"] == "not-GH"


def test_classify_dense_example():
    basis = [
        {"name": "sqrt2", "kind": "sqrt", "arg": 2},
        {"name": "sqrt3", "kind": "sqrt", "arg": 3},
    ]
    out = hypotor.classify(
        [({"sqrt2": "1"}, {"sqrt3": "1"}), ("1", "1")],
        basis=basis,
    )
    assert out["mn"]["kind"] == "dense-gdelta-complex"
    assert out["nn"]["kind"] == "empty"
    assert out["base_gh"] == "GH"


def test_witness_fixture():
    spec = {
        "version": "hypotor-spec/1",
        "basis": [{"name": "L", "kind": "liouville", "base": 10, "depth": 4}],
        "operators": [
            {"id": "op", "type": "constant", "alphas": [{"re": {"L": "1"}, "im": "0"}]}
        ],
        "tasks": [
            {
                "id": "w1",
                "kind": "witness",
                "op": "op",
                "j": 1,
                "r_max": 200,
                "cf_depth": 10,
                "truncation_depth": 5,
            }
        ],
    }
    report, code = hypotor.run(spec)
    assert code == 0
    outcome = report["tasks"][0]["outcome"]
    assert outcome["found"] is True
    assert outcome["point"]["tau"] == "-11"
    assert outcome["point"]["xi"] == ["100"]
    assert outcome["verified"] is True


def test_bad_literals_rejected():
    spec = {
        "version": "hypotor-spec/1",
        "operators": [
            {"id": "op", "type": "constant", "alphas": [{"re": 0.5, "im": "0"}]}
        ],
    }
    with pytest.raises(ValueError):
        hypotor.run(spec)


def test_run_file_and_determinism(tmp_path):
    path = os.path.join(FIXTURES, "suite.json")
    report_a, code_a = hypotor.run_file(path, out_dir=str(tmp_path / "a"))
    report_b, code_b = hypotor.run_file(path, out_dir=str(tmp_path / "b"))
    assert code_a == 0 and code_b == 0
    strip = lambda s: re.sub(r'"wall_clock_ms": \d+', '"wall_clock_ms": 0', s)
    assert strip(report_a) == strip(report_b)
    assert (tmp_path / "a" / "report.json").exists()
    assert (tmp_path / "a" / "shells.csv").read_text() == (
        tmp_path / "b" / "shells.csv"
    ).read_text()
    csv = hypotor.render_csv(report_a, "fits")
    assert csv.startswith("C_hat,M_hat,residual,R_used\n")


@pytest.mark.skipif(BIN is None, reason="CLI binary path not provided")
def test_cli_end_to_end(tmp_path):
    path = os.path.join(FIXTURES, "suite.json")
    out = tmp_path / "out"
    proc = subprocess.run(
        [BIN, "run", path, "--out", str(out), "--only", "classify-rational,scan-golden"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["schema"] == "hypotor-report/1"
    assert report["tasks"][0]["outcome"]["mn"]["step"] == "1/6"
    assert (out / "report.json").exists()
    assert (out / "shells.csv").exists()

    csv_proc = subprocess.run(
        [BIN, "csv", str(out / "report.json"), "shells"], capture_output=True, text=True
    )
    assert csv_proc.returncode == 0
    assert csv_proc.stdout.startswith("r,min_modulus_sq_lo,min_modulus_sq_hi,tau,xi1,is_zero")


@pytest.mark.skipif(BIN is None, reason="CLI binary path not provided")
def test_cli_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": "hypotor-spec/1", "operators": [')
    proc = subprocess.run([BIN, "run", str(bad)], capture_output=True, text=True)
    assert proc.returncode == 2
