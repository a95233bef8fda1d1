import json
import subprocess
import sys

import pytest

from cpangular.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main, rounded
from cpangular.verification import reference_series


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "args,expected",
    [
        (["--mu", "0.005", "--nu", "0.015", "--method", "delta"], 1.01167),
        (["--mu", "0", "--nu", "0", "--j", "-2"], -2.0),
        (["--mu", "0.3", "--nu", "0.3", "--method", "closed"], 1.3),
        (["--mu", "0.005", "--nu", "0.015", "--method", "series"], 1.01167),
        (["--mu", "0.1", "--nu", "0.2", "--method", "theta"], None),
    ],
)
def test_eigen(capsys, args, expected):
    code, out, _ = run(capsys, "eigen", "--kappa", "0.5", *args)
    assert code == EXIT_OK
    report = json.loads(out)
    assert set(report) >= {"lambda", "j", "method", "order", "residuals", "localization_interval"}
    if expected is not None:
        assert report["lambda"] == pytest.approx(expected, abs=1e-5)
    lo, hi = report["localization_interval"]
    assert lo - 1e-9 <= report["lambda"] <= hi + 1e-9
    assert abs(report["residuals"]["delta_at_root"]) < 1e-6


def test_output_is_byte_identical(capsys):
    a = run(capsys, "eigen", "--mu", "0.1", "--nu", "-0.2")[1]
    b = run(capsys, "eigen", "--mu", "0.1", "--nu", "-0.2")[1]
    assert a == b


def test_series_table_matches_reference(capsys):
    code, out, _ = run(capsys, "series-table", "--kappa", "0.5", "--j", "1", "--max-order", "8")
    assert code == EXIT_OK
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "m,n,value"
    ref = reference_series()
    got = {(int(m), int(n)): float(v) for m, n, v in (r.split(",") for r in rows[1:])}
    assert got.keys() == ref.keys()
    for key, value in ref.items():
        assert got[key] == pytest.approx(value, rel=1e-5, abs=1e-12)


def test_series_table_order_zero(capsys):
    _, out, _ = run(capsys, "series-table", "--max-order", "0")
    assert out.splitlines()[1:] == ["0,0,1.00000e+00"]


def test_irrational_kappa_has_no_resonance_annotation(capsys):
    _, out, _ = run(capsys, "series-table", "--kappa-irrational", "sqrt2")
    assert not any(l.startswith("#") for l in out.splitlines())
    _, out, _ = run(capsys, "series-table", "--kappa", "0.5")
    assert out.startswith("# resonant")


def test_series_table_json(capsys):
    _, out, _ = run(capsys, "series-table", "--max-order", "2", "--format", "json")
    data = json.loads(out)
    assert data["coefficients"][0] == [0, 0, 1.0]


@pytest.mark.parametrize(
    "args",
    [
        ["bogus"],
        ["eigen", "--unknown-flag", "1"],
        ["series-table", "--kappa", "0.5", "--kappa-irrational", "sqrt2"],
        ["series-table", "--max-order", "17"],
        ["eigen", "--kappa", "0.2"],
        ["eigen", "--mu", "0.1", "--nu", "0.3", "--method", "closed"],
        ["characteristic", "--mu", "0.2", "--nu", "0.1"],
    ],
)
def test_usage_errors(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_USAGE
    assert "usage error" in err


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(capsys, "monodromy", "--kappa", "1.0")
    assert code == EXIT_USAGE  # not a half-integer: domain error
    code, _, err = run(capsys, "characteristic", "--mu", "0.2", "--nu", "0.1", "--kappa", "0.5", "--t1", "100")
    assert code == EXIT_NUMERICAL and "numerical failure" in err


def test_environment_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("CPANGULAR_TOL", "not-a-number")
    assert run(capsys, "eigen")[0] == EXIT_USAGE
    monkeypatch.setenv("CPANGULAR_TOL", "1e-6")
    assert run(capsys, "eigen", "--mu", "0.1")[0] == EXIT_OK


def test_verify_reports(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "monodromy")
    report = json.loads(out)
    assert code == EXIT_OK and report["pass"]
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)
    assert set(report["checks"][0]) == {"name", "measured", "expected", "tol", "pass"}


def test_monodromy_command(capsys):
    _, out, _ = run(capsys, "monodromy", "--kappa", "1.5")
    data = json.loads(out)
    assert data["roots"] == pytest.approx([-1.0, 0.0, 1.0], abs=1e-9)


def test_characteristic_csv(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "characteristic", "--mu", "0.2", "--nu", "0.1", "--factor", "1.5", "-o", str(path))
    assert code == EXIT_OK
    assert path.read_text().splitlines()[0] == "t,v,w,mu,nu"


def test_nine_significant_digits():
    assert rounded({"x": 1.0116740362706615, "y": [1e-20 / 3]}) == {"x": 1.01167404, "y": [3.33333333e-21]}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cpangular", "eigen", "--j", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["lambda"] == 2.0
