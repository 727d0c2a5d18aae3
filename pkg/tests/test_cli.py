import json
import math

import pytest

from laplace_ode import fixture_path
from laplace_ode.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_airy_values(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", "--spec", str(fixture_path("airy")),
                       "--z", "0", "--z", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    vals = {r["z"]["re"]: r["value"]["re"] for r in doc["results"]}
    assert abs(vals[0.0] - 0.3550280539) < 1e-9
    assert abs(vals[1.0] - 0.1352924163) < 1e-9


def test_eval_requires_z(capsys):
    code, _out, err = run(capsys, "eval", "--spec", str(fixture_path("airy")))
    assert code == 2
    assert "z" in err


def test_eval_csv_format(capsys):
    code, out, _ = run(capsys, "eval", "--spec", str(fixture_path("airy")),
                       "--z", "0", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("z_re,z_im,j,")
    assert len(lines) == 2


def test_verify_fixture_passes(capsys):
    code, out, _ = run(capsys, "verify", "--spec",
                       str(fixture_path("ex7_3")), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_residual"] <= 1e-8


def test_verify_fails_with_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "--spec", str(fixture_path("airy")),
                       "--residual-tol", "1e-18", "--format", "json")
    assert code == 1
    doc = json.loads(out)
    assert doc["max_residual"] > 1e-18


def test_verify_corrupted_spec(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n":2,"a":[0,0],"b":[0,0]}')
    code, _out, err = run(capsys, "verify", "--spec", str(bad))
    assert code == 2
    assert "input error" in err


def test_missing_file_is_input_error(capsys):
    code, _out, err = run(capsys, "verify", "--spec", "/nonexistent.json")
    assert code == 2


def test_tol_range_enforced(capsys):
    code, _out, _err = run(capsys, "eval", "--spec",
                           str(fixture_path("airy")), "--z", "0",
                           "--tol", "1e-20")
    assert code == 2


def test_symmetry_non_integer_sum_is_numeric_failure(capsys, tmp_path):
    spec = tmp_path / "odd.json"
    spec.write_text('{"n":5,"a":[-2,0,7.5,0,0],"b":[0,1,0,-1,0]}')
    code, _out, err = run(capsys, "symmetry", "--spec", str(spec))
    assert code == 3
    assert "numeric failure" in err


def test_symmetry_classification(capsys):
    code, out, _ = run(capsys, "symmetry", "--spec",
                       str(fixture_path("ex7_2")))
    assert code == 0
    doc = json.loads(out)
    assert doc["classification"] == "residue_combination"
    assert doc["max_relative_deviation"] < 1e-8


def test_residues_report(capsys):
    code, out, _ = run(capsys, "residues", "--spec",
                       str(fixture_path("ex7_6")))
    assert code == 0
    doc = json.loads(out)
    assert doc["residue_sum_integer"] == 1
    assert doc["single_valued_outside"] is True
    assert all(p["lambda_integer"] is None for p in doc["poles"])
    assert doc["residue_solutions"] == []


def test_indicator_csv(capsys):
    code, out, _ = run(capsys, "indicator", "--spec",
                       str(fixture_path("airy")), "--theta-grid", "5",
                       "--radii", "10", "--format", "csv", "--tol", "1e-8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "theta,r,h_emp,h_pred,deviation"
    assert len(lines) == 6


def test_zeros_command(capsys):
    code, out, _ = run(capsys, "zeros", "--spec", str(fixture_path("airy")),
                       "--sector=-1.5707963267948966,1.5707963267948966,6",
                       "--tol", "1e-8", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"][0]["count"] == 0


def test_report_bundle_and_determinism(capsys):
    args = ("report", "--spec", str(fixture_path("ex7_2")), "--tol", "1e-8",
            "--theta-grid", "7", "--radii", "8,12", "--no-zeros")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    code, out2, _ = run(capsys, *args)
    assert out1 == out2                       # byte-identical
    doc = json.loads(out1)
    orders = [e["order"] for e in doc["order_catalog"]]
    assert orders == ["3/2", "1", "1/2"]
    assert doc["symmetry"]["classification"] == "residue_combination"
    assert {str(p["lambda_integer"]) for p in doc["poles"]} == {"0"}
    assert doc["partial_failures"] == {}


def test_report_airy_nevanlinna(capsys):
    code, out, _ = run(capsys, "report", "--spec", str(fixture_path("airy")),
                       "--tol", "1e-8", "--theta-grid", "9",
                       "--radii", "10,20", "--no-zeros")
    assert code == 0
    doc = json.loads(out)
    t_pred = doc["nevanlinna"]["predicted_exact"][0]
    assert abs(t_pred - 8 / (9 * math.pi)) < 1e-9
