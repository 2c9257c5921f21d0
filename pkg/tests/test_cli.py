"""
Tests for the semifinite command-line front end.
"""
import csv
import json
import sys
from pathlib import Path

import pytest

# Add the src directory to the Python path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from semifinite.algebra import load_operator, save_operator
from semifinite.functions import ConjugatePair
from semifinite.inequalities import check_young_sv_xy
from semifinite_cli import EXIT_ERROR, EXIT_OK, _recheck_witness, _save_witness, main


def test_demo(capsys):
    print("\n=== TESTING CLI DEMO ===")
    assert main(["demo"]) == EXIT_OK
    output = capsys.readouterr().out
    assert "FAIL  young_sv_xy" in output
    assert "PASS  young_sv " in output


def test_verify_stored_pair(tmp_path, capsys, e11, e12):
    x_path = save_operator(e11, tmp_path / "x.json")
    y_path = save_operator(e12, tmp_path / "y.json")
    out = tmp_path / "reports.csv"
    code = main(["verify", "--x", str(x_path), "--y", str(y_path), "--p", "2", "--out", str(out), "--format", "csv"])
    assert code == EXIT_OK
    output = capsys.readouterr().out
    assert "(not a theorem)" in output
    with out.open() as f:
        names = [row["name"] for row in csv.DictReader(f)]
    assert "young_sv_xy" in names


def test_verify_needs_all_pair_arguments(tmp_path, m2):
    x_path = save_operator(m2.identity(), tmp_path / "x.json")
    assert main(["verify", "--x", str(x_path), "--p", "2"]) == EXIT_ERROR


def test_verify_corrupted_file(tmp_path, capsys, m2):
    x_path = save_operator(m2.identity(), tmp_path / "x.json")
    corrupted = tmp_path / "y.json"
    corrupted.write_text('{"blocks": ')
    assert main(["verify", "--x", str(x_path), "--y", str(corrupted), "--p", "2"]) == EXIT_ERROR
    assert "Error running verify" in capsys.readouterr().err


def test_verify_campaign_config(tmp_path, monkeypatch):
    monkeypatch.delenv("SNL_SEED", raising=False)
    monkeypatch.delenv("SNL_WORKERS", raising=False)
    config = tmp_path / "campaign.json"
    config.write_text(json.dumps({
        "trials": 3,
        "block_specs": [[2, 1.0], [3, 0.5]],
        "p_values": [1.5, 3.0],
        "checks": ["young_sv", "young_trace", "young_sv_xy"],
    }))
    out = tmp_path / "result.json"
    code = main(["verify", "--config", str(config), "--seed", "5", "--out", str(out)])
    assert code == EXIT_OK
    document = json.loads(out.read_text())
    assert document["config"]["seed"] == 5
    assert document["passed"] is True

    csv_out = tmp_path / "result.csv"
    assert main(["verify", "--config", str(config), "--out", str(csv_out), "--format", "csv"]) == EXIT_OK
    with csv_out.open() as f:
        assert [row["check"] for row in csv.DictReader(f)] == ["young_sv", "young_trace", "young_sv_xy"]


def test_verify_tolerance_overrides(tmp_path, monkeypatch):
    monkeypatch.delenv("SNL_SEED", raising=False)
    out = tmp_path / "result.json"
    code = main([
        "verify", "--trials", "2", "--checks", "young_sv", "--tol-rel", "1e-7", "--out", str(out),
    ])
    assert code == EXIT_OK
    assert json.loads(out.read_text())["config"]["tolerance"]["rel_tol"] == 1e-7


def test_falsify_rejects_small_dim(capsys):
    assert main(["falsify", "--dim", "1", "--seeds", "10"]) == EXIT_ERROR
    assert "dim >= 2" in capsys.readouterr().err


def test_falsify_writes_report(tmp_path, capsys):
    out = tmp_path / "search.json"
    assert main(["falsify", "--dim", "2", "--seeds", "20", "--seed", "1", "--out", str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["name"] == "xy_counterexample_search"
    assert document["details"]["kind"] == "search"
    if document["passed"]:
        x = load_operator(tmp_path / "search_x.json")
        assert x.algebra.dims == (2,)
        assert "Witness at trial" in capsys.readouterr().out
    else:
        assert "No witness in 20 trials" in capsys.readouterr().out


def test_saved_witness_reloads_and_fails_again(tmp_path, e11, e12):
    print("\n=== TESTING WITNESS ROUND TRIP ===")
    report = check_young_sv_xy(e11, e12, ConjugatePair.from_p(2.0))
    paths = _save_witness(report, tmp_path / "witness.json")
    assert [p.name for p in paths] == ["witness_x.json", "witness_y.json"]
    assert json.loads((tmp_path / "witness.json").read_text())["passed"] is False

    recheck = _recheck_witness(paths, report.witness["p"], None)
    assert not recheck.passed
    assert recheck.worst_margin == report.worst_margin
    assert recheck.worst_margin == pytest.approx(-0.5)
