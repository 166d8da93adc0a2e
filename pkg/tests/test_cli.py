import json
import subprocess
import sys
from pathlib import Path

import pytest

from derlab.cli import explain, main, run_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_empty_suite_list_exit_zero():
    report, code = run_scenario(str(SCENARIOS / "empty.json"))
    assert code == 0
    assert report["items"] == []
    assert report["summary"] == {"pass": 0, "fail": 0, "unknown": 0}


def test_gate_rejects_non_self_injective():
    report, code = run_scenario(str(SCENARIOS / "gate_failure.json"))
    assert code == 2
    assert "self-injective" in report["error"]


def test_missing_scenario_exit_two():
    report, code = run_scenario(str(SCENARIOS / "no_such_file.json"))
    assert code == 2


def test_unknown_suite_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"algebra": str(SCENARIOS / "dual_numbers.json"), "suites": ["nope"]}))
    report, code = run_scenario(str(bad))
    assert code == 2


def test_regression_scenario_passes():
    report, code = run_scenario(str(SCENARIOS / "regression.json"))
    assert code == 0, json.dumps(report.get("summary"), indent=2)
    assert report["summary"]["fail"] == 0
    assert report["summary"]["unknown"] == 0
    assert report["summary"]["pass"] >= 50
    # gorenstein items carry witness dimensions
    gor = [it for it in report["items"] if it["suite"] == "gorenstein-report"]
    assert gor and all("witness" in it["details"] for it in gor)


def test_report_reproducible():
    rep1, _ = run_scenario(str(SCENARIOS / "regression.json"))
    rep2, _ = run_scenario(str(SCENARIOS / "regression.json"))
    rep1.pop("meta")
    rep2.pop("meta")
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_workers_flag_same_items():
    rep1, code1 = run_scenario(str(SCENARIOS / "regression.json"))
    rep2, code2 = run_scenario(str(SCENARIOS / "regression.json"), workers=3)
    assert code1 == code2 == 0
    assert [it["id"] for it in rep1["items"]] == [it["id"] for it in rep2["items"]]
    assert [it["verdict"] for it in rep1["items"]] == [it["verdict"] for it in rep2["items"]]


def test_explain_known_and_unknown_item(tmp_path):
    report, code = run_scenario(str(SCENARIOS / "regression.json"))
    some_id = report["items"][0]["id"]
    text = explain(report, some_id)
    assert some_id in text and "verdict" in text
    with pytest.raises(KeyError):
        explain(report, "no/such/item")


def test_main_entrypoint(tmp_path):
    out = tmp_path / "report.json"
    code = main(["run", str(SCENARIOS / "empty.json"), "--report", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["summary"]["pass"] == 0


def test_main_explain(tmp_path, capsys):
    out = tmp_path / "report.json"
    main(["run", str(SCENARIOS / "regression.json"), "--report", str(out)])
    capsys.readouterr()
    code = main(["explain", str(out), "derivator-axioms/der1"])
    captured = capsys.readouterr()
    assert code == 0
    assert "derivator-axioms/der1" in captured.out


def test_budget_zero_reports_unknown_exit_three():
    report, code = run_scenario(str(SCENARIOS / "budget_zero.json"))
    assert code == 3
    assert report["summary"]["unknown"] >= 1
    unknowns = [it for it in report["items"] if it["verdict"] == "unknown"]
    assert unknowns and "budget" in unknowns[0]["details"]["reason"]


def test_exit_code_partition():
    from derlab.cli import exit_code_for

    assert exit_code_for({"pass": 3, "fail": 0, "unknown": 0}) == 0
    assert exit_code_for({"pass": 3, "fail": 1, "unknown": 2}) == 1
    assert exit_code_for({"pass": 3, "fail": 0, "unknown": 2}) == 3


def test_empty_shape_rejected(tmp_path):
    cat = tmp_path / "empty_cat.json"
    cat.write_text(json.dumps({"objects": [], "morphisms": [], "comp": {}}))
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({
        "algebra": str(SCENARIOS / "dual_numbers.json"),
        "categories": {"nothing": "empty_cat.json"},
        "suites": ["validate"],
    }))
    report, code = run_scenario(str(scen))
    assert code == 2
    assert "empty" in report["error"]
