import json
import os

import pytest

from epcoord.cli import main

from conftest import ILLUSTRATIVE_PATH


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def _infeasible_document():
    return {
        "name": "clash",
        "nodes": [
            {"id": "r", "parent": None, "coordination_vars": [], "internal_vars": [],
             "cost": {"terms": {}, "constant": 0},
             "constraints": [{"terms": {"c.x": 1}, "relation": ">=", "rhs": 10}]},
            {"id": "c", "parent": "r", "coordination_vars": ["x"], "internal_vars": [],
             "cost": {"terms": {"x": 1}, "constant": 0},
             "constraints": [
                 {"terms": {"x": 1}, "relation": ">=", "rhs": 0},
                 {"terms": {"x": 1}, "relation": "<=", "rhs": 1},
             ]},
        ],
    }


def test_validate_reports_shape(capsys):
    code, out, _err = _run(capsys, "validate", "--input", ILLUSTRATIVE_PATH)
    assert code == 0
    report = json.loads(out)
    assert report == {"valid": True, "name": "illustrative", "root": "upper", "nodes": 3, "edges": 2}


def test_validate_missing_file_exits_2(capsys):
    code, _out, err = _run(capsys, "validate", "--input", "/nonexistent/model.json")
    assert code == 2 and err


def test_validate_malformed_json_exits_2(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _out, err = _run(capsys, "validate", "--input", str(path))
    assert code == 2 and err


def test_validate_bad_model_exits_2(capsys, tmp_path):
    doc = _infeasible_document()
    doc["nodes"][1]["parent"] = "ghost"
    code, _out, err = _run(capsys, "validate", "--input", _write(tmp_path, "m.json", doc))
    assert code == 2 and err


def test_project_emits_exact_models(capsys):
    code, out, _err = _run(capsys, "project", "--input", ILLUSTRATIVE_PATH)
    assert code == 0
    report = json.loads(out)
    by_owner = {ep["owner"]: ep for ep in report["eps"]}
    assert set(by_owner) == {"low1", "low2"}
    assert by_owner["low1"]["variables"] == ["low1.x1", "low1.pi"]
    rows = {
        (tuple(sorted((k, str(v)) for k, v in r["terms"].items())), str(r["rhs"]))
        for r in by_owner["low1"]["rows"]
    }
    assert ((("low1.pi", "1"),), "7") in rows
    assert ((("low1.pi", "-1"), ("low1.x1", "2")), "1") in rows


def test_project_infeasible_subsystem_exits_1(capsys, tmp_path):
    doc = _infeasible_document()
    doc["nodes"][1]["constraints"].append({"terms": {"x": 1}, "relation": ">=", "rhs": 5})
    code, _out, err = _run(capsys, "project", "--input", _write(tmp_path, "m.json", doc))
    assert code == 1 and "c" in err


def test_solve_joint_exact_value(capsys):
    code, out, _err = _run(capsys, "solve", "--input", ILLUSTRATIVE_PATH, "--mode", "joint")
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "optimal"
    assert report["value"]["exact"] == "17/2"
    assert report["assignment"]["low1.x1"]["exact"] == "5/2"


def test_solve_joint_infeasible_exits_1(capsys, tmp_path):
    code, out, _err = _run(capsys, "solve", "--input",
                           _write(tmp_path, "m.json", _infeasible_document()),
                           "--mode", "joint")
    assert code == 1
    assert json.loads(out)["status"] == "infeasible"


def test_solve_coordinated_with_csv(capsys, tmp_path):
    csv_path = tmp_path / "dispatch.csv"
    out_path = tmp_path / "report.json"
    code, _out, _err = _run(capsys, "solve", "--input", ILLUSTRATIVE_PATH,
                            "--mode", "coordinated",
                            "--output", str(out_path), "--csv", str(csv_path))
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["objective"]["exact"] == "17/2"
    assert report["nodes"]["low1"]["coordination"]["x1"]["exact"] == "5/2"
    assert len(report["messages"]) == 4
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "node,kind,name,exact,approx"
    # header + 4 rows per lower system + 1 own-cost row for the root
    assert len(lines) == 10
    assert "low1,coordination,x1,5/2,2.5" in lines


def test_solve_coordinated_infeasible_exits_1(capsys, tmp_path):
    code, _out, err = _run(capsys, "solve", "--input",
                           _write(tmp_path, "m.json", _infeasible_document()),
                           "--mode", "coordinated")
    assert code == 1 and err


def test_solve_compare_with_verify(capsys):
    code, out, _err = _run(capsys, "solve", "--input", ILLUSTRATIVE_PATH,
                           "--mode", "compare", "--verify", "--samples", "50")
    assert code == 0
    report = json.loads(out)
    assert report["values_equal"] is True
    assert report["consistent"] is True
    checks = report["projection_checks"]
    assert set(checks) == {"low1", "low2"}
    assert all(c["passed"] for c in checks.values())


def test_solve_compare_deterministic_output(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        code, _out, _err = _run(capsys, "solve", "--input", ILLUSTRATIVE_PATH,
                                "--mode", "compare", "--output", str(path))
        assert code == 0
    assert a.read_text() == b.read_text()


def test_plot_writes_png_files(capsys, tmp_path):
    out_path = tmp_path / "proj.json"
    code, _out, _err = _run(capsys, "project", "--input", ILLUSTRATIVE_PATH,
                            "--output", str(out_path), "--plot")
    assert code == 0
    report = json.loads(out_path.read_text())
    figures = report["figures"]
    assert len(figures) == 2
    for path in figures:
        assert path.endswith(".png") and os.path.exists(path)
        with open(path, "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_gen_round_trips_through_validate(capsys, tmp_path):
    path = tmp_path / "gen.json"
    code, _out, _err = _run(capsys, "gen", "--seed", "7", "--levels", "3",
                            "--output", str(path))
    assert code == 0
    code, out, _err = _run(capsys, "validate", "--input", str(path))
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_bench_report_fields(capsys):
    code, out, _err = _run(capsys, "bench", "--input", ILLUSTRATIVE_PATH, "--reps", "2")
    assert code == 0
    report = json.loads(out)
    assert report["repetitions"] == 2
    assert set(report["stage1_times"]) == {"low1", "low2"}
    assert report["t_coor"] > 0
    assert report["t_jod"] > 0
    assert report["composition"] == "max(stage1_times) + stage2_time + max(stage3_times)"
