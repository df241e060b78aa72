import json
from pathlib import Path

import jsonschema
import pytest

from verification.exit_codes import ExitCodes
from verification.main import main

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "config" / "schemas" / "verification_report.schema.json"


@pytest.fixture(scope="module")
def report_schema():
    return json.loads(SCHEMA_PATH.read_text())


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestAut:
    def test_klein_json(self, capsys):
        code, out = run(capsys, "aut", "--group", "2,2", "--format", "json")
        assert code == ExitCodes.SUCCESS
        data = json.loads(out)
        assert data["group"] == [2, 2]
        assert (data["aut_g_order"], data["aut_p0g_order"]) == (6, 36)
        assert data["exceptional"] is True
        assert "raw_factors" not in data
        assert data["metadata"]["search"]["solutions"] == 6

    def test_emit_maps(self, capsys):
        code, out = run(capsys, "aut", "--group", "4", "--format", "json", "--emit-maps")
        assert code == ExitCodes.SUCCESS
        maps = json.loads(out)["maps"]
        assert len(maps) == 2
        negation = next(m for m in maps if m["image"] != list(range(8)))
        assert {"subset": [0, 1], "image": [0, 3]} in negation["listing"]

    def test_text(self, capsys):
        code, out = run(capsys, "aut", "--group", "6")
        assert code == ExitCodes.SUCCESS
        header, row = out.splitlines()
        assert header.split() == ["group", "aut_g_order", "aut_p0g_order", "exceptional"]
        assert row.split() == ["6", "2", "2", "False"]

    def test_raw_factors(self, capsys):
        code, out = run(capsys, "aut", "--group", "3,2", "--raw", "--format", "json")
        assert code == ExitCodes.SUCCESS
        data = json.loads(out)
        assert data["group"] == [6]
        assert data["raw_factors"] == [3, 2]

    @pytest.mark.parametrize("literal", ["a,b", "2,,4", "0"])
    def test_bad_group_literal(self, capsys, literal):
        code, out = run(capsys, "aut", "--group", literal)
        assert code == ExitCodes.USAGE_ERROR
        assert out == ""

    def test_budget_exhaustion(self, capsys):
        code, out = run(capsys, "aut", "--group", "2,2", "--budget", "1")
        assert code == ExitCodes.RESOURCE_BOUND
        assert out == ""


class TestVerify:
    def test_trivial_group_only(self, capsys, report_schema):
        code, out = run(capsys, "verify", "--max-order", "1", "--format", "json")
        assert code == ExitCodes.SUCCESS
        document = json.loads(out)
        jsonschema.validate(document, report_schema)
        assert [r["group"] for r in document["reports"]] == [[]]

    def test_up_to_four(self, capsys, report_schema):
        code, out = run(capsys, "verify", "--max-order", "4", "--format", "json")
        assert code == ExitCodes.SUCCESS
        document = json.loads(out)
        jsonschema.validate(document, report_schema)
        reports = document["reports"]
        assert [r["group"] for r in reports] == [[], [2], [3], [2, 2], [4]]
        assert all(r["status"] == "pass" for r in reports)
        klein = reports[3]
        assert klein["exceptional"] and klein["aut_p0g_order"] == 36
        assert document["metadata"]["max_order"] == 4
        assert "elapsed" in document["metadata"]

    def test_reports_are_deterministic(self, capsys):
        first = json.loads(run(capsys, "verify", "--max-order", "4", "--format", "json")[1])
        second = json.loads(run(capsys, "verify", "--max-order", "4", "--format", "json")[1])
        assert first["reports"] == second["reports"]

    def test_parallel_sweep_matches_sequential(self, capsys):
        sequential = json.loads(run(capsys, "verify", "--max-order", "4", "--format", "json")[1])
        code, out = run(capsys, "verify", "--max-order", "4", "--format", "json", "--parallelism", "2")
        assert code == ExitCodes.SUCCESS
        assert json.loads(out)["reports"] == sequential["reports"]

    def test_csv(self, capsys):
        code, out = run(capsys, "verify", "--max-order", "3", "--format", "csv")
        assert code == ExitCodes.SUCCESS
        lines = out.splitlines()
        assert lines[0] == "group,check,status,note,witness"
        assert all(line.split(",")[0] in ("1", "2", "3") for line in lines[1:])

    def test_max_order_is_required(self, capsys):
        code, _ = run(capsys, "verify")
        assert code == ExitCodes.USAGE_ERROR

    def test_budget_skips_are_fatal_only_when_strict(self, capsys):
        code, out = run(capsys, "verify", "--max-order", "4", "--budget", "1", "--format", "json")
        assert code == ExitCodes.SUCCESS
        reports = json.loads(out)["reports"]
        assert reports[3]["aut_p0g_order"] is None
        code, _ = run(capsys, "verify", "--max-order", "4", "--budget", "1", "--strict")
        assert code == ExitCodes.RESOURCE_BOUND

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out = run(capsys, "verify", "--max-order", "2", "--format", "json", "--out", str(target))
        assert code == ExitCodes.SUCCESS
        assert out == ""
        assert json.loads(target.read_text())["reports"][1]["group"] == [2]


class TestLemmas:
    def test_cyclic_text(self, capsys):
        code, out = run(capsys, "lemmas", "--group", "3")
        assert code == ExitCodes.SUCCESS
        assert out.startswith("C3: 2 automorphisms checked")

    def test_klein_json(self, capsys, report_schema):
        code, out = run(capsys, "lemmas", "--group", "2,2", "--format", "json")
        assert code == ExitCodes.SUCCESS
        document = json.loads(out)
        jsonschema.validate(document, report_schema)
        (report,) = document["reports"]
        names = [c["name"] for c in report["checks"]]
        assert "verify_example_c2sq" in names
        assert "check_condition_A" in names
        assert report["exceptional"] is True
        assert document["metadata"]["automorphisms_checked"] == 36

    def test_group_is_required(self, capsys):
        code, _ = run(capsys, "lemmas")
        assert code == ExitCodes.USAGE_ERROR

    def test_group_above_the_order_bound(self, capsys):
        code, out = run(capsys, "lemmas", "--group", "16")
        assert code == ExitCodes.RESOURCE_BOUND
        assert out == ""

    def test_prelim_carries_the_c2_squared_note(self, capsys):
        code, out = run(capsys, "lemmas", "--group", "2,2", "--format", "json")
        assert code == ExitCodes.SUCCESS
        checks = {c["name"]: c for c in json.loads(out)["reports"][0]["checks"]}
        assert checks["check_prelim"]["note"].startswith("C2 + C2")


class TestTable:
    def test_csv(self, capsys):
        code, out = run(capsys, "table", "--group", "2", "--format", "csv")
        assert code == ExitCodes.SUCCESS
        lines = out.splitlines()
        assert len(lines) == 3
        assert lines[1] == "0,0,1"
        assert lines[2] == "1,1,1"

    def test_json(self, capsys):
        code, out = run(capsys, "table", "--group", "4", "--format", "json")
        assert code == ExitCodes.SUCCESS
        data = json.loads(out)
        assert data["carrier"][3] == [0, 1, 2]
        assert data["table"][1][1] == 3
        assert len(data["table"]) == 8

    def test_text(self, capsys):
        code, out = run(capsys, "table", "--group", "2,2")
        assert code == ExitCodes.SUCCESS
        assert "[0, 1, 2]" in out

    def test_table_bound(self, capsys):
        code, out = run(capsys, "table", "--group", "13")
        assert code == ExitCodes.RESOURCE_BOUND
        assert out == ""


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == ExitCodes.SUCCESS
    assert "powmon" in capsys.readouterr().out


@pytest.mark.parametrize("value", ["lots", "0"])
def test_malformed_settings_are_a_usage_error(capsys, env, value):
    env.setenv("POWMON_BUDGET", value)
    assert main(["aut", "--group", "2"]) == ExitCodes.USAGE_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "invalid settings" in captured.err
