import json

import pytest
from click.testing import CliRunner

from merlan.cli import main
from conftest import HOUSE_PATH

SMOKE_SNAPSHOT = {
    "timestamp": "2024-01-01T00:00:00Z",
    "detections": [
        {
            "id": "d1",
            "entity": "smoke",
            "kind": "concrete",
            "modality": "image",
            "confidence": 0.6,
            "attributes": {},
        }
    ],
}

BAD_CARD_SOURCE = (
    "ENTITIES:\n  CONCRETE:\n    smoke\n"
    "REQUIREMENTS:\n  r:\n    CONCRETE [5..2]\n"
    "      - entity: smoke\n      - name: \"s\"\n"
    "      - modality: \"image\"\n      - confidence: 0.5\n"
)


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def house_file(tmp_path):
    path = tmp_path / "house.mln"
    path.write_text(HOUSE_PATH.read_text(encoding="utf-8"), encoding="utf-8")
    return path


@pytest.fixture()
def smoke_snapshot_file(tmp_path):
    path = tmp_path / "smoke.json"
    path.write_text(json.dumps(SMOKE_SNAPSHOT), encoding="utf-8")
    return path


class TestCheck:
    def test_valid_corpus_exits_zero(self, runner, house_file):
        result = runner.invoke(main, ["check", str(house_file)])
        assert result.exit_code == 0

    def test_validation_error_exits_one(self, runner, tmp_path):
        path = tmp_path / "bad.mln"
        path.write_text(BAD_CARD_SOURCE, encoding="utf-8")
        result = runner.invoke(main, ["check", str(path)])
        assert result.exit_code == 1
        assert "E005" in result.output

    def test_missing_file_exits_two(self, runner, tmp_path):
        result = runner.invoke(main, ["check", str(tmp_path / "absent.mln")])
        assert result.exit_code == 2

    def test_parse_error_exits_two(self, runner, tmp_path):
        path = tmp_path / "broken.mln"
        path.write_text("REQUIREMENTS:\n  r:\n    AND\n", encoding="utf-8")
        result = runner.invoke(main, ["check", str(path)])
        assert result.exit_code == 2

    def test_json_output_is_schema_versioned(self, runner, house_file):
        result = runner.invoke(main, ["--json", "check", str(house_file)])
        payload = json.loads(result.output)
        assert payload["schema_version"] == "1"
        assert payload["ok"] is True
        assert payload["diagnostics"] == []

    def test_unknown_modality_accepted_via_flag(self, runner, tmp_path):
        path = tmp_path / "temp.mln"
        path.write_text(
            "ENTITIES:\n  CONCRETE:\n    sensor\n"
            "REQUIREMENTS:\n  r:\n    CONCRETE\n"
            "      - entity: sensor\n      - name: \"s\"\n"
            "      - modality: \"temperature\"\n      - confidence: 0.5\n",
            encoding="utf-8",
        )
        plain = runner.invoke(main, ["--json", "check", str(path)])
        assert "W001" in plain.output
        allowed = runner.invoke(
            main, ["--json", "--modalities", "temperature", "check", str(path)]
        )
        assert "W001" not in allowed.output

    def test_config_file_supplies_modalities(self, runner, tmp_path):
        spec_path = tmp_path / "temp.mln"
        spec_path.write_text(
            "ENTITIES:\n  CONCRETE:\n    sensor\n"
            "REQUIREMENTS:\n  r:\n    CONCRETE\n"
            "      - entity: sensor\n      - name: \"s\"\n"
            "      - modality: \"movement\"\n      - confidence: 0.5\n",
            encoding="utf-8",
        )
        config_path = tmp_path / "merlan.cfg"
        config_path.write_text("modalities = movement, temperature\n", encoding="utf-8")
        result = runner.invoke(
            main, ["--json", "--config", str(config_path), "check", str(spec_path)]
        )
        assert "W001" not in result.output


class TestEval:
    def test_house_with_smoke_snapshot(self, runner, house_file, smoke_snapshot_file):
        result = runner.invoke(
            main, ["eval", str(house_file), str(smoke_snapshot_file)]
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload == {
            "requirement1": {"satisfied": True},
            "requirement2": {"satisfied": False},
        }

    def test_single_requirement_filter(self, runner, house_file, smoke_snapshot_file):
        result = runner.invoke(
            main,
            [
                "eval",
                str(house_file),
                str(smoke_snapshot_file),
                "--requirement",
                "requirement1",
            ],
        )
        payload = json.loads(result.output)
        assert list(payload) == ["requirement1"]

    def test_trace_included_on_request(self, runner, house_file, smoke_snapshot_file):
        result = runner.invoke(
            main, ["eval", str(house_file), str(smoke_snapshot_file), "--trace"]
        )
        payload = json.loads(result.output)
        assert payload["requirement1"]["trace"]["matched_detection_ids"] == ["d1"]

    def test_malformed_snapshot_exits_two_naming_field(
        self, runner, house_file, tmp_path
    ):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps({"detections": [{"id": "d1", "entity": "smoke"}]}),
            encoding="utf-8",
        )
        result = runner.invoke(main, ["eval", str(house_file), str(path)])
        assert result.exit_code == 2
        assert "detections[0].kind" in result.output

    def test_invalid_spec_exits_one(self, runner, tmp_path, smoke_snapshot_file):
        path = tmp_path / "bad.mln"
        path.write_text(BAD_CARD_SOURCE, encoding="utf-8")
        result = runner.invoke(main, ["eval", str(path), str(smoke_snapshot_file)])
        assert result.exit_code == 1

    def test_fail_unsatisfied_exits_three(
        self, runner, house_file, smoke_snapshot_file
    ):
        result = runner.invoke(
            main,
            ["eval", str(house_file), str(smoke_snapshot_file), "--fail-unsatisfied"],
        )
        assert result.exit_code == 3

    def test_multiple_snapshots_with_jobs_keep_order(
        self, runner, house_file, tmp_path
    ):
        empty = tmp_path / "empty.json"
        empty.write_text(json.dumps({"detections": []}), encoding="utf-8")
        smoke = tmp_path / "smoke.json"
        smoke.write_text(json.dumps(SMOKE_SNAPSHOT), encoding="utf-8")
        result = runner.invoke(
            main,
            ["eval", str(house_file), str(smoke), str(empty), "--jobs", "4"],
        )
        payload = json.loads(result.output)
        assert [entry["snapshot"] for entry in payload] == [str(smoke), str(empty)]
        assert payload[0]["results"]["requirement1"]["satisfied"] is True
        assert payload[1]["results"]["requirement1"]["satisfied"] is False


class TestGen:
    def test_writes_golden_output(self, runner, house_file, tmp_path):
        out = tmp_path / "agent.py.txt"
        result = runner.invoke(main, ["gen", str(house_file), "--out", str(out)])
        assert result.exit_code == 0
        from conftest import GOLDEN_PATH

        assert out.read_text(encoding="utf-8") == GOLDEN_PATH.read_text(encoding="utf-8")

    def test_manifest_written(self, runner, house_file, tmp_path):
        out = tmp_path / "agent.py.txt"
        manifest = tmp_path / "m.json"
        result = runner.invoke(
            main,
            ["gen", str(house_file), "--out", str(out), "--manifest", str(manifest)],
        )
        assert result.exit_code == 0
        payload = json.loads(manifest.read_text(encoding="utf-8"))
        assert payload["requirements"] == ["requirement1", "requirement2"]

    def test_invalid_spec_writes_nothing(self, runner, tmp_path):
        path = tmp_path / "bad.mln"
        path.write_text(BAD_CARD_SOURCE, encoding="utf-8")
        out = tmp_path / "agent.py.txt"
        result = runner.invoke(main, ["gen", str(path), "--out", str(out)])
        assert result.exit_code == 1
        assert not out.exists()


class TestFmt:
    def test_check_on_unformatted_exits_four_with_diff(self, runner, house_file):
        result = runner.invoke(main, ["fmt", str(house_file), "--check"])
        assert result.exit_code == 4
        assert "---" in result.output

    def test_check_on_formatted_exits_zero(self, runner, house_file):
        assert runner.invoke(main, ["fmt", str(house_file)]).exit_code == 0
        result = runner.invoke(main, ["fmt", str(house_file), "--check"])
        assert result.exit_code == 0

    def test_formatting_is_idempotent(self, runner, house_file):
        runner.invoke(main, ["fmt", str(house_file)])
        first = house_file.read_text(encoding="utf-8")
        runner.invoke(main, ["fmt", str(house_file)])
        assert house_file.read_text(encoding="utf-8") == first

    def test_parse_error_exits_two(self, runner, tmp_path):
        path = tmp_path / "broken.mln"
        path.write_text('- name: "oops\n', encoding="utf-8")
        result = runner.invoke(main, ["fmt", str(path)])
        assert result.exit_code == 2
