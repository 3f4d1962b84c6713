from __future__ import annotations

import contextlib
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from seqbox.cli import main

DEMO_SPEC = Path(__file__).parent / "data" / "demo_spec.json"


def run_cli(*args: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        with pytest.raises(SystemExit) as exc:
            main(list(args))
    code = exc.value.code or 0
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def demo_csv_path(tmp_path) -> Path:
    target = tmp_path / "demo.csv"
    code, _out, err = run_cli("generate", str(DEMO_SPEC), "--out", str(target))
    assert code == 0, err
    return target


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("generate", str(DEMO_SPEC), "--out", str(a))[0] == 0
    assert run_cli("generate", str(DEMO_SPEC), "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_seed_override_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("generate", str(DEMO_SPEC), "--out", str(a))
    run_cli("generate", str(DEMO_SPEC), "--out", str(b), "--seed", "123")
    assert a.read_bytes() != b.read_bytes()


def test_generate_reports_counts(tmp_path):
    code, out, _err = run_cli(
        "generate", str(DEMO_SPEC), "--out", str(tmp_path / "x.csv")
    )
    assert code == 0
    assert "100 sequences" in out


def test_generate_invalid_spec_is_data_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"seed": 1}), encoding="utf-8")
    code, _out, err = run_cli("generate", str(bad), "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "spec requires" in err


def test_ingest_check_reports_counts(demo_csv_path):
    code, out, _err = run_cli("ingest-check", str(demo_csv_path))
    assert code == 0
    assert "sequences:        100" in out
    assert "event types:      10" in out


def test_ingest_check_malformed_is_data_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,event_type,start,end\np1,A,nope,\n", encoding="utf-8")
    code, _out, err = run_cli("ingest-check", str(bad))
    assert code == 2
    assert "timestamp" in err


def test_overview_json_document(demo_csv_path, tmp_path):
    out_path = tmp_path / "overview.json"
    code, out, _err = run_cli(
        "overview", str(demo_csv_path), "--coverage", "1.0", "--out", str(out_path)
    )
    assert code == 0
    assert "unique sequences: 5" in out
    assert "selected rows:    5" in out
    doc = json.loads(out_path.read_text(encoding="utf-8"))
    assert doc["schema_version"] == 1
    assert len(doc["rows"]) == 5


def test_overview_svg_is_well_formed(demo_csv_path, tmp_path):
    out_path = tmp_path / "overview.svg"
    code, _out, _err = run_cli(
        "overview", str(demo_csv_path),
        "--align", "In Consultation",
        "--format", "svg", "--out", str(out_path),
    )
    assert code == 0
    root = ET.fromstring(out_path.read_text(encoding="utf-8"))
    assert root.tag.endswith("svg")


def test_overview_filters_and_scales(demo_csv_path, tmp_path):
    out_path = tmp_path / "thu.json"
    code, out, _err = run_cli(
        "overview", str(demo_csv_path),
        "--days", "Thu",
        "--axis", "day-of-week",
        "--color", "month-of-year",
        "--k", "3.0",
        "--coverage", "1.0",
        "--out", str(out_path),
    )
    assert code == 0
    doc = json.loads(out_path.read_text(encoding="utf-8"))
    assert doc["axis"]["kind"] == "day-of-week"
    assert doc["color_legend"][0] == "Jan"
    assert doc["totals"]["n_sequences"] < 100


def test_overview_unknown_anchor_is_data_error(demo_csv_path, tmp_path):
    code, _out, err = run_cli(
        "overview", str(demo_csv_path),
        "--align", "Nope", "--out", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "Nope" in err


def test_overview_bad_flag_is_usage_error(demo_csv_path, tmp_path):
    code, _out, _err = run_cli(
        "overview", str(demo_csv_path),
        "--coverage", "1.5", "--out", str(tmp_path / "x.json"),
    )
    assert code == 1


def test_unknown_command_is_usage_error():
    code, _out, _err = run_cli("frobnicate")
    assert code == 1


def test_missing_input_file_is_data_error(tmp_path):
    code, _out, _err = run_cli("ingest-check", str(tmp_path / "missing.csv"))
    assert code == 2


def test_trend_reports_planted_slope(demo_csv_path):
    code, out, _err = run_cli(
        "trend", str(demo_csv_path), "--event", "Height and Weight"
    )
    assert code == 0
    line = out.strip().splitlines()[-1]
    assert line.startswith("Height and Weight")
    rho = float(line.rsplit("=", 1)[1])
    assert rho <= -0.8


def test_trend_constant_duration_is_zero(tmp_path):
    csv_path = tmp_path / "const.csv"
    rows = "".join(
        f"p{i},E,2019-03-04T{8 + i:02d}:00:00Z,2019-03-04T{8 + i:02d}:01:00Z\n"
        for i in range(6)
    )
    csv_path.write_text("id,event_type,start,end\n" + rows, encoding="utf-8")
    code, out, _err = run_cli("trend", str(csv_path))
    assert code == 0
    assert "spearman=+0.0000" in out


def test_trend_unknown_event_is_data_error(demo_csv_path):
    code, _out, err = run_cli("trend", str(demo_csv_path), "--event", "Nope")
    assert code == 2
    assert "not present" in err


def test_help_exits_zero():
    code, out, _err = run_cli("--help")
    assert code == 0
    assert "overview" in out
