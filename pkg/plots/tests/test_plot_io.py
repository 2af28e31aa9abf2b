"""Schema validation for the persisted-result readers."""

import json

import pytest

from rcmplot.io import RawSample, SchemaError, load_raw, load_summary


def test_round_trip(make_files):
    summary, raw = make_files(ns=(100.0, 300.0), reps=5)
    doc = load_summary(summary)
    assert doc["config"]["statistic"] == "isolated_mean"
    assert set(doc["per_n"]) == {"100.0", "300.0"}
    rows = load_raw(raw)
    assert len(rows) == 10
    assert all(isinstance(row, RawSample) for row in rows)
    assert {row.n for row in rows} == {100.0, 300.0}
    assert all(row.statistic == "isolated_mean" for row in rows)


def test_header_mismatch_names_column(make_files, tmp_path):
    _, raw = make_files()
    text = open(raw).read().replace("statistic,n,replication,value",
                                    "statistic,nn,replication,value")
    bad = tmp_path / "bad.csv"
    bad.write_text(text)
    with pytest.raises(SchemaError, match="column 'nn' should be 'n'"):
        load_raw(str(bad))


def test_short_header_reports_count(tmp_path):
    bad = tmp_path / "short.csv"
    bad.write_text("statistic,n\n")
    with pytest.raises(SchemaError, match="2 columns, expected 4"):
        load_raw(str(bad))


def test_malformed_row_names_line(make_files, tmp_path):
    _, raw = make_files(ns=(100.0,), reps=3)
    lines = open(raw).read().splitlines()
    lines[2] = "isolated_mean,100.0,1"  # drop the value field on data line 2
    bad = tmp_path / "rows.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match=rf"{bad}:3: expected 4 fields"):
        load_raw(str(bad))


def test_unparseable_value_names_line(make_files, tmp_path):
    _, raw = make_files(ns=(100.0,), reps=3)
    lines = open(raw).read().splitlines()
    lines[3] = "isolated_mean,100.0,2,plenty"
    bad = tmp_path / "value.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match=rf"{bad}:4:"):
        load_raw(str(bad))


def test_empty_and_headerless_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SchemaError, match="expected header"):
        load_raw(str(empty))
    lonely = tmp_path / "lonely.csv"
    lonely.write_text("statistic,n,replication,value\n")
    with pytest.raises(SchemaError, match="no samples"):
        load_raw(str(lonely))


def test_summary_missing_fields_are_named(make_files, tmp_path):
    summary, _ = make_files(ns=(100.0,))
    doc = json.load(open(summary))

    for mutate, needle in (
        (lambda d: d.pop("per_n"), "'per_n'"),
        (lambda d: d["config"].pop("statistic"), "'config.statistic'"),
        (lambda d: d["prediction"].pop("applicable"), "'prediction.applicable'"),
        (lambda d: d["per_n"]["100.0"].pop("median"), "'per_n.100.0.median'"),
    ):
        broken = json.loads(json.dumps(doc))
        mutate(broken)
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(broken))
        with pytest.raises(SchemaError, match=needle):
            load_summary(str(path))


def test_applicable_prediction_needs_value_and_claim(make_files, tmp_path):
    summary, _ = make_files()
    doc = json.load(open(summary))
    del doc["prediction"]["claim"]
    path = tmp_path / "claimless.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="'prediction.claim'"):
        load_summary(str(path))
    doc["prediction"] = {"applicable": False, "reason": "out of scope"}
    path.write_text(json.dumps(doc))
    load_summary(str(path))  # inapplicable predictions carry no value


def test_band_claim_needs_band_field(make_files, tmp_path):
    summary, _ = make_files(
        prediction={"applicable": True, "value": 0.5, "claim": "band"})
    with pytest.raises(SchemaError, match="'prediction.band'"):
        load_summary(summary)


def test_not_json_is_reported(tmp_path):
    path = tmp_path / "noise.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError, match="not valid JSON"):
        load_summary(str(path))
