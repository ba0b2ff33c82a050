"""Serialization: JSONL/CSV round-trips and atomic writes."""

from __future__ import annotations

import json

import pytest

from history_gen import fake_sha
from satdtrack.errors import SchemaViolation
from satdtrack.export import (
    RAW_FIELDS,
    TRACKED_FIELDS,
    atomic_write,
    raw_to_record,
    read_tracked,
    read_tracked_jsonl,
    tracked_to_record,
    write_jsonl,
    write_tracked,
)
from satdtrack.match import TrackedSatd
from satdtrack.track import RawSatd

C = [fake_sha(f"export-c{i}") for i in range(4)]

SAMPLE = [
    TrackedSatd(
        created_in_file="a/io.java",
        last_appeared_in_file="a/io.java",
        created_in_line=39,
        last_appeared_in_line=74,
        created_in_commit=C[0],
        deleted_in_commit=C[2],
        creation_text="// TODO: update, etc",
        update_texts=["// TODO: update and use it (placeholder)"],
        updated_in_lines=[(39, 74)],
        updated_in_commits=[C[1]],
    ),
    TrackedSatd(
        created_in_file="b.py",
        last_appeared_in_file="b_new.py",
        created_in_line=7,
        last_appeared_in_line=7,
        created_in_commit=C[1],
        deleted_in_commit=None,
        creation_text="# FIXME boundary, with commas",
        update_texts=[],
        updated_in_lines=[],
        updated_in_commits=[],
    ),
]


def test_jsonl_round_trip(tmp_path):
    path = tmp_path / "out.jsonl"
    write_tracked(SAMPLE, path, "jsonl")
    loaded = read_tracked_jsonl(path)
    assert [tracked_to_record(s) for s in loaded] == [
        tracked_to_record(s) for s in SAMPLE
    ]


def test_csv_round_trips_to_same_records(tmp_path):
    jsonl = tmp_path / "out.jsonl"
    csvf = tmp_path / "out.csv"
    write_tracked(SAMPLE, jsonl, "jsonl")
    write_tracked(SAMPLE, csvf, "csv")
    assert [tracked_to_record(s) for s in read_tracked(csvf)] == [
        tracked_to_record(s) for s in read_tracked(jsonl)
    ]


def test_csv_header_matches_field_contract(tmp_path):
    path = tmp_path / "out.csv"
    write_tracked(SAMPLE, path, "csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(TRACKED_FIELDS)


def test_jsonl_field_order_is_stable(tmp_path):
    path = tmp_path / "out.jsonl"
    write_tracked(SAMPLE, path, "jsonl")
    first = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert list(first) == list(TRACKED_FIELDS)


def test_raw_record_fields():
    satd = RawSatd(
        raw_id="f:sha:3",
        file_id="f",
        created_in_commit=C[0],
        created_in_hunk="h0",
        created_in_line=3,
        current_line=5,
        creation_text="# XXX",
    )
    record = raw_to_record(satd)
    assert list(record) == list(RAW_FIELDS)
    assert record["alive"] is True
    satd.deleted_in_commit = C[1]
    assert raw_to_record(satd)["alive"] is False


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_tracked(SAMPLE, tmp_path / "x.bin", "parquet")


def test_malformed_jsonl_reports_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"created_in_file": "only this"}\n', encoding="utf-8")
    with pytest.raises(SchemaViolation) as err:
        read_tracked_jsonl(path)
    assert ":1" in err.value.field


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("previous content", encoding="utf-8")
    with pytest.raises(RuntimeError):
        with atomic_write(target) as fh:
            fh.write("half a rec")
            raise RuntimeError("disk on fire")
    assert target.read_text(encoding="utf-8") == "previous content"
    assert list(tmp_path.iterdir()) == [target]


def test_write_jsonl_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    records = [tracked_to_record(s) for s in SAMPLE]
    write_jsonl(records, a)
    write_jsonl(records, b)
    assert a.read_bytes() == b.read_bytes()
