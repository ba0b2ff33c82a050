"""JSONL and CSV serialization of tracked and raw SATD records.

Both formats carry the same columns; CSV cells holding lists are
JSON-encoded strings so every row round-trips losslessly to the JSONL
record.  Writes go through a temp file and an atomic rename, so readers
never observe a partially written output.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import SchemaViolation
from .match import TrackedSatd
from .track import RawSatd

TRACKED_FIELDS = (
    "created_in_file",
    "last_appeared_in_file",
    "created_in_line",
    "last_appeared_in_line",
    "created_in_commit",
    "deleted_in_commit",
    "creation_text",
    "update_texts",
    "updated_in_lines",
    "updated_in_commits",
)

RAW_FIELDS = (
    "raw_id",
    "file_id",
    "created_in_commit",
    "created_in_hunk",
    "created_in_line",
    "current_line",
    "creation_text",
    "deleted_in_commit",
    "deleted_in_hunk",
    "alive",
)


def tracked_to_record(satd: TrackedSatd) -> dict:
    return {
        "created_in_file": satd.created_in_file,
        "last_appeared_in_file": satd.last_appeared_in_file,
        "created_in_line": satd.created_in_line,
        "last_appeared_in_line": satd.last_appeared_in_line,
        "created_in_commit": satd.created_in_commit,
        "deleted_in_commit": satd.deleted_in_commit,
        "creation_text": satd.creation_text,
        "update_texts": list(satd.update_texts),
        "updated_in_lines": [[old, new] for old, new in satd.updated_in_lines],
        "updated_in_commits": list(satd.updated_in_commits),
    }


def record_to_tracked(record: dict, where: str = "record") -> TrackedSatd:
    try:
        return TrackedSatd(
            created_in_file=record["created_in_file"],
            last_appeared_in_file=record["last_appeared_in_file"],
            created_in_line=int(record["created_in_line"]),
            last_appeared_in_line=int(record["last_appeared_in_line"]),
            created_in_commit=record["created_in_commit"],
            deleted_in_commit=record["deleted_in_commit"],
            creation_text=record["creation_text"],
            update_texts=list(record["update_texts"]),
            updated_in_lines=[
                (int(old), int(new)) for old, new in record["updated_in_lines"]
            ],
            updated_in_commits=list(record["updated_in_commits"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(where, str(exc)) from exc


def raw_to_record(satd: RawSatd) -> dict:
    return {
        "raw_id": satd.raw_id,
        "file_id": satd.file_id,
        "created_in_commit": satd.created_in_commit,
        "created_in_hunk": satd.created_in_hunk,
        "created_in_line": satd.created_in_line,
        "current_line": satd.current_line,
        "creation_text": satd.creation_text,
        "deleted_in_commit": satd.deleted_in_commit,
        "deleted_in_hunk": satd.deleted_in_hunk,
        "alive": satd.alive,
    }


@contextmanager
def atomic_write(path: str | Path) -> Iterator[IO[str]]:
    """Write to a sibling temp file; rename over the target on success."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp"
    )
    fh = os.fdopen(fd, "w", encoding="utf-8", newline="")
    try:
        yield fh
        fh.close()
        os.replace(tmp_name, path)
    except BaseException:
        fh.close()
        os.unlink(tmp_name)
        raise


def write_jsonl(records: Iterable[dict], path: str | Path) -> None:
    with atomic_write(path) as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def write_tracked_csv(records: Iterable[dict], path: str | Path) -> None:
    with atomic_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACKED_FIELDS)
        for record in records:
            writer.writerow(
                [
                    json.dumps(record[name])
                    if isinstance(record[name], list)
                    else ("" if record[name] is None else record[name])
                    for name in TRACKED_FIELDS
                ]
            )


def write_tracked(satds: Iterable[TrackedSatd], path: str | Path, fmt: str) -> None:
    records = [tracked_to_record(s) for s in satds]
    if fmt == "csv":
        write_tracked_csv(records, path)
    elif fmt == "jsonl":
        write_jsonl(records, path)
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def read_tracked_jsonl(path: str | Path) -> list[TrackedSatd]:
    satds = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(where, f"not valid JSON: {exc}") from exc
            satds.append(record_to_tracked(record, where))
    return satds


def read_tracked_csv(path: str | Path) -> list[TrackedSatd]:
    satds = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            where = f"{path}:{lineno}"
            try:
                record: dict = {
                    "created_in_file": row["created_in_file"],
                    "last_appeared_in_file": row["last_appeared_in_file"],
                    "created_in_line": int(row["created_in_line"]),
                    "last_appeared_in_line": int(row["last_appeared_in_line"]),
                    "created_in_commit": row["created_in_commit"],
                    "deleted_in_commit": row["deleted_in_commit"] or None,
                    "creation_text": row["creation_text"],
                    "update_texts": json.loads(row["update_texts"]),
                    "updated_in_lines": json.loads(row["updated_in_lines"]),
                    "updated_in_commits": json.loads(row["updated_in_commits"]),
                }
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaViolation(where, str(exc)) from exc
            satds.append(record_to_tracked(record, where))
    return satds


def read_tracked(path: str | Path) -> list[TrackedSatd]:
    """Load records from JSONL or CSV, chosen by file extension."""
    if str(path).endswith(".csv"):
        return read_tracked_csv(path)
    return read_tracked_jsonl(path)
