"""Portable JSON fixtures carrying the same structures as git ingestion.

Schema (field names are stable):

    {"commits": [{"sha": str, "parents": [str], "timestamp": int}, ...],
     "files": [{"file_id": str,
                "path_history": [[sha, path], ...],   # optional
                "actions": [{"commit_sha": str,
                             "mode": "A|D|M|C|R|U",
                             "old_file_id": str-or-null,
                             "hunks": [{"hunk_id": str,
                                        "old_start": int, "old_lines": int,
                                        "new_start": int, "new_lines": int,
                                        "added": [[line, text], ...],
                                        "deleted": [[line, text], ...]}]}]}]}

``path_history`` is an extension over the minimal schema so tracked
records can report real paths; when absent, the file_id doubles as the
path.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .errors import SchemaViolation
from .ingest import (
    ACTION_MODES,
    CommitRecord,
    FileAction,
    FileIdentity,
    Hunk,
    RepositoryData,
)

_SHA_RE = re.compile(r"^[0-9a-f]{40}$")


def _expect(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise SchemaViolation(field, message)


def _expect_type(value: Any, kind: type, field: str) -> Any:
    if kind is int and isinstance(value, bool):
        raise SchemaViolation(field, "expected int, got bool")
    _expect(isinstance(value, kind), field, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_sha(value: Any, field: str) -> str:
    _expect_type(value, str, field)
    _expect(bool(_SHA_RE.match(value)), field, "expected 40-char lowercase hex sha")
    return value


def _parse_hunk(obj: Any, field: str) -> Hunk:
    _expect_type(obj, dict, field)
    hunk_id = _expect_type(obj.get("hunk_id"), str, f"{field}.hunk_id")
    old_start = _expect_type(obj.get("old_start"), int, f"{field}.old_start")
    old_lines = _expect_type(obj.get("old_lines"), int, f"{field}.old_lines")
    new_start = _expect_type(obj.get("new_start"), int, f"{field}.new_start")
    new_lines = _expect_type(obj.get("new_lines"), int, f"{field}.new_lines")
    _expect(old_start >= 1, f"{field}.old_start", "must be >= 1")
    _expect(new_start >= 1, f"{field}.new_start", "must be >= 1")
    _expect(old_lines >= 0, f"{field}.old_lines", "must be >= 0")
    _expect(new_lines >= 0, f"{field}.new_lines", "must be >= 0")

    def parse_pairs(key: str, start: int, count: int) -> tuple[tuple[int, str], ...]:
        rows = _expect_type(obj.get(key, []), list, f"{field}.{key}")
        _expect(
            len(rows) == count,
            f"{field}.{key}",
            f"expected {count} entries to match the line count, got {len(rows)}",
        )
        pairs = []
        for i, row in enumerate(rows):
            loc = f"{field}.{key}[{i}]"
            _expect_type(row, list, loc)
            _expect(len(row) == 2, loc, "expected [line, text]")
            line = _expect_type(row[0], int, f"{loc}[0]")
            text = _expect_type(row[1], str, f"{loc}[1]")
            _expect(
                line == start + i,
                f"{loc}[0]",
                f"line numbers must be contiguous from {start}",
            )
            pairs.append((line, text))
        return tuple(pairs)

    added = parse_pairs("added", new_start, new_lines)
    deleted = parse_pairs("deleted", old_start, old_lines)
    return Hunk(
        hunk_id=hunk_id,
        old_start=old_start,
        old_lines=old_lines,
        new_start=new_start,
        new_lines=new_lines,
        added_lines=added,
        deleted_lines=deleted,
    )


def load_fixture(path: str | Path) -> RepositoryData:
    """Parse and validate a fixture file into in-memory structures."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("$", f"not valid JSON: {exc}") from exc
    return fixture_from_dict(doc)


def fixture_from_dict(doc: Any) -> RepositoryData:
    _expect_type(doc, dict, "$")
    commit_rows = _expect_type(doc.get("commits"), list, "commits")

    commits: list[CommitRecord] = []
    seq: dict[str, int] = {}
    for i, row in enumerate(commit_rows):
        field = f"commits[{i}]"
        _expect_type(row, dict, field)
        sha = _parse_sha(row.get("sha"), f"{field}.sha")
        _expect(sha not in seq, f"{field}.sha", "duplicate commit sha")
        parents_raw = _expect_type(row.get("parents", []), list, f"{field}.parents")
        parents = tuple(
            _parse_sha(p, f"{field}.parents[{j}]") for j, p in enumerate(parents_raw)
        )
        timestamp = _expect_type(row.get("timestamp"), int, f"{field}.timestamp")
        if i == 0:
            _expect(
                len(parents) == 0 or parents[0] not in seq,
                f"{field}.parents", "first commit cannot follow a walked commit",
            )
        else:
            _expect(
                len(parents) >= 1 and parents[0] == commits[-1].commit_sha,
                f"{field}.parents",
                "first parent must be the previous commit in the walk",
            )
        commits.append(
            CommitRecord(
                commit_sha=sha,
                parent_shas=parents,
                author_timestamp=timestamp,
                sequence_index=i,
            )
        )
        seq[sha] = i

    file_rows = _expect_type(doc.get("files"), list, "files")
    files: dict[str, FileIdentity] = {}
    actions: dict[str, list[FileAction]] = {}
    for i, row in enumerate(file_rows):
        field = f"files[{i}]"
        _expect_type(row, dict, field)
        file_id = _expect_type(row.get("file_id"), str, f"{field}.file_id")
        _expect(file_id not in files, f"{field}.file_id", "duplicate file_id")

        action_rows = _expect_type(row.get("actions"), list, f"{field}.actions")
        parsed_actions: list[FileAction] = []
        last_seq = -1
        for j, act in enumerate(action_rows):
            afield = f"{field}.actions[{j}]"
            _expect_type(act, dict, afield)
            commit_sha = _parse_sha(act.get("commit_sha"), f"{afield}.commit_sha")
            _expect(commit_sha in seq, f"{afield}.commit_sha", "unknown commit")
            _expect(
                seq[commit_sha] > last_seq,
                f"{afield}.commit_sha",
                "actions must be ordered by commit sequence",
            )
            last_seq = seq[commit_sha]
            mode = _expect_type(act.get("mode"), str, f"{afield}.mode")
            _expect(mode in ACTION_MODES, f"{afield}.mode", f"mode must be one of {ACTION_MODES}")
            old_file_id = act.get("old_file_id")
            if old_file_id is not None:
                _expect_type(old_file_id, str, f"{afield}.old_file_id")
            _expect(
                (old_file_id is not None) == (mode in ("C", "R")),
                f"{afield}.old_file_id",
                "present exactly when mode is C or R",
            )
            hunk_rows = _expect_type(act.get("hunks", []), list, f"{afield}.hunks")
            hunks = []
            prev_old_start = 0
            for k, hrow in enumerate(hunk_rows):
                hunk = _parse_hunk(hrow, f"{afield}.hunks[{k}]")
                _expect(
                    hunk.old_start >= prev_old_start,
                    f"{afield}.hunks[{k}].old_start",
                    "hunks must be sorted ascending by old_start",
                )
                prev_old_start = hunk.old_start
                hunks.append(hunk)
            parsed_actions.append(
                FileAction(
                    action_id=f"{commit_sha}:{file_id}",
                    commit_sha=commit_sha,
                    file_id=file_id,
                    mode=mode,
                    old_file_id=old_file_id,
                    hunks=tuple(hunks),
                )
            )

        history_rows = row.get("path_history")
        if history_rows is None:
            first_sha = (
                parsed_actions[0].commit_sha
                if parsed_actions
                else (commits[0].commit_sha if commits else "")
            )
            history = [(first_sha, file_id)]
        else:
            _expect_type(history_rows, list, f"{field}.path_history")
            history = []
            for k, entry in enumerate(history_rows):
                loc = f"{field}.path_history[{k}]"
                _expect_type(entry, list, loc)
                _expect(len(entry) == 2, loc, "expected [sha, path]")
                hsha = _parse_sha(entry[0], f"{loc}[0]")
                _expect(hsha in seq, f"{loc}[0]", "unknown commit")
                history.append((hsha, _expect_type(entry[1], str, f"{loc}[1]")))
            _expect(len(history) >= 1, f"{field}.path_history", "must not be empty")

        ident = FileIdentity(
            file_id=file_id,
            current_path=history[-1][1],
            path_history=history,
        )
        files[file_id] = ident
        actions[file_id] = parsed_actions

    for i, row in enumerate(file_rows):
        for j, act in enumerate(row.get("actions", [])):
            old_id = act.get("old_file_id") if isinstance(act, dict) else None
            if old_id is not None:
                _expect(
                    old_id in files,
                    f"files[{i}].actions[{j}].old_file_id",
                    "references an unknown file_id",
                )

    return RepositoryData(
        commits=commits,
        files=files,
        actions=actions,
        total_commit_count=len(commits),
    )


def fixture_to_dict(data: RepositoryData) -> dict:
    """Serialize ingestion output into the fixture schema."""
    commits = [
        {
            "sha": c.commit_sha,
            "parents": list(c.parent_shas),
            "timestamp": c.author_timestamp,
        }
        for c in data.commits
    ]
    files = []
    for file_id in sorted(data.actions):
        ident = data.files[file_id]
        files.append(
            {
                "file_id": file_id,
                "path_history": [[sha, path] for sha, path in ident.path_history],
                "actions": [
                    {
                        "commit_sha": a.commit_sha,
                        "mode": a.mode,
                        "old_file_id": a.old_file_id,
                        "hunks": [
                            {
                                "hunk_id": h.hunk_id,
                                "old_start": h.old_start,
                                "old_lines": h.old_lines,
                                "new_start": h.new_start,
                                "new_lines": h.new_lines,
                                "added": [[n, t] for n, t in h.added_lines],
                                "deleted": [[n, t] for n, t in h.deleted_lines],
                            }
                            for h in a.hunks
                        ],
                    }
                    for a in data.actions[file_id]
                ],
            }
        )
    return {"commits": commits, "files": files}


def save_fixture(data: RepositoryData, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fixture_to_dict(data), fh, indent=1)
        fh.write("\n")
