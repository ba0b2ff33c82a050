"""CLI behaviour end to end, through main() with real repositories."""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from satdtrack.cli import main
from satdtrack.export import read_tracked
from satdtrack.fixture import load_fixture
from satdtrack.ingest import ingest_repository


def run_cli(*args):
    return main([str(a) for a in args])


@pytest.fixture
def todo_repo(repo):
    repo.write("app.py", "import os\n# TODO cache results\nprint(1)\n")
    repo.commit("add app")
    repo.write("app.py", "import os\n# TODO cache results, but safely\nprint(1)\n")
    repo.commit("reword todo")
    repo.write("app.py", "import os\nprint(1)\n")
    repo.commit("resolve todo")
    return repo


def test_track_writes_jsonl_and_summary(todo_repo, tmp_path, capsys):
    out = tmp_path / "satd.jsonl"
    assert run_cli("track", todo_repo.path, "-o", out) == 0
    printed = capsys.readouterr().out
    assert "commits: 3" in printed
    assert "master-branch commits: 3" in printed
    assert "raw SATDs: 2" in printed
    assert "final SATDs: 1" in printed
    assert "updates: 1" in printed

    (record,) = read_tracked(out)
    assert record.creation_text == "# TODO cache results"
    assert record.update_texts == ["# TODO cache results, but safely"]
    assert record.updated_in_lines == [(2, 2)]
    assert record.deleted_in_commit is not None


def test_track_runs_are_byte_identical(todo_repo, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli("track", todo_repo.path, "-o", a) == 0
    assert run_cli("track", todo_repo.path, "-o", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_track_csv_equivalent(todo_repo, tmp_path):
    jl, cs = tmp_path / "a.jsonl", tmp_path / "a.csv"
    run_cli("track", todo_repo.path, "-o", jl)
    run_cli("track", todo_repo.path, "-o", cs, "--format", "csv")
    assert [vars(r) for r in read_tracked(cs)] == [vars(r) for r in read_tracked(jl)]


def test_track_empty_repo(repo, tmp_path, capsys):
    out = tmp_path / "satd.jsonl"
    assert run_cli("track", repo.path, "-o", out) == 0
    assert out.read_text(encoding="utf-8") == ""
    printed = capsys.readouterr().out
    assert "commits: 0" in printed
    assert "raw SATDs: 0" in printed
    assert "updates: 0" in printed


def test_track_non_repo_exits_1(tmp_path, capsys):
    assert run_cli("track", tmp_path, "-o", tmp_path / "x.jsonl") == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        run_cli("track")
    assert err.value.code == 2


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as err:
        run_cli("--help")
    assert err.value.code == 0
    text = capsys.readouterr().out
    for sub in ("track", "optimize", "eval", "export-fixture"):
        assert sub in text


def test_strict_description_weights(todo_repo, tmp_path):
    """Weights 1,0,0,0 with threshold 1.0 only match identical texts."""
    out = tmp_path / "strict.jsonl"
    run_cli(
        "track", todo_repo.path, "-o", out,
        "--weights", "1,0,0,0", "--threshold", "1.0",
    )
    records = read_tracked(out)
    # the reworded TODO no longer matches, so both raw SATDs stand alone
    assert len(records) == 2
    assert all(r.update_texts == [] for r in records)


def test_invalid_weights_exit_1(todo_repo, tmp_path, capsys):
    assert (
        run_cli(
            "track", todo_repo.path, "-o", tmp_path / "x.jsonl",
            "--weights", "1,1,1,1",
        )
        == 1
    )
    assert "sum to 1.0" in capsys.readouterr().err


def test_no_comment_filter_flag(repo, tmp_path):
    repo.write("notes.txt", "TODO without any comment marker\n")
    repo.commit("c0")
    out1 = tmp_path / "default.jsonl"
    out2 = tmp_path / "nofilter.jsonl"
    run_cli("track", repo.path, "-o", out1)
    run_cli("track", repo.path, "-o", out2, "--no-comment-filter")
    assert read_tracked(out1) == []
    assert len(read_tracked(out2)) == 1


def test_custom_tags_flag(repo, tmp_path):
    repo.write("a.c", "// WORKAROUND for bug 7\n// TODO also this\n")
    repo.commit("c0")
    out = tmp_path / "w.jsonl"
    run_cli("track", repo.path, "-o", out, "--tags", "workaround")
    (record,) = read_tracked(out)
    assert "WORKAROUND" in record.creation_text


def test_invalid_config_file_exits_1(todo_repo, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{broken", encoding="utf-8")
    assert (
        run_cli("track", todo_repo.path, "-o", tmp_path / "x.jsonl", "--config", cfg)
        == 1
    )
    assert "not valid JSON" in capsys.readouterr().err


def test_config_file(todo_repo, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"weights": [1, 0, 0, 0], "threshold": 1.0}), encoding="utf-8"
    )
    out = tmp_path / "via_config.jsonl"
    run_cli("track", todo_repo.path, "-o", out, "--config", cfg)
    assert len(read_tracked(out)) == 2


def test_emit_raw_and_candidates(todo_repo, tmp_path):
    out = tmp_path / "t.jsonl"
    raw = tmp_path / "raw.jsonl"
    cand = tmp_path / "cand.jsonl"
    run_cli(
        "track", todo_repo.path, "-o", out,
        "--emit-raw", raw, "--emit-candidates", cand,
    )
    raw_rows = [json.loads(l) for l in raw.read_text(encoding="utf-8").splitlines()]
    assert len(raw_rows) == 2
    assert {r["alive"] for r in raw_rows} == {False}
    cand_rows = [json.loads(l) for l in cand.read_text(encoding="utf-8").splitlines()]
    assert len(cand_rows) == 1
    assert cand_rows[0]["gold"] is None
    assert len(cand_rows[0]["candidates"]) == 1


def test_config_file_markers_and_tags(repo, tmp_path):
    repo.write("style.m", "% TODO matlab style\n// NOTE custom tag\n")
    repo.commit("c0")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"comment_markers": ["%", "//"], "tags": ["NOTE"]}),
        encoding="utf-8",
    )
    out = tmp_path / "out.jsonl"
    run_cli("track", repo.path, "-o", out, "--config", cfg)
    (record,) = read_tracked(out)
    assert record.creation_text == "// NOTE custom tag"


def _dangling_fixture(tmp_path):
    """A fixture whose second commit deletes a SATD line never created."""
    import hashlib

    c0 = hashlib.sha1(b"dang0").hexdigest()
    c1 = hashlib.sha1(b"dang1").hexdigest()
    doc = {
        "commits": [
            {"sha": c0, "parents": [], "timestamp": 1},
            {"sha": c1, "parents": [c0], "timestamp": 2},
        ],
        "files": [
            {
                "file_id": "f",
                "actions": [
                    {
                        "commit_sha": c0,
                        "mode": "A",
                        "old_file_id": None,
                        "hunks": [
                            {
                                "hunk_id": "h0",
                                "old_start": 1, "old_lines": 0,
                                "new_start": 1, "new_lines": 1,
                                "added": [[1, "plain line"]],
                                "deleted": [],
                            }
                        ],
                    },
                    {
                        "commit_sha": c1,
                        "mode": "M",
                        "old_file_id": None,
                        "hunks": [
                            {
                                "hunk_id": "h1",
                                "old_start": 1, "old_lines": 1,
                                "new_start": 1, "new_lines": 0,
                                "added": [],
                                "deleted": [[1, "# TODO never created"]],
                            }
                        ],
                    },
                ],
            }
        ],
    }
    path = tmp_path / "dangling.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_corrupt_fixture_exits_1_and_writes_nothing(tmp_path, capsys):
    fixture = _dangling_fixture(tmp_path)
    out = tmp_path / "out.jsonl"
    assert run_cli("track", fixture, "--fixture", "-o", out) == 1
    assert "matches no alive SATD" in capsys.readouterr().err
    assert not out.exists()


def test_lenient_mode_survives_corrupt_fixture(tmp_path):
    fixture = _dangling_fixture(tmp_path)
    out = tmp_path / "out.jsonl"
    assert run_cli("track", fixture, "--fixture", "-o", out, "--lenient") == 0
    assert read_tracked(out) == []


def test_jobs_flag_gives_identical_output(todo_repo, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_cli("track", todo_repo.path, "-o", a)
    run_cli("track", todo_repo.path, "-o", b, "--jobs", "4")
    assert a.read_bytes() == b.read_bytes()


def test_export_fixture_round_trip(todo_repo, tmp_path):
    fix = tmp_path / "repo.fixture.json"
    assert run_cli("export-fixture", todo_repo.path, "-o", fix) == 0
    data = load_fixture(fix)
    direct = ingest_repository(todo_repo.path)
    assert data.commits == direct.commits
    assert data.actions == direct.actions

    # tracking the fixture equals tracking the repository
    out_git = tmp_path / "git.jsonl"
    out_fix = tmp_path / "fix.jsonl"
    run_cli("track", todo_repo.path, "-o", out_git)
    run_cli("track", fix, "--fixture", "-o", out_fix)
    assert out_git.read_bytes() == out_fix.read_bytes()


def test_export_fixture_non_repo(tmp_path, capsys):
    assert run_cli("export-fixture", tmp_path, "-o", tmp_path / "x.json") == 1


def test_track_explicit_branch(repo, tmp_path):
    repo.write("a.py", "base\n")
    repo.commit("c0")
    repo.checkout("-b", "wip")
    repo.write("a.py", "base\n# TODO only on wip\n")
    repo.commit("wip work")
    repo.checkout("master")

    on_master = tmp_path / "master.jsonl"
    on_wip = tmp_path / "wip.jsonl"
    run_cli("track", repo.path, "-o", on_master)
    run_cli("track", repo.path, "-o", on_wip, "--branch", "wip")
    assert read_tracked(on_master) == []
    assert len(read_tracked(on_wip)) == 1


def test_track_rejects_invalid_fixture(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"commits": "nope"}', encoding="utf-8")
    assert run_cli("track", bad, "--fixture", "-o", tmp_path / "o.jsonl") == 1
    assert "commits" in capsys.readouterr().err


def test_entry_point_subprocess(todo_repo, tmp_path):
    """The installed module honors SATD_LOG and exits 0 on a real run."""
    out = tmp_path / "via_subprocess.jsonl"
    proc = subprocess.run(
        [sys.executable, "-m", "satdtrack.cli", "track", str(todo_repo.path), "-o", str(out)],
        capture_output=True,
        text=True,
        env={**os.environ, "SATD_LOG": "DEBUG"},
    )
    assert proc.returncode == 0, proc.stderr
    assert "raw SATDs: 2" in proc.stdout
    assert out.exists()


def test_optimize_command(tmp_path, capsys):
    labels = tmp_path / "labels.jsonl"
    rows = [
        {
            "group": {"commit": "c1", "file_id": "f"},
            "deleted": {
                "id": "d0", "description": "# TODO same words",
                "prev": "p", "next": "n", "hunk_id": "h",
            },
            "candidates": [
                {
                    "id": "c0", "description": "# TODO same words",
                    "prev": "p", "next": "n", "hunk_id": "h",
                }
            ],
            "gold": "c0",
        }
    ]
    labels.write_text(
        "\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8"
    )
    assert run_cli("optimize", "--labels", labels) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["accuracy"] == 1.0
    assert report["cases"] == 1


def test_optimize_malformed_labels(tmp_path, capsys):
    labels = tmp_path / "labels.jsonl"
    labels.write_text("ok\n", encoding="utf-8")
    assert run_cli("optimize", "--labels", labels) == 1
    assert "line 1" in capsys.readouterr().err


def test_eval_command(todo_repo, tmp_path, capsys):
    pred = tmp_path / "pred.jsonl"
    run_cli("track", todo_repo.path, "-o", pred)
    capsys.readouterr()
    assert run_cli("eval", "--pred", pred, "--gold", pred) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == {
        "precision": 1.0, "recall": 1.0, "f1": 1.0, "tp": 1, "fp": 0, "fn": 0
    }
