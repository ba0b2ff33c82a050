"""Shared fixtures: throwaway git repositories and acceptance reporting."""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

import pytest


class RepoBuilder:
    """Build a small git repository with deterministic commits."""

    def __init__(self, path: Path):
        self.path = path
        self._clock = 1_600_000_000
        self.git("init", "-q", "-b", "master")
        self.git("config", "user.email", "dev@example.com")
        self.git("config", "user.name", "dev")
        self.git("config", "commit.gpgsign", "false")

    def git(self, *args: str, stamped: bool = False) -> str:
        env = dict(os.environ)
        if stamped:
            self._clock += 60
            stamp = f"{self._clock} +0000"
            env["GIT_AUTHOR_DATE"] = stamp
            env["GIT_COMMITTER_DATE"] = stamp
        proc = subprocess.run(
            ["git", *args], cwd=self.path, capture_output=True, text=True, env=env
        )
        if proc.returncode != 0:
            raise RuntimeError(f"git {' '.join(args)} failed: {proc.stderr}")
        return proc.stdout

    def write(self, relpath: str, text: str) -> None:
        target = self.path / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")

    def write_bytes(self, relpath: str, blob: bytes) -> None:
        (self.path / relpath).write_bytes(blob)

    def remove(self, relpath: str) -> None:
        (self.path / relpath).unlink()

    def move(self, old: str, new: str) -> None:
        self.git("mv", old, new)

    def commit(self, message: str) -> str:
        self.git("add", "-A")
        self.git("commit", "-q", "--allow-empty", "-m", message, stamped=True)
        return self.head()

    def head(self) -> str:
        return self.git("rev-parse", "HEAD").strip()

    def checkout(self, *args: str) -> None:
        self.git("checkout", "-q", *args)

    def merge(self, branch: str, message: str = "merge") -> str:
        self.git("merge", "-q", "--no-ff", "-m", message, branch, stamped=True)
        return self.head()


@pytest.fixture
def repo(tmp_path: Path) -> RepoBuilder:
    repo_dir = tmp_path / "repo"
    repo_dir.mkdir()
    return RepoBuilder(repo_dir)


@pytest.fixture
def make_repo(tmp_path: Path):
    counter = [0]

    def build() -> RepoBuilder:
        counter[0] += 1
        repo_dir = tmp_path / f"repo{counter[0]}"
        repo_dir.mkdir()
        return RepoBuilder(repo_dir)

    return build


# -- acceptance summary ------------------------------------------------------

_acceptance_results: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    criterion = marker.kwargs.get("criterion", 0)
    title = marker.kwargs.get("title", item.name)
    status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    _acceptance_results[criterion] = (status, title)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_acceptance_results):
        status, title = _acceptance_results[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {status} - {title}")
