"""Read a git repository into an ordered, mainline-only commit/action/hunk stream.

The walk follows the first parent of every merge, so the sequence of
commits is linear and each commit's diff is computed against exactly one
parent.  Hunks are extracted with zero context lines, which makes every
hunk line either an addition or a deletion and keeps line arithmetic
exact.

Hunk coordinate convention: ``old_start``/``new_start`` are 1-based.  For a
zero-length side (pure insertion or pure deletion) the start is normalized
to the position *at* which the change applies, i.e. the first line that
follows the change, one more than the number git prints in the ``@@``
header.  Under this convention a hunk shifts any later line by
``new_lines - old_lines`` exactly when ``old_start + old_lines <= line``.
"""

from __future__ import annotations

import bisect
import logging
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BareOrCorrupt, DiffFailure, NotARepository, UnknownBranch

log = logging.getLogger(__name__)

EMPTY_TREE_SHA = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"

ACTION_MODES = ("A", "D", "M", "C", "R", "U")

# Below this content similarity a rename is treated as delete + add.
RENAME_SIMILARITY = 50

_HUNK_HEADER_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
_SHA_RE = re.compile(r"^[0-9a-f]{40}$")


@dataclass(frozen=True)
class CommitRecord:
    commit_sha: str
    parent_shas: tuple[str, ...]
    author_timestamp: int
    sequence_index: int


@dataclass
class FileIdentity:
    """One logical file; survives renames, so the id never changes."""

    file_id: str
    current_path: str
    path_history: list[tuple[str, str]] = field(default_factory=list)

    def record_path(self, commit_sha: str, path: str) -> None:
        self.path_history.append((commit_sha, path))
        self.current_path = path


@dataclass(frozen=True)
class Hunk:
    hunk_id: str
    old_start: int
    old_lines: int
    new_start: int
    new_lines: int
    added_lines: tuple[tuple[int, str], ...]
    deleted_lines: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class FileAction:
    action_id: str
    commit_sha: str
    file_id: str
    mode: str
    old_file_id: str | None
    hunks: tuple[Hunk, ...]


@dataclass
class RepositoryData:
    """Everything the tracker consumes, from either git or a JSON fixture."""

    commits: list[CommitRecord]
    files: dict[str, FileIdentity]
    actions: dict[str, list[FileAction]]
    total_commit_count: int

    def __post_init__(self) -> None:
        self._seq = {c.commit_sha: c.sequence_index for c in self.commits}
        self._path_steps: dict[str, tuple[list[int], list[str]]] = {}

    def sequence_of(self, commit_sha: str) -> int:
        return self._seq[commit_sha]

    def path_at(self, file_id: str, commit_sha: str) -> str:
        """Path the file bore at the given commit (renames respected)."""
        ident = self.files[file_id]
        steps = self._path_steps.get(file_id)
        if steps is None:
            seqs = [self._seq[sha] for sha, _ in ident.path_history]
            paths = [p for _, p in ident.path_history]
            steps = (seqs, paths)
            self._path_steps[file_id] = steps
        seqs, paths = steps
        idx = bisect.bisect_right(seqs, self._seq[commit_sha]) - 1
        if idx < 0:
            return paths[0] if paths else ident.current_path
        return paths[idx]


class RepositoryHandle:
    """Read-only access to one local git repository.

    All queries shell out to git; the handle carries no mutable state and
    may be shared across threads.
    """

    def __init__(self, path: Path):
        self.path = path

    def _git_bytes(self, *args: str) -> bytes:
        proc = subprocess.run(
            ["git", *args], cwd=self.path, capture_output=True
        )
        if proc.returncode != 0:
            raise DiffFailure(
                f"git {' '.join(args[:2])} failed in {self.path}: "
                f"{proc.stderr.decode('utf-8', 'replace').strip()}"
            )
        return proc.stdout

    def _git(self, *args: str) -> str:
        return self._git_bytes(*args).decode("utf-8", "replace")

    def resolve_commit(self, name: str) -> str | None:
        proc = subprocess.run(
            ["git", "rev-parse", "--verify", "--quiet", f"{name}^{{commit}}"],
            cwd=self.path,
            capture_output=True,
        )
        if proc.returncode != 0:
            return None
        return proc.stdout.decode("ascii").strip()

    def has_any_commit(self) -> bool:
        return self._git("rev-list", "--all", "--count").strip() != "0"

    def total_commit_count(self) -> int:
        return int(self._git("rev-list", "--all", "--count").strip())

    def list_tree(self, commit_sha: str) -> list[str]:
        out = self._git_bytes("ls-tree", "-r", "-z", "--name-only", commit_sha)
        return [
            p.decode("utf-8", "replace") for p in out.split(b"\0") if p
        ]

    def file_lines_at(self, commit_sha: str, path: str) -> list[str]:
        blob = self._git_bytes("show", f"{commit_sha}:{path}")
        return _split_lines(blob)

    def first_parent_log(self, tip_sha: str) -> list[CommitRecord]:
        out = self._git(
            "log", "--first-parent", "--reverse",
            "--format=%H%x1f%P%x1f%at", tip_sha,
        )
        records = []
        for index, row in enumerate(r for r in out.splitlines() if r):
            sha, parents, stamp = row.split("\x1f")
            records.append(
                CommitRecord(
                    commit_sha=sha,
                    parent_shas=tuple(parents.split()) if parents else (),
                    author_timestamp=int(stamp),
                    sequence_index=index,
                )
            )
        return records

    def diff_commit(self, parent_sha: str | None, commit_sha: str) -> list["DiffRecord"]:
        base = parent_sha if parent_sha is not None else EMPTY_TREE_SHA
        out = self._git_bytes(
            "diff-tree", "--no-commit-id", "-r", "-z", "--raw", "-p", "-U0",
            f"-M{RENAME_SIMILARITY}%", base, commit_sha,
        )
        try:
            return _parse_diff_output(out, commit_sha)
        except (ValueError, IndexError) as exc:
            raise DiffFailure(
                f"unparseable diff for {base}..{commit_sha}: {exc}"
            ) from exc


@dataclass
class DiffRecord:
    """One changed path in one commit, with its parsed hunks."""

    status: str                # A D M R C T U
    old_path: str | None
    new_path: str | None
    hunks: list[Hunk]
    is_binary: bool = False


def _split_lines(blob: bytes) -> list[str]:
    text = blob.decode("utf-8", "replace")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _clean_content(raw: str) -> str:
    return raw[:-1] if raw.endswith("\r") else raw


def _parse_diff_output(out: bytes, commit_sha: str) -> list[DiffRecord]:
    """Split combined ``--raw -z`` + patch output into per-file records.

    The raw section is a run of NUL-separated records, terminated by one
    extra NUL, followed by the patch text.  Patch blocks come in the same
    order as raw records, except that a typechange (T) emits two blocks
    (delete-all then add-all) which are merged into one replace hunk.
    """
    raws: list[tuple[str, str | None, str | None]] = []
    pos = 0
    while pos < len(out) and out[pos : pos + 1] == b":":
        meta_end = out.index(b"\0", pos)
        meta = out[pos:meta_end].decode("utf-8", "replace")
        status = meta.rsplit(" ", 1)[1]
        letter = status[0]
        path_end = out.index(b"\0", meta_end + 1)
        path1 = out[meta_end + 1 : path_end].decode("utf-8", "replace")
        pos = path_end + 1
        if letter in ("R", "C"):
            path2_end = out.index(b"\0", pos)
            path2 = out[pos:path2_end].decode("utf-8", "replace")
            pos = path2_end + 1
            raws.append((letter, path1, path2))
        elif letter == "A":
            raws.append((letter, None, path1))
        elif letter == "D":
            raws.append((letter, path1, None))
        else:
            raws.append((letter, path1, path1))
    if pos < len(out) and out[pos : pos + 1] == b"\0":
        pos += 1

    patch_text = out[pos:].decode("utf-8", "replace")
    blocks = _split_patch_blocks(patch_text)

    records: list[DiffRecord] = []
    block_idx = 0
    for rec_idx, (letter, old_path, new_path) in enumerate(raws):
        take = 2 if letter == "T" else 1
        own = blocks[block_idx : block_idx + take]
        block_idx += take
        hunk_prefix = f"{commit_sha}:{rec_idx}"
        if letter == "T":
            hunks, binary = _merge_typechange(own, hunk_prefix)
            letter = "M"
        else:
            hunks, binary = _block_hunks(own[0] if own else [], hunk_prefix)
        records.append(
            DiffRecord(
                status=letter,
                old_path=old_path,
                new_path=new_path,
                hunks=hunks,
                is_binary=binary,
            )
        )
    if block_idx != len(blocks):
        log.warning(
            "commit %s: %d unconsumed patch blocks", commit_sha,
            len(blocks) - block_idx,
        )
    return records


def _split_patch_blocks(patch_text: str) -> list[list[str]]:
    blocks: list[list[str]] = []
    current: list[str] | None = None
    for line in patch_text.split("\n"):
        if line.startswith("diff --git "):
            current = [line]
            blocks.append(current)
        elif current is not None:
            current.append(line)
    return blocks


def _block_hunks(block: list[str], hunk_prefix: str) -> tuple[list[Hunk], bool]:
    hunks: list[Hunk] = []
    if not block:
        return hunks, False
    is_binary = any(
        ln.startswith("Binary files ") or ln == "GIT binary patch"
        for ln in block
    )
    if is_binary:
        return hunks, True

    header: tuple[int, int, int, int] | None = None
    added: list[tuple[int, str]] = []
    deleted: list[tuple[int, str]] = []

    def close() -> None:
        nonlocal header, added, deleted
        if header is None:
            return
        old_start, old_lines, new_start, new_lines = header
        hunks.append(
            Hunk(
                hunk_id=f"{hunk_prefix}#{len(hunks)}",
                old_start=old_start,
                old_lines=old_lines,
                new_start=new_start,
                new_lines=new_lines,
                added_lines=tuple(added),
                deleted_lines=tuple(deleted),
            )
        )
        header, added, deleted = None, [], []

    for line in block:
        m = _HUNK_HEADER_RE.match(line)
        if m:
            close()
            old_start = int(m.group(1))
            old_lines = int(m.group(2)) if m.group(2) is not None else 1
            new_start = int(m.group(3))
            new_lines = int(m.group(4)) if m.group(4) is not None else 1
            if old_lines == 0:
                old_start += 1
            if new_lines == 0:
                new_start += 1
            header = (old_start, old_lines, new_start, new_lines)
        elif header is not None:
            if line.startswith("-"):
                deleted.append((header[0] + len(deleted), _clean_content(line[1:])))
            elif line.startswith("+"):
                added.append((header[2] + len(added), _clean_content(line[1:])))
            # "\ No newline at end of file" and stray metadata are skipped.
    close()
    return hunks, False


def _merge_typechange(
    blocks: list[list[str]], hunk_prefix: str
) -> tuple[list[Hunk], bool]:
    """Collapse a typechange's delete-all + add-all blocks into one hunk."""
    deleted: list[tuple[int, str]] = []
    added: list[tuple[int, str]] = []
    binary = False
    for block in blocks:
        hunks, blk_binary = _block_hunks(block, hunk_prefix)
        binary = binary or blk_binary
        for h in hunks:
            deleted.extend(h.deleted_lines)
            added.extend(h.added_lines)
    if not deleted and not added:
        return [], binary
    hunk = Hunk(
        hunk_id=f"{hunk_prefix}#0",
        old_start=1,
        old_lines=len(deleted),
        new_start=1,
        new_lines=len(added),
        added_lines=tuple(added),
        deleted_lines=tuple(deleted),
    )
    return [hunk], binary


def open_repository(path: str | Path) -> RepositoryHandle:
    """Validate that ``path`` holds a readable git object database."""
    path = Path(path)
    if not path.exists():
        raise NotARepository(f"{path} does not exist")
    proc = subprocess.run(
        ["git", "rev-parse", "--git-dir"], cwd=path, capture_output=True
    )
    if proc.returncode != 0:
        raise NotARepository(f"{path} contains no git repository")
    handle = RepositoryHandle(path)
    probe = subprocess.run(
        ["git", "rev-list", "--all", "--count"], cwd=path, capture_output=True
    )
    if probe.returncode != 0:
        raise BareOrCorrupt(
            f"object store in {path} is unreadable: "
            f"{probe.stderr.decode('utf-8', 'replace').strip()}"
        )
    return handle


def master_branch_walk(
    handle: RepositoryHandle, branch_name: str = "master"
) -> list[CommitRecord]:
    """Oldest-first first-parent commit sequence ending at ``branch_name``.

    An unborn branch in a repository with no commits at all yields an
    empty walk rather than an error.
    """
    tip = handle.resolve_commit(branch_name)
    if tip is None:
        if not handle.has_any_commit():
            return []
        raise UnknownBranch(f"branch {branch_name!r} does not resolve to a commit")
    return handle.first_parent_log(tip)


class _PathTable:
    """Live path -> FileIdentity map with per-commit staged updates."""

    def __init__(self) -> None:
        self.by_path: dict[str, FileIdentity] = {}
        self._counter = 0

    def fresh(self, commit_sha: str, path: str) -> FileIdentity:
        ident = FileIdentity(
            file_id=f"f{self._counter:05d}", current_path=path
        )
        self._counter += 1
        ident.record_path(commit_sha, path)
        return ident


def extract_file_actions(
    handle: RepositoryHandle, commits: list[CommitRecord]
) -> RepositoryData:
    """Fold each commit's first-parent diff into per-file action streams.

    Renames keep the same identity (the old path's stream continues under
    the new path); copies start a fresh identity whose origin is recorded
    in ``old_file_id``.
    """
    table = _PathTable()
    files: dict[str, FileIdentity] = {}
    actions: dict[str, list[FileAction]] = {}

    for commit in commits:
        parent = commit.parent_shas[0] if commit.parent_shas else None
        records = handle.diff_commit(parent, commit.commit_sha)

        # Resolve every source against the pre-commit table first, then
        # apply unbinds and binds, so rename swaps inside one commit work.
        staged: list[tuple[DiffRecord, FileIdentity, str | None]] = []
        unbind: list[str] = []
        bind: list[tuple[str, FileIdentity]] = []
        for rec in records:
            mode = rec.status
            if mode == "A":
                ident = table.fresh(commit.commit_sha, rec.new_path or "")
                bind.append((rec.new_path or "", ident))
                staged.append((rec, ident, None))
            elif mode in ("M", "U"):
                ident = table.by_path.get(rec.new_path or "")
                if ident is None:
                    ident = table.fresh(commit.commit_sha, rec.new_path or "")
                    bind.append((rec.new_path or "", ident))
                staged.append((rec, ident, None))
            elif mode == "D":
                ident = table.by_path.get(rec.old_path or "")
                if ident is None:
                    log.warning(
                        "commit %s deletes untracked path %s",
                        commit.commit_sha, rec.old_path,
                    )
                    continue
                unbind.append(rec.old_path or "")
                staged.append((rec, ident, None))
            elif mode == "R":
                ident = table.by_path.get(rec.old_path or "")
                if ident is None:
                    ident = table.fresh(commit.commit_sha, rec.old_path or "")
                ident.record_path(commit.commit_sha, rec.new_path or "")
                unbind.append(rec.old_path or "")
                bind.append((rec.new_path or "", ident))
                # The identity survives a rename, so the source is itself.
                staged.append((rec, ident, ident.file_id))
            elif mode == "C":
                src = table.by_path.get(rec.old_path or "")
                ident = table.fresh(commit.commit_sha, rec.new_path or "")
                bind.append((rec.new_path or "", ident))
                if src is None:
                    # A copy from an untracked source is just an add here.
                    rec.status = "A"
                    staged.append((rec, ident, None))
                else:
                    staged.append((rec, ident, src.file_id))
            else:
                log.warning(
                    "commit %s: unexpected diff status %r on %s, treating as M",
                    commit.commit_sha, mode, rec.new_path,
                )
                ident = table.by_path.get(rec.new_path or "")
                if ident is None:
                    ident = table.fresh(commit.commit_sha, rec.new_path or "")
                    bind.append((rec.new_path or "", ident))
                rec.status = "M"
                staged.append((rec, ident, None))

        for path in unbind:
            table.by_path.pop(path, None)
        for path, ident in bind:
            table.by_path[path] = ident

        for rec, ident, old_file_id in staged:
            files.setdefault(ident.file_id, ident)
            seq = actions.setdefault(ident.file_id, [])
            seq.append(
                FileAction(
                    action_id=f"{commit.commit_sha}:{ident.file_id}",
                    commit_sha=commit.commit_sha,
                    file_id=ident.file_id,
                    mode=rec.status,
                    old_file_id=old_file_id,
                    hunks=tuple(rec.hunks),
                )
            )

    return RepositoryData(
        commits=commits,
        files=files,
        actions=actions,
        total_commit_count=handle.total_commit_count(),
    )


def resolve_default_branch(handle: RepositoryHandle) -> str:
    """The conventional mainline name: master, falling back to main."""
    if handle.resolve_commit("master") is not None:
        return "master"
    if handle.resolve_commit("main") is not None:
        return "main"
    return "master"


def ingest_repository(path: str | Path, branch: str | None = None) -> RepositoryData:
    """One-call git ingestion: open, walk, extract."""
    handle = open_repository(path)
    branch_name = branch if branch is not None else resolve_default_branch(handle)
    commits = master_branch_walk(handle, branch_name)
    return extract_file_actions(handle, commits)
