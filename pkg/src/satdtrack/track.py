"""Scan each file's ordered hunks: create SATDs, shift their lines, record deaths.

Every file action is processed in a fixed phase order, all hunks sharing
the pre-image coordinate frame of that commit:

  1. deletions:  a tag-carrying deleted line kills the alive SATD whose
                  current_line equals its old-file line number;
  1b. erasures:  an alive SATD whose line falls inside a deleted span
                  without a tag on the deleted line was edited into a
                  non-SATD line, which is a removal as well;
  2. creations:  every tag-carrying added line starts a new SATD at its
                  new-file line number;
  3. shift:      each surviving SATD from earlier commits moves by the
                  net growth of all hunks that end at or before its line:
                  current_line += sum(new_lines - old_lines) over hunks
                  with old_start + old_lines <= current_line.

The tracker also replays hunks into a full text snapshot per file, which
supplies the previous/next line context the matcher needs and backs the
test oracle that cross-checks hunk arithmetic against text positions.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .detect import SatdHit
from .errors import DanglingDeletion
from .ingest import FileAction, Hunk, RepositoryData
from .match import MatchFeatures

log = logging.getLogger(__name__)

DetectFn = Callable[[str], "SatdHit | None"]


@dataclass
class RawSatd:
    """A step-2 SATD: creation facts, a maintained line, optional death."""

    raw_id: str
    file_id: str
    created_in_commit: str
    created_in_hunk: str
    created_in_line: int
    current_line: int
    creation_text: str
    deleted_in_commit: str | None = None
    deleted_in_hunk: str | None = None

    @property
    def alive(self) -> bool:
        return self.deleted_in_commit is None


@dataclass
class TrackResult:
    """Raw SATDs plus the line context captured at creation/deletion time."""

    satds: list[RawSatd]
    creation_features: dict[str, MatchFeatures]
    deletion_features: dict[str, MatchFeatures]


def _apply_hunks(snapshot: list[str] | None, hunks: Sequence[Hunk]) -> list[str] | None:
    """Replay one action's hunks over the file's reconstructed text."""
    if snapshot is None:
        return None
    lines = snapshot
    offset = 0
    for hunk in hunks:
        pos = hunk.old_start - 1 + offset
        if pos < 0 or pos > len(lines) or pos + hunk.old_lines > len(lines):
            log.warning("hunk %s does not fit its snapshot; dropping text view", hunk.hunk_id)
            return None
        lines[pos : pos + hunk.old_lines] = [t for _, t in hunk.added_lines]
        offset += hunk.new_lines - hunk.old_lines
    return lines


def _neighbor(lines: list[str] | None, line_no: int) -> str:
    if lines is None or line_no < 1 or line_no > len(lines):
        return ""
    return lines[line_no - 1]


def _hunk_local_neighbor(pairs: Sequence[tuple[int, str]], line_no: int) -> str:
    for n, text in pairs:
        if n == line_no:
            return text
    return ""


class FileTracker:
    """Stateful per-file scan; feed actions in commit order."""

    def __init__(self, file_id: str, detect: DetectFn, strict: bool = True):
        self.file_id = file_id
        self.detect = detect
        self.strict = strict
        self.satds: list[RawSatd] = []
        self.creation_features: dict[str, MatchFeatures] = {}
        self.deletion_features: dict[str, MatchFeatures] = {}
        self.snapshot: list[str] | None = None
        self._alive_by_line: dict[int, RawSatd] = {}

    def apply_action(self, action: FileAction) -> None:
        if action.mode == "U":
            log.warning(
                "file %s: skipping unmerged action at %s",
                self.file_id, action.commit_sha,
            )
            return
        if action.mode == "A":
            # A re-added path starts from nothing; an add without hunks is
            # binary or empty, leaving no reconstructable text.
            self._alive_by_line.clear()
            self.snapshot = [] if action.hunks else None
        if action.mode == "C":
            # A copy's unchanged region is invisible to its hunks, so no
            # text view exists and only hunk-added SATDs can be tracked.
            self._alive_by_line.clear()
            self.snapshot = None

        pre_image = self.snapshot

        if action.mode != "C":
            self._match_deletions(action, pre_image)
            self._kill_erased(action, pre_image)

        post_image = _apply_hunks(
            list(pre_image) if pre_image is not None else None, action.hunks
        )
        self.snapshot = post_image

        created_now = self._create_from_added(action, post_image)

        self._shift_alive(action, created_now)

        if action.mode == "D":
            for satd in list(self._alive_by_line.values()):
                prev = _neighbor(pre_image, satd.current_line - 1)
                nxt = _neighbor(pre_image, satd.current_line + 1)
                self._record_death(
                    satd, action.commit_sha, None, satd.creation_text, prev, nxt
                )
            self._alive_by_line.clear()
            self.snapshot = None

    # -- phases ----------------------------------------------------------

    def _match_deletions(self, action: FileAction, pre_image: list[str] | None) -> None:
        for hunk in action.hunks:
            for line_no, text in hunk.deleted_lines:
                if self.detect(text) is None:
                    continue
                satd = self._alive_by_line.get(line_no)
                if satd is None:
                    message = (
                        f"file {self.file_id} commit {action.commit_sha}: deleted "
                        f"SATD line {line_no} matches no alive SATD"
                    )
                    if self.strict:
                        raise DanglingDeletion(message)
                    log.warning("%s (ignored)", message)
                    continue
                prev, nxt = self._pre_neighbors(pre_image, hunk, line_no)
                self._record_death(
                    satd, action.commit_sha, hunk.hunk_id, text.strip(), prev, nxt
                )

    def _kill_erased(self, action: FileAction, pre_image: list[str] | None) -> None:
        # A deleted span covering a SATD line whose deleted text carries no
        # tag means the line was rewritten into a non-SATD line.
        for hunk in action.hunks:
            if hunk.old_lines == 0:
                continue
            span_end = hunk.old_start + hunk.old_lines
            for line_no in range(hunk.old_start, span_end):
                satd = self._alive_by_line.get(line_no)
                if satd is None:
                    continue
                deleted_text = _hunk_local_neighbor(hunk.deleted_lines, line_no)
                prev, nxt = self._pre_neighbors(pre_image, hunk, line_no)
                self._record_death(
                    satd,
                    action.commit_sha,
                    hunk.hunk_id,
                    (deleted_text or satd.creation_text).strip(),
                    prev,
                    nxt,
                )

    def _create_from_added(
        self, action: FileAction, post_image: list[str] | None
    ) -> list[RawSatd]:
        created: list[RawSatd] = []
        for hunk in action.hunks:
            for line_no, text in hunk.added_lines:
                hit = self.detect(text)
                if hit is None:
                    continue
                satd = RawSatd(
                    raw_id=f"{self.file_id}:{action.commit_sha}:{line_no}",
                    file_id=self.file_id,
                    created_in_commit=action.commit_sha,
                    created_in_hunk=hunk.hunk_id,
                    created_in_line=line_no,
                    current_line=line_no,
                    creation_text=hit.normalized_text,
                )
                if post_image is not None:
                    prev = _neighbor(post_image, line_no - 1)
                    nxt = _neighbor(post_image, line_no + 1)
                else:
                    prev = _hunk_local_neighbor(hunk.added_lines, line_no - 1)
                    nxt = _hunk_local_neighbor(hunk.added_lines, line_no + 1)
                self.creation_features[satd.raw_id] = MatchFeatures(
                    description=hit.normalized_text,
                    previous_line=prev,
                    next_line=nxt,
                    hunk_id=hunk.hunk_id,
                )
                self.satds.append(satd)
                created.append(satd)
        return created

    def _shift_alive(self, action: FileAction, created_now: list[RawSatd]) -> None:
        shifted: dict[int, RawSatd] = {}
        for satd in self._alive_by_line.values():
            delta = sum(
                h.new_lines - h.old_lines
                for h in action.hunks
                if h.old_start + h.old_lines <= satd.current_line
            )
            satd.current_line += delta
            if satd.current_line in shifted:
                log.warning(
                    "file %s commit %s: two SATDs landed on line %d",
                    self.file_id, action.commit_sha, satd.current_line,
                )
            shifted[satd.current_line] = satd
        for satd in created_now:
            if satd.current_line in shifted:
                log.warning(
                    "file %s commit %s: created SATD collides with shifted line %d",
                    self.file_id, action.commit_sha, satd.current_line,
                )
            shifted[satd.current_line] = satd
        self._alive_by_line = shifted

    # -- helpers ----------------------------------------------------------

    def _pre_neighbors(
        self, pre_image: list[str] | None, hunk: Hunk, line_no: int
    ) -> tuple[str, str]:
        if pre_image is not None:
            return _neighbor(pre_image, line_no - 1), _neighbor(pre_image, line_no + 1)
        return (
            _hunk_local_neighbor(hunk.deleted_lines, line_no - 1),
            _hunk_local_neighbor(hunk.deleted_lines, line_no + 1),
        )

    def _record_death(
        self,
        satd: RawSatd,
        commit_sha: str,
        hunk_id: str | None,
        description: str,
        prev: str,
        nxt: str,
    ) -> None:
        satd.deleted_in_commit = commit_sha
        satd.deleted_in_hunk = hunk_id
        self.deletion_features[satd.raw_id] = MatchFeatures(
            description=description,
            previous_line=prev,
            next_line=nxt,
            hunk_id=hunk_id or "",
        )
        del self._alive_by_line[satd.current_line]


def track_file(
    actions: Sequence[FileAction], detect: DetectFn, strict: bool = True
) -> list[RawSatd]:
    """Run the scan over one file's ordered actions."""
    if not actions:
        return []
    return _track_one(actions, detect, strict).satds


def _track_one(
    actions: Sequence[FileAction], detect: DetectFn, strict: bool
) -> FileTracker:
    tracker = FileTracker(actions[0].file_id, detect, strict=strict)
    for action in actions:
        tracker.apply_action(action)
    return tracker


def track_repository(
    data: RepositoryData,
    detect: DetectFn,
    strict: bool = True,
    jobs: int = 1,
) -> TrackResult:
    """Track every file; output order is (file_id, commit sequence, line)."""
    file_ids = sorted(fid for fid in data.actions if data.actions[fid])

    def run(file_id: str) -> tuple[str, FileTracker]:
        try:
            return file_id, _track_one(data.actions[file_id], detect, strict)
        except DanglingDeletion as exc:
            raise DanglingDeletion(f"{exc} (while tracking {file_id})") from exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trackers = dict(pool.map(run, file_ids))
    else:
        trackers = dict(run(fid) for fid in file_ids)

    satds: list[RawSatd] = []
    creation_features: dict[str, MatchFeatures] = {}
    deletion_features: dict[str, MatchFeatures] = {}
    for file_id in file_ids:
        tracker = trackers[file_id]
        ordered = sorted(
            tracker.satds,
            key=lambda s: (data.sequence_of(s.created_in_commit), s.created_in_line),
        )
        satds.extend(ordered)
        creation_features.update(tracker.creation_features)
        deletion_features.update(tracker.deletion_features)
    return TrackResult(
        satds=satds,
        creation_features=creation_features,
        deletion_features=deletion_features,
    )
