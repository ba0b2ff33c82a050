"""Turn false-positive delete/create pairs of raw SATDs into update actions.

Within one (commit, file) group, every deleted SATD is compared against
every created SATD on four features: description text, previous line,
next line (token-set Jaccard each) and hunk identity (equality).  A
greedy pass over the weighted score matrix picks mutually exclusive
pairs until the best remaining score falls below the threshold; matched
pairs are then merged into chains, each chain becoming one tracked SATD
whose intermediate links are update actions.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .errors import CyclicChain

if TYPE_CHECKING:
    from .ingest import RepositoryData
    from .track import RawSatd, TrackResult

# Scores are sums of float products of rational factors; exact-threshold
# acceptance must not depend on the last ulp.
SCORE_EPS = 1e-9

_TOKEN_SPLIT_RE = re.compile(r"[\W_]+", re.UNICODE)


@dataclass(frozen=True)
class MatchFeatures:
    """Context of one SATD line at its creation or deletion.

    For a deleted SATD the fields come from the pre-image of the commit,
    for a created SATD from the post-image.
    """

    description: str
    previous_line: str
    next_line: str
    hunk_id: str


@dataclass(frozen=True)
class MatchConfig:
    description_weight: float = 0.6
    prev_line_weight: float = 0.2
    next_line_weight: float = 0.0
    hunk_weight: float = 0.2
    threshold: float = 0.4

    def __post_init__(self) -> None:
        total = (
            self.description_weight
            + self.prev_line_weight
            + self.next_line_weight
            + self.hunk_weight
        )
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"feature weights must sum to 1.0, got {total}")
        for name in (
            "description_weight",
            "prev_line_weight",
            "next_line_weight",
            "hunk_weight",
            "threshold",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


DEFAULT_MATCH_CONFIG = MatchConfig()


def tokenize(text: str) -> frozenset[str]:
    """Lowercased word tokens; punctuation, whitespace and '_' separate."""
    return frozenset(t for t in _TOKEN_SPLIT_RE.split(text.lower()) if t)


def jaccard(a: str, b: str) -> float:
    """Token-set Jaccard similarity; two token-free strings count as equal."""
    ta, tb = tokenize(a), tokenize(b)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def score_pair(deleted: MatchFeatures, created: MatchFeatures, cfg: MatchConfig) -> float:
    """Weighted sum of the three Jaccard features and the hunk indicator."""
    return (
        cfg.description_weight * jaccard(deleted.description, created.description)
        + cfg.prev_line_weight * jaccard(deleted.previous_line, created.previous_line)
        + cfg.next_line_weight * jaccard(deleted.next_line, created.next_line)
        + cfg.hunk_weight * (1.0 if deleted.hunk_id == created.hunk_id else 0.0)
    )


@dataclass
class ScoreMatrix:
    row_ids: list[str]          # deleted SATD ids
    col_ids: list[str]          # created SATD ids
    cells: list[list[float]]


def build_score_matrix(
    deleted: Sequence[tuple[str, MatchFeatures]],
    created: Sequence[tuple[str, MatchFeatures]],
    cfg: MatchConfig,
) -> ScoreMatrix:
    return ScoreMatrix(
        row_ids=[rid for rid, _ in deleted],
        col_ids=[cid for cid, _ in created],
        cells=[
            [score_pair(df, cf, cfg) for _, cf in created] for _, df in deleted
        ],
    )


def greedy_pairs_from_matrix(
    cells: Sequence[Sequence[float]], threshold: float
) -> list[tuple[int, int]]:
    """Greedy selection loop over a prebuilt score matrix.

    Repeatedly takes the largest remaining cell (ties: lowest row, then
    lowest column), stops once it drops below the threshold, and retires
    the chosen row and column so each side is matched at most once.
    """
    n_rows = len(cells)
    n_cols = len(cells[0]) if n_rows else 0
    open_rows = [True] * n_rows
    open_cols = [True] * n_cols
    pairs: list[tuple[int, int]] = []
    for _ in range(min(n_rows, n_cols)):
        best = None
        best_score = float("-inf")
        for i in range(n_rows):
            if not open_rows[i]:
                continue
            row = cells[i]
            for j in range(n_cols):
                if open_cols[j] and row[j] > best_score:
                    best_score = row[j]
                    best = (i, j)
        if best is None or best_score < threshold - SCORE_EPS:
            break
        pairs.append(best)
        open_rows[best[0]] = False
        open_cols[best[1]] = False
    return pairs


def greedy_match(
    deleted: Sequence[tuple[str, MatchFeatures]],
    created: Sequence[tuple[str, MatchFeatures]],
    cfg: MatchConfig,
) -> list[tuple[str, str]]:
    """Pair deleted with created SATDs of one (commit, file) group."""
    if not deleted or not created:
        return []
    matrix = build_score_matrix(deleted, created, cfg)
    return [
        (matrix.row_ids[i], matrix.col_ids[j])
        for i, j in greedy_pairs_from_matrix(matrix.cells, cfg.threshold)
    ]


@dataclass
class TrackedSatd:
    """A fully merged SATD with its creation, updates and optional deletion."""

    created_in_file: str
    last_appeared_in_file: str
    created_in_line: int
    last_appeared_in_line: int
    created_in_commit: str
    deleted_in_commit: str | None
    creation_text: str
    update_texts: list[str] = field(default_factory=list)
    updated_in_lines: list[tuple[int, int]] = field(default_factory=list)
    updated_in_commits: list[str] = field(default_factory=list)


def merge_chains(
    raws: Sequence["RawSatd"],
    pairs: Iterable[tuple[str, str]],
    path_at: Callable[[str, str], str],
    current_path: Callable[[str], str],
) -> list[TrackedSatd]:
    """Union follower links into chains and emit one record per chain.

    Creation fields come from the chain head, deletion fields from the
    tail; every link contributes one update entry recording the head
    side's final line, the tail side's creation line, the new text and
    the commit where the rewrite happened.
    """
    by_id = {r.raw_id: r for r in raws}
    follower: dict[str, str] = {}
    followed: set[str] = set()
    for deleted_id, created_id in pairs:
        if deleted_id in follower:
            raise CyclicChain(f"{deleted_id} has two followers")
        if created_id in followed:
            raise CyclicChain(f"{created_id} follows two SATDs")
        follower[deleted_id] = created_id
        followed.add(created_id)

    tracked: list[TrackedSatd] = []
    for raw in raws:
        if raw.raw_id in followed:
            continue
        chain = [raw]
        seen = {raw.raw_id}
        while chain[-1].raw_id in follower:
            nxt = by_id[follower[chain[-1].raw_id]]
            if nxt.raw_id in seen:
                raise CyclicChain(f"chain revisits {nxt.raw_id}")
            seen.add(nxt.raw_id)
            chain.append(nxt)
        head, tail = chain[0], chain[-1]
        record = TrackedSatd(
            created_in_file=path_at(head.file_id, head.created_in_commit),
            last_appeared_in_file=(
                path_at(tail.file_id, tail.deleted_in_commit)
                if tail.deleted_in_commit is not None
                else current_path(tail.file_id)
            ),
            created_in_line=head.created_in_line,
            last_appeared_in_line=tail.current_line,
            created_in_commit=head.created_in_commit,
            deleted_in_commit=tail.deleted_in_commit,
            creation_text=head.creation_text,
        )
        for prev_link, next_link in zip(chain, chain[1:]):
            record.update_texts.append(next_link.creation_text)
            record.updated_in_lines.append(
                (prev_link.current_line, next_link.created_in_line)
            )
            record.updated_in_commits.append(next_link.created_in_commit)
        tracked.append(record)
    return tracked


@dataclass
class Step3Result:
    tracked: list[TrackedSatd]
    pairs: list[tuple[str, str]]


def run_step3(
    result: "TrackResult", data: "RepositoryData", cfg: MatchConfig, jobs: int = 1
) -> Step3Result:
    """Group, match and merge the tracker's raw SATDs into final records.

    Groups are independent, so matching may fan out over worker threads;
    pair order follows the sorted group keys either way.
    """
    deleted_groups: dict[tuple[int, str], list[tuple[int, str, MatchFeatures]]] = {}
    created_groups: dict[tuple[int, str], list[tuple[str, MatchFeatures]]] = {}
    for raw in result.satds:
        ckey = (data.sequence_of(raw.created_in_commit), raw.file_id)
        created_groups.setdefault(ckey, []).append(
            (raw.raw_id, result.creation_features[raw.raw_id])
        )
        if raw.deleted_in_commit is not None:
            dkey = (data.sequence_of(raw.deleted_in_commit), raw.file_id)
            deleted_groups.setdefault(dkey, []).append(
                (raw.current_line, raw.raw_id, result.deletion_features[raw.raw_id])
            )

    work = []
    for key in sorted(deleted_groups):
        created = created_groups.get(key)
        if not created:
            continue
        deleted = [(rid, feat) for _, rid, feat in sorted(deleted_groups[key])]
        work.append((deleted, created))

    pairs: list[tuple[str, str]] = []
    if jobs > 1 and work:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for group_pairs in pool.map(
                lambda dc: greedy_match(dc[0], dc[1], cfg), work
            ):
                pairs.extend(group_pairs)
    else:
        for deleted, created in work:
            pairs.extend(greedy_match(deleted, created, cfg))

    tracked = merge_chains(
        result.satds,
        pairs,
        path_at=data.path_at,
        current_path=lambda fid: data.files[fid].current_path,
    )
    return Step3Result(tracked=tracked, pairs=pairs)
