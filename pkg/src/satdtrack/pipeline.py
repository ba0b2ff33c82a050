"""End-to-end orchestration shared by the CLI and the test suite."""

from __future__ import annotations

from dataclasses import dataclass

from .detect import SatdDetector
from .ingest import RepositoryData
from .match import MatchConfig, Step3Result, TrackedSatd, run_step3
from .optimize import LabeledCase
from .track import TrackResult, track_repository


@dataclass
class RunStats:
    commits: int
    master_branch_commits: int
    raw_satds: int
    final_satds: int
    updates: int

    def lines(self) -> list[str]:
        return [
            f"commits: {self.commits}",
            f"master-branch commits: {self.master_branch_commits}",
            f"raw SATDs: {self.raw_satds}",
            f"final SATDs: {self.final_satds}",
            f"updates: {self.updates}",
        ]


@dataclass
class PipelineResult:
    data: RepositoryData
    track_result: TrackResult
    tracked: list[TrackedSatd]
    pairs: list[tuple[str, str]]
    stats: RunStats


def run_pipeline(
    data: RepositoryData,
    detector: SatdDetector | None = None,
    match_cfg: MatchConfig | None = None,
    strict: bool = True,
    jobs: int = 1,
) -> PipelineResult:
    detector = detector if detector is not None else SatdDetector()
    match_cfg = match_cfg if match_cfg is not None else MatchConfig()
    track_result = track_repository(data, detector, strict=strict, jobs=jobs)
    step3: Step3Result = run_step3(track_result, data, match_cfg, jobs=jobs)
    stats = RunStats(
        commits=data.total_commit_count,
        master_branch_commits=len(data.commits),
        raw_satds=len(track_result.satds),
        final_satds=len(step3.tracked),
        updates=len(step3.pairs),
    )
    return PipelineResult(
        data=data,
        track_result=track_result,
        tracked=step3.tracked,
        pairs=step3.pairs,
        stats=stats,
    )


def candidate_cases(result: TrackResult, data: RepositoryData) -> list[LabeledCase]:
    """Unlabeled follower-candidate template rows for human annotation.

    One case per deleted SATD that has at least one created SATD in the
    same commit and file; gold is left empty.
    """
    created_groups: dict[tuple[int, str], list[str]] = {}
    for raw in result.satds:
        key = (data.sequence_of(raw.created_in_commit), raw.file_id)
        created_groups.setdefault(key, []).append(raw.raw_id)

    cases: list[LabeledCase] = []
    for raw in result.satds:
        if raw.deleted_in_commit is None:
            continue
        key = (data.sequence_of(raw.deleted_in_commit), raw.file_id)
        candidate_ids = created_groups.get(key, [])
        if not candidate_ids:
            continue
        cases.append(
            LabeledCase(
                group_key=(raw.deleted_in_commit, raw.file_id),
                deleted_id=raw.raw_id,
                deleted=result.deletion_features[raw.raw_id],
                candidates=tuple(
                    (cid, result.creation_features[cid]) for cid in candidate_ids
                ),
                gold_following=None,
            )
        )
    return cases
