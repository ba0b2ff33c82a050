"""Language-independent SATD tracking over git history.

Pipeline: ingest a repository's first-parent mainline (or a JSON
fixture), detect tag-annotated debt comments in hunks, track each
comment's line through later edits, then convert same-commit
delete/create pairs into update actions on a single merged record.
"""

from .detect import SatdDetector, SatdHit, detect
from .errors import (
    BareOrCorrupt,
    CyclicChain,
    DanglingDeletion,
    DiffFailure,
    DuplicateGoldKey,
    EmptyLabelSet,
    NotARepository,
    SatdTrackError,
    SchemaViolation,
    UnknownBranch,
)
from .evaluate import EvalReport, SatdKey, evaluate, metrics_from_counts
from .fixture import load_fixture, save_fixture
from .ingest import (
    CommitRecord,
    FileAction,
    FileIdentity,
    Hunk,
    RepositoryData,
    extract_file_actions,
    ingest_repository,
    master_branch_walk,
    open_repository,
)
from .match import (
    MatchConfig,
    MatchFeatures,
    Step3Result,
    TrackedSatd,
    greedy_match,
    jaccard,
    merge_chains,
    run_step3,
    score_pair,
)
from .optimize import LabeledCase, evaluate_config, grid_search
from .pipeline import PipelineResult, RunStats, run_pipeline
from .track import RawSatd, TrackResult, track_file, track_repository

__version__ = "0.1.0"

__all__ = [
    "BareOrCorrupt",
    "CommitRecord",
    "CyclicChain",
    "DanglingDeletion",
    "DiffFailure",
    "DuplicateGoldKey",
    "EmptyLabelSet",
    "EvalReport",
    "FileAction",
    "FileIdentity",
    "Hunk",
    "LabeledCase",
    "MatchConfig",
    "MatchFeatures",
    "NotARepository",
    "PipelineResult",
    "RawSatd",
    "RepositoryData",
    "RunStats",
    "SatdDetector",
    "SatdHit",
    "SatdKey",
    "SatdTrackError",
    "SchemaViolation",
    "Step3Result",
    "TrackResult",
    "TrackedSatd",
    "UnknownBranch",
    "detect",
    "evaluate",
    "evaluate_config",
    "extract_file_actions",
    "greedy_match",
    "grid_search",
    "ingest_repository",
    "jaccard",
    "load_fixture",
    "master_branch_walk",
    "merge_chains",
    "metrics_from_counts",
    "open_repository",
    "run_pipeline",
    "run_step3",
    "save_fixture",
    "score_pair",
    "track_file",
    "track_repository",
]
