"""Command line interface: track, optimize, eval, export-fixture.

Exit codes: 0 success, 1 runtime error, 2 usage error.  The SATD_LOG
environment variable sets the log level (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import export
from .detect import DEFAULT_COMMENT_MARKERS, DEFAULT_TAGS, SatdDetector
from .errors import SatdTrackError
from .evaluate import evaluate
from .fixture import load_fixture, save_fixture
from .ingest import RepositoryData, ingest_repository
from .match import MatchConfig
from .optimize import dump_case, grid_search, load_labeled_cases
from .pipeline import candidate_cases, run_pipeline

log = logging.getLogger("satdtrack")


@dataclass
class RunConfig:
    repo_path: str
    branch_name: str | None = None
    output_path: str = "satd.jsonl"
    output_format: str = "jsonl"
    match: MatchConfig = field(default_factory=MatchConfig)
    comment_markers: tuple[str, ...] = DEFAULT_COMMENT_MARKERS
    tags: tuple[str, ...] = DEFAULT_TAGS
    comment_filter: bool = True
    emit_raw: str | None = None
    emit_candidates: str | None = None
    fixture_mode: bool = False
    jobs: int = 1
    lenient: bool = False


def _parse_weights(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "expected four comma-separated weights: description,prev,next,hunk"
        )
    try:
        d, p, n, h = (float(x) for x in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return d, p, n, h


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SatdTrackError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SatdTrackError(f"config file {path} must hold a JSON object")
    return obj


def _run_config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg_file = _load_config_file(args.config) if args.config else {}

    weights = args.weights
    if weights is None and "weights" in cfg_file:
        w = cfg_file["weights"]
        weights = (float(w[0]), float(w[1]), float(w[2]), float(w[3]))
    threshold = args.threshold
    if threshold is None and "threshold" in cfg_file:
        threshold = float(cfg_file["threshold"])

    match_kwargs = {}
    if weights is not None:
        match_kwargs.update(
            description_weight=weights[0],
            prev_line_weight=weights[1],
            next_line_weight=weights[2],
            hunk_weight=weights[3],
        )
    if threshold is not None:
        match_kwargs["threshold"] = threshold
    try:
        match = MatchConfig(**match_kwargs)
    except ValueError as exc:
        raise SatdTrackError(str(exc)) from None

    markers = args.comment_markers
    if markers is None and "comment_markers" in cfg_file:
        markers = ",".join(cfg_file["comment_markers"])
    marker_tuple = (
        tuple(m for m in markers.split(",") if m)
        if markers is not None
        else DEFAULT_COMMENT_MARKERS
    )

    tags = args.tags
    if tags is None and "tags" in cfg_file:
        tags = ",".join(cfg_file["tags"])
    tag_tuple = (
        tuple(t.strip().upper() for t in tags.split(",") if t.strip())
        if tags is not None
        else DEFAULT_TAGS
    )
    if not tag_tuple:
        raise SatdTrackError("tag set must not be empty")

    return RunConfig(
        repo_path=args.repo,
        branch_name=args.branch,
        output_path=args.output,
        output_format=args.format,
        match=match,
        comment_markers=marker_tuple,
        tags=tag_tuple,
        comment_filter=not args.no_comment_filter,
        emit_raw=args.emit_raw,
        emit_candidates=args.emit_candidates,
        fixture_mode=args.fixture,
        jobs=args.jobs,
        lenient=args.lenient,
    )


def _load_data(cfg: RunConfig) -> RepositoryData:
    if cfg.fixture_mode:
        return load_fixture(cfg.repo_path)
    return ingest_repository(cfg.repo_path, cfg.branch_name)


def cmd_track(cfg: RunConfig) -> int:
    data = _load_data(cfg)
    detector = SatdDetector(
        tags=cfg.tags,
        comment_markers=cfg.comment_markers,
        require_comment_marker=cfg.comment_filter,
    )
    result = run_pipeline(
        data,
        detector=detector,
        match_cfg=cfg.match,
        strict=not cfg.lenient,
        jobs=cfg.jobs,
    )
    export.write_tracked(result.tracked, cfg.output_path, cfg.output_format)
    if cfg.emit_raw:
        export.write_jsonl(
            (export.raw_to_record(s) for s in result.track_result.satds),
            cfg.emit_raw,
        )
    if cfg.emit_candidates:
        cases = candidate_cases(result.track_result, data)
        export.write_jsonl((dump_case(c) for c in cases), cfg.emit_candidates)
    for line in result.stats.lines():
        print(line)
    return 0


def cmd_export_fixture(repo_path: str, branch: str | None, out_path: str) -> int:
    data = ingest_repository(repo_path, branch)
    save_fixture(data, out_path)
    print(f"wrote fixture for {len(data.commits)} commits to {out_path}")
    return 0


def cmd_optimize(labels_path: str) -> int:
    cases = load_labeled_cases(labels_path)
    cfg, accuracy = grid_search(cases)
    print(
        json.dumps(
            {
                "description_weight": cfg.description_weight,
                "prev_line_weight": cfg.prev_line_weight,
                "next_line_weight": cfg.next_line_weight,
                "hunk_weight": cfg.hunk_weight,
                "threshold": cfg.threshold,
                "accuracy": accuracy,
                "cases": len(cases),
            }
        )
    )
    return 0


def cmd_eval(pred_path: str, gold_path: str) -> int:
    pred = export.read_tracked(pred_path)
    gold = export.read_tracked(gold_path)
    report = evaluate(pred, gold)
    print(json.dumps(report.to_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satd",
        description=(
            "Track self-admitted technical debt comments across a git "
            "repository's mainline history."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="mine a repository and write tracked SATDs")
    track.add_argument("repo", help="path to a git repository (or fixture with --fixture)")
    track.add_argument("-o", "--output", required=True, help="output file path")
    track.add_argument(
        "--format", choices=("jsonl", "csv"), default="jsonl", help="output format"
    )
    track.add_argument(
        "--branch", default=None,
        help="branch to walk (default: master, falling back to main)",
    )
    track.add_argument(
        "--fixture", action="store_true",
        help="treat the input path as a JSON fixture instead of a git repository",
    )
    track.add_argument(
        "--weights", type=_parse_weights, default=None, metavar="D,P,N,H",
        help="matcher feature weights: description,prev-line,next-line,hunk",
    )
    track.add_argument(
        "--threshold", type=float, default=None,
        help="minimum matching score for an update pair",
    )
    track.add_argument(
        "--comment-markers", default=None,
        help="comma-separated comment openers that must precede a tag",
    )
    track.add_argument(
        "--no-comment-filter", action="store_true",
        help="accept tags anywhere on the line, not only after a comment opener",
    )
    track.add_argument(
        "--tags", default=None,
        help="comma-separated tag words (default: TODO,FIXME,XXX,HACK)",
    )
    track.add_argument("--config", default=None, help="JSON config file")
    track.add_argument(
        "--emit-raw", default=None, metavar="PATH",
        help="also write the intermediate raw SATDs as JSONL",
    )
    track.add_argument(
        "--emit-candidates", default=None, metavar="PATH",
        help="also write an unlabeled follower-candidate template as JSONL",
    )
    track.add_argument(
        "--jobs", type=int, default=1, help="worker threads for per-file tracking"
    )
    track.add_argument(
        "--lenient", action="store_true",
        help="log and skip dangling SATD deletions instead of aborting",
    )

    exp = sub.add_parser("export-fixture", help="dump a repository as a JSON fixture")
    exp.add_argument("repo", help="path to a git repository")
    exp.add_argument("-o", "--output", required=True, help="fixture file to write")
    exp.add_argument("--branch", default=None)

    opt = sub.add_parser("optimize", help="grid-search matcher weights on labeled data")
    opt.add_argument("--labels", required=True, help="labeled cases (JSONL)")

    ev = sub.add_parser("eval", help="score predicted records against gold records")
    ev.add_argument("--pred", required=True, help="predicted records (JSONL or CSV)")
    ev.add_argument("--gold", required=True, help="gold records (JSONL or CSV)")

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SATD_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "track":
            return cmd_track(_run_config_from_args(args))
        if args.command == "export-fixture":
            return cmd_export_fixture(args.repo, args.branch, args.output)
        if args.command == "optimize":
            return cmd_optimize(args.labels)
        if args.command == "eval":
            return cmd_eval(args.pred, args.gold)
        parser.error(f"unknown command {args.command}")
    except SatdTrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
