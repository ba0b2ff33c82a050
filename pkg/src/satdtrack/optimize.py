"""Grid search for the matcher's feature weights and threshold.

Weights are enumerated in integer tenths over all 4-tuples summing to
1.0 (286 combinations), crossed with thresholds 0.0, 0.1, ..., 1.0, for
3,146 candidate configurations.  Each configuration is scored by the
fraction of labeled deletions whose predicted follower (possibly none)
equals the human label; ties prefer the higher threshold, then the
lexicographically smaller weight tuple.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyLabelSet, SchemaViolation
from .match import MatchConfig, MatchFeatures, greedy_pairs_from_matrix, jaccard

GRID_STEPS = 10  # tenths


@dataclass(frozen=True)
class LabeledCase:
    """One deleted SATD, its same-commit-same-file candidates, and the answer.

    ``gold_following`` of None means the deletion was real and no
    candidate continues it.
    """

    group_key: tuple[str, str]          # (commit sha, file id)
    deleted_id: str
    deleted: MatchFeatures
    candidates: tuple[tuple[str, MatchFeatures], ...]
    gold_following: str | None

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError(f"case {self.deleted_id} has no candidates")
        if self.gold_following is not None:
            ids = {cid for cid, _ in self.candidates}
            if self.gold_following not in ids:
                raise ValueError(
                    f"case {self.deleted_id}: gold {self.gold_following} "
                    "is not among the candidates"
                )


def weight_grid() -> list[tuple[int, int, int, int]]:
    """All integer-tenth weight 4-tuples summing to 10, in ascending order."""
    grid = []
    for d in range(GRID_STEPS + 1):
        for p in range(GRID_STEPS + 1 - d):
            for n in range(GRID_STEPS + 1 - d - p):
                grid.append((d, p, n, GRID_STEPS - d - p - n))
    return sorted(grid)


def config_grid() -> list[MatchConfig]:
    """Every candidate configuration, ordered by tie-break preference."""
    configs = []
    for t in range(GRID_STEPS, -1, -1):
        for d, p, n, h in weight_grid():
            configs.append(
                MatchConfig(
                    description_weight=d / 10,
                    prev_line_weight=p / 10,
                    next_line_weight=n / 10,
                    hunk_weight=h / 10,
                    threshold=t / 10,
                )
            )
    return configs


@dataclass
class _PreparedGroup:
    case_indexes: list[int]                 # positions into the case list
    candidate_ids: list[str]
    feature_rows: list[list[tuple[float, float, float, float]]]


def _prepare(cases: Sequence[LabeledCase]) -> list[_PreparedGroup]:
    """Precompute per-pair feature factors; they do not depend on weights."""
    grouped: dict[tuple[str, str], list[int]] = {}
    for idx, case in enumerate(cases):
        grouped.setdefault(case.group_key, []).append(idx)

    prepared = []
    for key in sorted(grouped):
        indexes = grouped[key]
        candidate_ids: list[str] = []
        candidate_feats: list[MatchFeatures] = []
        for idx in indexes:
            for cid, feat in cases[idx].candidates:
                if cid not in candidate_ids:
                    candidate_ids.append(cid)
                    candidate_feats.append(feat)
        rows = []
        for idx in indexes:
            deleted = cases[idx].deleted
            # Same factor order and summation order as score_pair, so the
            # cached path reproduces its floats bit for bit.
            row = [
                (
                    jaccard(deleted.description, feat.description),
                    jaccard(deleted.previous_line, feat.previous_line),
                    jaccard(deleted.next_line, feat.next_line),
                    1.0 if deleted.hunk_id == feat.hunk_id else 0.0,
                )
                for feat in candidate_feats
            ]
            rows.append(row)
        prepared.append(
            _PreparedGroup(
                case_indexes=indexes,
                candidate_ids=candidate_ids,
                feature_rows=rows,
            )
        )
    return prepared


def evaluate_config(
    cases: Sequence[LabeledCase],
    cfg: MatchConfig,
    _prepared: list[_PreparedGroup] | None = None,
) -> float:
    """Fraction of cases whose predicted follower equals the gold label."""
    if not cases:
        raise EmptyLabelSet("no labeled cases to evaluate")
    prepared = _prepared if _prepared is not None else _prepare(cases)
    weights = (
        cfg.description_weight,
        cfg.prev_line_weight,
        cfg.next_line_weight,
        cfg.hunk_weight,
    )
    correct = 0
    for group in prepared:
        cells = [
            [sum(w * f for w, f in zip(weights, factors)) for factors in row]
            for row in group.feature_rows
        ]
        predicted: dict[int, str] = {}
        for i, j in greedy_pairs_from_matrix(cells, cfg.threshold):
            predicted[group.case_indexes[i]] = group.candidate_ids[j]
        for idx in group.case_indexes:
            if predicted.get(idx) == cases[idx].gold_following:
                correct += 1
    return correct / len(cases)


def grid_search(cases: Sequence[LabeledCase]) -> tuple[MatchConfig, float]:
    """Exhaustively score the configuration grid and return the best."""
    if not cases:
        raise EmptyLabelSet("no labeled cases to optimize over")
    prepared = _prepare(cases)
    best_cfg: MatchConfig | None = None
    best_acc = -1.0
    for cfg in config_grid():
        acc = evaluate_config(cases, cfg, _prepared=prepared)
        if acc > best_acc:
            best_cfg, best_acc = cfg, acc
    assert best_cfg is not None
    return best_cfg, best_acc


# -- label file io ---------------------------------------------------------


def _features_from_obj(obj: dict, field: str) -> tuple[str, MatchFeatures]:
    for key in ("id", "description", "prev", "next", "hunk_id"):
        if key not in obj:
            raise SchemaViolation(f"{field}.{key}", "missing")
        expect = str
        if not isinstance(obj[key], expect):
            raise SchemaViolation(f"{field}.{key}", "expected string")
    return obj["id"], MatchFeatures(
        description=obj["description"],
        previous_line=obj["prev"],
        next_line=obj["next"],
        hunk_id=obj["hunk_id"],
    )


def _features_to_obj(satd_id: str, feat: MatchFeatures) -> dict:
    return {
        "id": satd_id,
        "description": feat.description,
        "prev": feat.previous_line,
        "next": feat.next_line,
        "hunk_id": feat.hunk_id,
    }


def load_labeled_cases(path: str | Path) -> list[LabeledCase]:
    """Read one JSON-encoded case per line; gold may be null."""
    cases = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(where, f"not valid JSON: {exc}") from exc
            try:
                group = obj["group"]
                deleted_id, deleted = _features_from_obj(obj["deleted"], f"{where}.deleted")
                candidates = tuple(
                    _features_from_obj(c, f"{where}.candidates[{i}]")
                    for i, c in enumerate(obj["candidates"])
                )
                gold = obj.get("gold")
                if gold is not None and not isinstance(gold, str):
                    raise SchemaViolation(f"{where}.gold", "expected string or null")
                case = LabeledCase(
                    group_key=(group["commit"], group["file_id"]),
                    deleted_id=deleted_id,
                    deleted=deleted,
                    candidates=candidates,
                    gold_following=gold,
                )
            except SchemaViolation:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaViolation(where, str(exc)) from exc
            cases.append(case)
    return cases


def dump_case(case: LabeledCase) -> dict:
    return {
        "group": {"commit": case.group_key[0], "file_id": case.group_key[1]},
        "deleted": _features_to_obj(case.deleted_id, case.deleted),
        "candidates": [
            _features_to_obj(cid, feat) for cid, feat in case.candidates
        ],
        "gold": case.gold_following,
    }


def save_labeled_cases(cases: Iterable[LabeledCase], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            fh.write(json.dumps(dump_case(case)) + "\n")
