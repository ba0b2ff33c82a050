"""SATD-level precision/recall/F1 against a gold-standard record list.

A predicted record counts as correct only when its creation commit,
file and line, its deletion commit (or absence), and every update
triple (commit, old line, new line) all match a gold record exactly.
Update texts and last-appeared fields are not part of the key: line
identity subsumes them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DuplicateGoldKey
from .match import TrackedSatd


@dataclass(frozen=True)
class SatdKey:
    created_in_commit: str
    created_in_file: str
    created_in_line: int
    deleted_in_commit: str | None
    updates: tuple[tuple[str, int, int], ...]

    @classmethod
    def from_tracked(cls, record: TrackedSatd) -> "SatdKey":
        return cls(
            created_in_commit=record.created_in_commit,
            created_in_file=record.created_in_file,
            created_in_line=record.created_in_line,
            deleted_in_commit=record.deleted_in_commit,
            updates=tuple(
                (commit, old, new)
                for commit, (old, new) in zip(
                    record.updated_in_commits, record.updated_in_lines
                )
            ),
        )


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def metrics_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """P/R/F1 with the zero-denominator conventions used throughout.

    A metric whose denominator is zero is 1.0 when the opposing error
    count is also zero (nothing to get wrong), else 0.0.
    """
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 1.0 if fn == 0 else 0.0
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = 1.0 if fp == 0 else 0.0
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return precision, recall, f1


def evaluate(pred: Sequence[TrackedSatd], gold: Sequence[TrackedSatd]) -> EvalReport:
    """Exact-key comparison of predicted records against gold records."""
    gold_keys = set()
    for record in gold:
        key = SatdKey.from_tracked(record)
        if key in gold_keys:
            raise DuplicateGoldKey(f"gold contains {key} twice")
        gold_keys.add(key)

    tp = 0
    fp = 0
    matched: set[SatdKey] = set()
    for record in pred:
        key = SatdKey.from_tracked(record)
        if key in gold_keys and key not in matched:
            tp += 1
            matched.add(key)
        else:
            fp += 1
    fn = len(gold_keys) - len(matched)

    precision, recall, f1 = metrics_from_counts(tp, fp, fn)
    return EvalReport(
        precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn
    )
