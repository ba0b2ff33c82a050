#!/usr/bin/env python3
"""Regenerate tests/data/planted_labels.jsonl.

Builds a synthetic labeled-case set for which exactly one grid
configuration (weights 0.6/0.2/0.0/0.2, threshold 0.4) predicts every
label correctly.  Construction works in exact rational arithmetic and
keeps every per-config score either exactly on that config's threshold
or at least 1/600 away from it, so the float pipeline at run time agrees
with the exact model.

Strategy: start from a handful of planted-consistent cases, then
repeatedly pick a surviving still-perfect configuration and add a
single-candidate case that the planted config answers correctly but the
survivor does not.  Jaccard targets are realized as token sets.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from satdtrack.match import MatchFeatures
from satdtrack.optimize import (
    LabeledCase,
    config_grid,
    grid_search,
    save_labeled_cases,
)

PLANTED_WEIGHTS = (6, 2, 0, 2)   # tenths: description, prev, next, hunk
PLANTED_THRESHOLD = 4            # tenths
OUT_PATH = Path(__file__).resolve().parent.parent / "tests" / "data" / "planted_labels.jsonl"

# Jaccard values realizable with denominators dividing 60, so every score
# has denominator dividing 600 and |score - threshold| is 0 or >= 1/600.
LEVELS = [
    Fraction(0), Fraction(1, 6), Fraction(1, 5), Fraction(1, 4),
    Fraction(1, 3), Fraction(2, 5), Fraction(1, 2), Fraction(3, 5),
    Fraction(2, 3), Fraction(3, 4), Fraction(4, 5), Fraction(5, 6),
    Fraction(1),
]

GridConfig = tuple[tuple[int, int, int, int], int]


def all_grid_configs() -> list[GridConfig]:
    configs = []
    for cfg in config_grid():
        weights = (
            round(cfg.description_weight * 10),
            round(cfg.prev_line_weight * 10),
            round(cfg.next_line_weight * 10),
            round(cfg.hunk_weight * 10),
        )
        configs.append((weights, round(cfg.threshold * 10)))
    return configs


def exact_score(weights: tuple[int, int, int, int], fvec) -> Fraction:
    return sum(
        (Fraction(w, 10) * f for w, f in zip(weights, fvec)), Fraction(0)
    )


def correct(config: GridConfig, fvec, positive: bool) -> bool:
    """Would this config answer a single-candidate case correctly?"""
    weights, t = config
    accepts = exact_score(weights, fvec) >= Fraction(t, 10)
    return accepts if positive else not accepts


def realize_tokens(prefix: str, value: Fraction) -> tuple[str, str]:
    """Two strings whose token-set Jaccard equals ``value`` exactly."""
    if value == 1:
        text = f"{prefix}s0 {prefix}s1"
        return text, text
    p, q = value.numerator, value.denominator
    if q == 1:   # value == 0; use disjoint singletons
        return f"{prefix}a0", f"{prefix}b0"
    shared = [f"{prefix}s{i}" for i in range(p)]
    extra = q - p
    a_extra = [f"{prefix}a{i}" for i in range((extra + 1) // 2)]
    b_extra = [f"{prefix}b{i}" for i in range(extra - (extra + 1) // 2)]
    return " ".join(shared + a_extra), " ".join(shared + b_extra)


def build_case(
    index: int, fvec, positive: bool, n_decoys: int = 0
) -> LabeledCase:
    a, b, c, h = fvec
    desc_d, desc_c = realize_tokens(f"k{index}d", a)
    prev_d, prev_c = realize_tokens(f"k{index}p", b)
    next_d, next_c = realize_tokens(f"k{index}n", c)
    hunk_d = f"hunk{index}"
    hunk_c = hunk_d if h == 1 else f"hunk{index}other"
    deleted = MatchFeatures(desc_d, prev_d, next_d, hunk_d)
    candidate = MatchFeatures(desc_c, prev_c, next_c, hunk_c)
    candidates = [(f"cand{index}", candidate)]
    for d in range(n_decoys):
        candidates.append(
            (
                f"decoy{index}x{d}",
                MatchFeatures(
                    f"k{index}decoy{d}", f"k{index}dp{d}", f"k{index}dn{d}",
                    f"hunk{index}decoy{d}",
                ),
            )
        )
    return LabeledCase(
        group_key=(f"commit{index}", f"file{index}"),
        deleted_id=f"del{index}",
        deleted=deleted,
        candidates=tuple(candidates),
        gold_following=f"cand{index}" if positive else None,
    )


def base_cases() -> list[tuple]:
    """(fvec, positive) seeds, all planted-correct, spanning feature space."""
    F = Fraction
    return [
        ((F(1), F(1), F(0), 1), True),      # clean rewrite, same hunk
        ((F(2, 5), F(1), F(0), 1), True),   # the worked composite: 0.64
        ((F(2, 3), F(0), F(0), 0), True),   # description alone: exactly 0.4
        ((F(0), F(1), F(1), 0), False),     # context only: 0.2 < 0.4
        ((F(1, 6), F(0), F(1), 0), False),  # 0.1 < 0.4
        ((F(0), F(0), F(0), 1), False),     # hunk alone: 0.2 < 0.4
        ((F(1, 3), F(1, 2), F(1), 1), True),   # 0.2+0.1+0.2 = 0.5
        ((F(1, 4), F(1, 4), F(1, 4), 0), False),  # 0.2 < 0.4
        ((F(1), F(0), F(0), 0), True),      # 0.6
        ((F(1, 2), F(0), F(1), 0), False),  # 0.3 < 0.4
        ((F(3, 5), F(1, 2), F(0), 0), True),    # 0.36+0.1 = 0.46
    ]


def find_separator(survivor: GridConfig) -> tuple | None:
    planted = (PLANTED_WEIGHTS, PLANTED_THRESHOLD)
    for h in (0, 1):
        for a in LEVELS:
            for b in LEVELS:
                for c in LEVELS:
                    fvec = (a, b, c, h)
                    for positive in (True, False):
                        if correct(planted, fvec, positive) and not correct(
                            survivor, fvec, positive
                        ):
                            return fvec, positive
    return None


def main() -> int:
    planted = (PLANTED_WEIGHTS, PLANTED_THRESHOLD)
    seeds = []
    for fvec, positive in base_cases():
        if not correct(planted, fvec, positive):
            raise SystemExit(f"seed case {fvec} positive={positive} contradicts the plant")
        seeds.append((fvec, positive))

    survivors = [
        cfg
        for cfg in all_grid_configs()
        if all(correct(cfg, fvec, positive) for fvec, positive in seeds)
    ]
    assert planted in survivors
    print(f"{len(survivors)} configs survive the {len(seeds)} seed cases")

    extra: list[tuple] = []
    while len(survivors) > 1:
        target = next(cfg for cfg in survivors if cfg != planted)
        found = find_separator(target)
        if found is None:
            raise SystemExit(f"no separating case for survivor {target}")
        fvec, positive = found
        extra.append(found)
        survivors = [
            cfg for cfg in survivors if correct(cfg, fvec, positive)
        ]
    assert survivors == [planted]
    print(f"unique after {len(extra)} separating cases")

    cases = []
    for i, (fvec, positive) in enumerate(seeds + extra):
        cases.append(build_case(i, fvec, positive))
    # pad with decoy-bearing planted-correct cases for volume and realism
    i = len(cases)
    pad_specs = [
        ((Fraction(1), Fraction(1), Fraction(1), 1), True),
        ((Fraction(5, 6), Fraction(1, 2), Fraction(0), 1), True),
        ((Fraction(0), Fraction(1, 6), Fraction(1, 6), 0), False),
        ((Fraction(3, 4), Fraction(0), Fraction(1, 3), 0), True),
        ((Fraction(1, 5), Fraction(1, 5), Fraction(0), 0), False),
    ]
    while len(cases) < 40:
        fvec, positive = pad_specs[(len(cases) - i) % len(pad_specs)]
        if not correct(planted, fvec, positive):
            raise SystemExit("pad case contradicts the plant")
        cases.append(build_case(len(cases), fvec, positive, n_decoys=1))

    # cross-check through the real float pipeline before freezing
    best_cfg, accuracy = grid_search(cases)
    got = (
        (
            round(best_cfg.description_weight * 10),
            round(best_cfg.prev_line_weight * 10),
            round(best_cfg.next_line_weight * 10),
            round(best_cfg.hunk_weight * 10),
        ),
        round(best_cfg.threshold * 10),
    )
    if got != planted or accuracy != 1.0:
        raise SystemExit(f"float pipeline disagrees: got {got} at {accuracy}")

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    save_labeled_cases(cases, OUT_PATH)
    print(f"wrote {len(cases)} cases to {OUT_PATH}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
