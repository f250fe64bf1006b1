"""Underperforming-distractor labeling and detection.

A distractor is labeled poor when strictly fewer than 10% of candidates select
it. Detection ranks distractors ascending by model probability (lowest first,
i.e. most suspect first); equal scores form one block so the curve does not
depend on input order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .bank import JoinedItem
from .reshape import ReshapeParams, _reshape_at

POOR_THRESHOLD = 0.10


@dataclass(frozen=True)
class DistractorRecord:
    item_id: str
    option_index: int
    candidate_fraction: float
    model_probability: float
    is_poor: bool


@dataclass(frozen=True)
class PRCurve:
    points: tuple[tuple[float, float], ...]  # (recall, precision) per score block
    average_precision: float
    prevalence: float


def extract_distractors(
    joined: Sequence[JoinedItem],
    score_source: Literal["raw", "reshaped"] = "raw",
    params: ReshapeParams | None = None,
) -> list[DistractorRecord]:
    """One record per (item, non-answer option), labeled by the 10% rule."""
    if score_source not in ("raw", "reshaped"):
        raise ValueError(f"unknown score_source {score_source!r}")
    if score_source == "reshaped" and params is None:
        raise ValueError("score_source 'reshaped' requires fitted params")
    records: list[DistractorRecord] = []
    for ji in joined:
        ans = ji.item.answer_index
        scores = (
            ji.prediction
            if score_source == "raw"
            else _reshape_at(ji.prediction, ans, params.alpha, params.tau)
        )
        for idx in range(ji.item.n_options):
            if idx == ans:
                continue
            fraction = float(ji.candidate[idx])
            records.append(
                DistractorRecord(
                    item_id=ji.item.item_id,
                    option_index=idx,
                    candidate_fraction=fraction,
                    model_probability=float(scores[idx]),
                    is_poor=fraction < POOR_THRESHOLD,
                )
            )
    return records


def pr_curve(records: Sequence[DistractorRecord]) -> PRCurve:
    """Precision-recall over the ascending-score ranking, with block-level ties.

    Average precision is the mean, over poor distractors, of the precision of
    the prefix ending at that distractor's score block.
    """
    if not records:
        raise ValueError("cannot build a PR curve from no records")
    n_poor = sum(r.is_poor for r in records)
    if n_poor == 0:
        raise ValueError("undefined recall: no poor distractors among the records")

    scores = np.array([r.model_probability for r in records])
    labels = np.array([r.is_poor for r in records], dtype=float)
    order = np.argsort(scores, kind="stable")
    scores, labels = scores[order], labels[order]

    # Block boundaries: last index of each run of equal scores.
    block_end = np.nonzero(np.append(scores[:-1] != scores[1:], True))[0]
    tp = np.cumsum(labels)[block_end]
    pp = block_end + 1.0
    pos_in_block = np.diff(np.concatenate(([0.0], tp)))

    precision = tp / pp
    recall = tp / n_poor
    average_precision = float(np.sum(precision * pos_in_block) / n_poor)
    points = tuple((float(r), float(p)) for r, p in zip(recall, precision))
    return PRCurve(
        points=points,
        average_precision=average_precision,
        prevalence=n_poor / len(records),
    )


def random_baseline(records: Sequence[DistractorRecord]) -> float:
    """Expected precision of a uniformly random ranking: the poor prevalence."""
    if not records:
        raise ValueError("cannot compute a baseline from no records")
    return sum(r.is_poor for r in records) / len(records)


def flagged_report(records: Sequence[DistractorRecord]) -> list[DistractorRecord]:
    """All records sorted ascending by score (most suspect first), ties by id/option."""
    return sorted(records, key=lambda r: (r.model_probability, r.item_id, r.option_index))
