import json

import numpy as np
import pytest

from mcpretest.bank import CandidateDistribution, Item, JoinedItem, PredictionSet


def make_item(i: int, k: int = 4, answer_index: int = 0, level: str = "B1", **overrides) -> Item:
    fields = dict(
        item_id=f"it{i:04d}",
        context_id=f"ctx{i // 4:03d}",
        context=f"Context text for item {i}.",
        question=f"Question {i}?",
        options=tuple(f"option {j}" for j in range(k)),
        answer_index=answer_index,
        level=level,
    )
    fields.update(overrides)
    return Item(**fields)


def make_joined(predictions, answers, candidates=None, level: str = "B1") -> list[JoinedItem]:
    """Build aligned triples directly, bypassing file IO."""
    if candidates is None:
        candidates = predictions
    out = []
    for i, (pred, ans, cand) in enumerate(zip(predictions, answers, candidates)):
        pred = np.asarray(pred, dtype=float)
        cand = np.asarray(cand, dtype=float)
        out.append(JoinedItem(make_item(i, k=pred.size, answer_index=ans, level=level), cand, pred))
    return out


def random_simplex(rng: np.random.Generator, k: int) -> np.ndarray:
    draws = rng.random(k) + 1e-9
    return draws / draws.sum()


def write_bank_files(tmp_path, items, dists, preds: PredictionSet):
    from mcpretest.bank import write_candidate_distributions, write_item_bank, write_predictions

    items_path = tmp_path / "items.jsonl"
    dists_path = tmp_path / "distributions.jsonl"
    preds_path = tmp_path / "predictions.json"
    write_item_bank(items, items_path)
    write_candidate_distributions(dists, dists_path)
    write_predictions(preds, preds_path)
    return items_path, dists_path, preds_path


@pytest.fixture
def tiny_bank_paths(tmp_path):
    """Three aligned files with two 4-option items."""
    items = [make_item(0, answer_index=2), make_item(1, answer_index=0)]
    dists = [
        CandidateDistribution("it0000", np.array([0.1, 0.2, 0.6, 0.1])),
        CandidateDistribution("it0001", np.array([0.7, 0.1, 0.1, 0.1])),
    ]
    preds = PredictionSet(
        variant="QOC",
        entries={
            "it0000": np.array([0.05, 0.15, 0.7, 0.1]),
            "it0001": np.array([0.8, 0.1, 0.05, 0.05]),
        },
    )
    return write_bank_files(tmp_path, items, dists, preds)


def write_json(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path
