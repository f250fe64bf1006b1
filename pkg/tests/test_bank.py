import json

import numpy as np
import pytest

from mcpretest.bank import (
    CandidateDistribution,
    PredictionSet,
    join,
    load_candidate_distributions,
    load_item_bank,
    load_predictions,
    write_candidate_distributions,
    write_item_bank,
    write_predictions,
)
from mcpretest.errors import BankValidationError, LowCandidateCountWarning, ParseError

from conftest import make_item, write_json


def test_minimal_item_loads(tmp_path):
    path = write_json(
        tmp_path / "items.json",
        [
            {
                "item_id": "a",
                "context_id": "c",
                "context": "Some context.",
                "question": "Which?",
                "options": ["w", "x", "y", "z"],
                "answer_index": 2,
                "level": "B1",
            }
        ],
    )
    items = load_item_bank(path)
    assert len(items) == 1
    assert items[0].answer_index == 2
    assert items[0].n_options == 4


def test_answer_index_out_of_range_rejected(tmp_path):
    path = write_json(
        tmp_path / "items.json",
        [
            {
                "item_id": "a",
                "context_id": "c",
                "context": "",
                "question": "",
                "options": ["w", "x", "y", "z"],
                "answer_index": 4,
                "level": "B1",
            }
        ],
    )
    with pytest.raises(BankValidationError, match="out of range"):
        load_item_bank(path)


def test_duplicate_item_id_rejected(tmp_path):
    record = {
        "item_id": "a",
        "context_id": "c",
        "context": "",
        "question": "",
        "options": ["w", "x"],
        "answer_index": 0,
        "level": "B1",
    }
    path = write_json(tmp_path / "items.json", [record, dict(record)])
    with pytest.raises(BankValidationError, match="duplicate"):
        load_item_bank(path)


@pytest.mark.parametrize(
    "mutation,message",
    [
        ({"options": ["only"]}, "length >= 2"),
        ({"options": ["a", ""]}, "non-empty"),
        ({"level": "Z9"}, "unknown level"),
    ],
)
def test_item_invariants_rejected(tmp_path, mutation, message):
    record = {
        "item_id": "a",
        "context_id": "c",
        "context": "",
        "question": "",
        "options": ["w", "x"],
        "answer_index": 0,
        "level": "B1",
    }
    record.update(mutation)
    path = write_json(tmp_path / "items.json", [record])
    with pytest.raises(BankValidationError, match=message):
        load_item_bank(path)


def test_custom_level_set_accepted(tmp_path):
    record = {
        "item_id": "a",
        "context_id": "c",
        "context": "",
        "question": "",
        "options": ["w", "x"],
        "answer_index": 0,
        "level": "A2",
    }
    path = write_json(tmp_path / "items.json", [record])
    with pytest.raises(BankValidationError):
        load_item_bank(path)
    assert load_item_bank(path, allowed_levels=("A2", "B1"))[0].level == "A2"


def test_jsonl_and_array_forms_equivalent(tmp_path):
    record = {
        "item_id": "a",
        "context_id": "c",
        "context": "ctx",
        "question": "q",
        "options": ["w", "x"],
        "answer_index": 1,
        "level": "C1",
    }
    array_path = write_json(tmp_path / "a.json", [record])
    jsonl_path = tmp_path / "b.jsonl"
    jsonl_path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    assert load_item_bank(array_path) == load_item_bank(jsonl_path)


def test_parse_error_carries_locator(tmp_path):
    path = tmp_path / "items.jsonl"
    path.write_text('{"item_id": "a"}\n{broken\n', encoding="utf-8")
    with pytest.raises(ParseError, match="line 2"):
        load_item_bank(path)


def test_low_candidate_count_warns_not_errors(tmp_path):
    record = {
        "item_id": "a",
        "context_id": "c",
        "context": "",
        "question": "",
        "options": ["w", "x"],
        "answer_index": 0,
        "level": "B1",
        "candidate_count": 40,
    }
    path = write_json(tmp_path / "items.json", [record])
    with pytest.warns(LowCandidateCountWarning):
        items = load_item_bank(path)
    assert items[0].candidate_count == 40


def test_reference_level_counts(tmp_path):
    # A bank shaped like the published evaluation subset: 448 items over 78
    # contexts; the loader must reproduce the per-level counts.
    counts = {"B1": 115, "B2": 222, "C1": 72, "C2": 39}
    items = []
    i = 0
    for level, n in counts.items():
        for _ in range(n):
            items.append(make_item(i, level=level, context_id=f"ctx{i % 78:03d}"))
            i += 1
    path = tmp_path / "items.jsonl"
    write_item_bank(items, path)
    loaded = load_item_bank(path)
    assert len(loaded) == 448
    by_level: dict = {}
    for item in loaded:
        by_level[item.level] = by_level.get(item.level, 0) + 1
    assert by_level == counts
    assert len({item.context_id for item in loaded}) == 78


# ---------------------------------------------------------------------------
# candidate distributions
# ---------------------------------------------------------------------------


def test_uniform_distribution_accepted_unchanged(tmp_path):
    path = write_json(tmp_path / "d.json", [{"item_id": "a", "fractions": [0.25, 0.25, 0.25, 0.25]}])
    dists = load_candidate_distributions(path)
    assert np.array_equal(dists[0].fractions, [0.25, 0.25, 0.25, 0.25])


def test_sum_violation_rejected(tmp_path):
    path = write_json(tmp_path / "d.json", [{"item_id": "a", "fractions": [0.5, 0.5, 0.1]}])
    with pytest.raises(BankValidationError, match="sum to 1.10"):
        load_candidate_distributions(path)


def test_negative_fraction_rejected(tmp_path):
    path = write_json(tmp_path / "d.json", [{"item_id": "a", "fractions": [1.1, -0.1]}])
    with pytest.raises(BankValidationError, match="negative"):
        load_candidate_distributions(path)


def test_near_unit_sum_renormalized_exactly(tmp_path):
    path = write_json(
        tmp_path / "d.json", [{"item_id": "a", "fractions": [0.333333, 0.333333, 0.333334]}]
    )
    dists = load_candidate_distributions(path)
    assert abs(dists[0].fractions.sum() - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# predictions
# ---------------------------------------------------------------------------


def test_predictions_floored_and_renormalized(tmp_path):
    path = write_json(tmp_path / "p.json", {"variant": "QO", "entries": {"a": [1.0, 0.0]}})
    preds = load_predictions(path)
    vec = preds.entries["a"]
    assert np.all(vec > 0)
    assert abs(vec.sum() - 1.0) < 1e-12
    np.log(vec)  # must not produce -inf
    assert preds.variant == "QO"


def test_prediction_bad_variant_rejected(tmp_path):
    path = write_json(tmp_path / "p.json", {"variant": "XYZ", "entries": {"a": [0.5, 0.5]}})
    with pytest.raises(BankValidationError, match="variant"):
        load_predictions(path)


def test_prediction_extra_metadata_tolerated(tmp_path):
    path = write_json(
        tmp_path / "p.json",
        {"variant": "QOC", "entries": {"a": [0.5, 0.5]}, "metadata": {"truncation": "context_only"}},
    )
    assert "a" in load_predictions(path).entries


# ---------------------------------------------------------------------------
# join
# ---------------------------------------------------------------------------


def _aligned_inputs(n=3, k=4):
    items = [make_item(i, k=k, answer_index=i % k, level="B1" if i % 2 == 0 else "B2") for i in range(n)]
    dists = [CandidateDistribution(it.item_id, np.full(k, 1.0 / k)) for it in items]
    preds = PredictionSet("QOC", {it.item_id: np.full(k, 1.0 / k) for it in items})
    return items, dists, preds


def test_total_join():
    items, dists, preds = _aligned_inputs()
    bank = join(items, dists, preds)
    assert bank.n_items == 3
    assert not bank.missing_predictions


def test_missing_prediction_strict_names_item():
    items, dists, preds = _aligned_inputs()
    del preds.entries["it0001"]
    with pytest.raises(BankValidationError, match="it0001"):
        join(items, dists, preds, strict=True)


def test_missing_prediction_lenient_drops_and_reports():
    items, dists, preds = _aligned_inputs()
    del preds.entries["it0001"]
    bank = join(items, dists, preds, strict=False)
    assert bank.n_items == 2
    assert bank.missing_predictions == ("it0001",)


def test_length_mismatch_names_item():
    items, dists, preds = _aligned_inputs()
    preds.entries["it0002"] = np.array([0.5, 0.3, 0.2])
    with pytest.raises(BankValidationError, match="it0002"):
        join(items, dists, preds)


def test_join_never_fabricates():
    items, dists, preds = _aligned_inputs(n=5)
    bank = join(items[:4], dists[:3], preds)
    assert bank.n_items <= min(4, 3, len(preds.entries))


def test_unmatched_extra_ids_reported():
    items, dists, preds = _aligned_inputs()
    dists.append(CandidateDistribution("ghost", np.array([0.5, 0.5])))
    bank = join(items, dists, preds)
    assert bank.unmatched_distribution_ids == ("ghost",)


# ---------------------------------------------------------------------------
# round-trip
# ---------------------------------------------------------------------------


def test_item_bank_round_trip(tmp_path):
    items = [
        make_item(0, answer_index=1, discrimination=(0.1, 0.2, 0.3, 0.4), candidate_count=150),
        make_item(1, k=3, answer_index=2, level="C2"),
    ]
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    write_item_bank(items, first)
    loaded = load_item_bank(first)
    write_item_bank(loaded, second)
    original = [json.loads(line) for line in first.read_text().splitlines()]
    rewritten = [json.loads(line) for line in second.read_text().splitlines()]
    assert original == rewritten
    assert loaded == load_item_bank(second)


def test_distribution_and_prediction_round_trip(tmp_path):
    dists = [CandidateDistribution("a", np.array([0.25, 0.75]))]
    preds = PredictionSet("QO", {"a": np.array([0.4, 0.6])})
    dpath, ppath = tmp_path / "d.jsonl", tmp_path / "p.json"
    write_candidate_distributions(dists, dpath)
    write_predictions(preds, ppath)
    assert np.allclose(load_candidate_distributions(dpath)[0].fractions, [0.25, 0.75])
    assert np.allclose(load_predictions(ppath).entries["a"], [0.4, 0.6])
