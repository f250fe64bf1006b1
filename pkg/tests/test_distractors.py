import itertools

import numpy as np
import pytest

from mcpretest.distractors import (
    DistractorRecord,
    extract_distractors,
    flagged_report,
    pr_curve,
    random_baseline,
)
from mcpretest.reshape import ReshapeParams

from conftest import make_joined


def rec(score: float, poor: bool, item="x", option=1) -> DistractorRecord:
    return DistractorRecord(item, option, 0.05 if poor else 0.5, score, poor)


def ap_oracle(scores, labels):
    """Independent reference: ascending prefix scan with tie blocks."""
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ap = 0.0
    tp = 0
    i = 0
    while i < len(order):
        j = i
        block_pos = 0
        while j < len(order) and scores[order[j]] == scores[order[i]]:
            block_pos += int(labels[order[j]])
            j += 1
        tp += block_pos
        ap += block_pos * (tp / j)
        i = j
    return ap / sum(labels)


# ---------------------------------------------------------------------------
# extraction and labeling
# ---------------------------------------------------------------------------


def test_extract_labels_poor_by_strict_threshold():
    joined = make_joined(
        [[0.7, 0.2, 0.05, 0.05]], answers=[0], candidates=[[0.6, 0.25, 0.08, 0.07]]
    )
    records = extract_distractors(joined)
    assert len(records) == 3
    poor = {r.option_index for r in records if r.is_poor}
    assert poor == {2, 3}


def test_extract_none_poor():
    joined = make_joined([[0.4, 0.3, 0.3]], answers=[0], candidates=[[0.4, 0.3, 0.3]])
    records = extract_distractors(joined)
    assert len(records) == 2
    assert not any(r.is_poor for r in records)


def test_exact_boundary_not_poor():
    joined = make_joined([[0.5, 0.4, 0.1]], answers=[0], candidates=[[0.5, 0.4, 0.1]])
    records = extract_distractors(joined)
    boundary = next(r for r in records if r.option_index == 2)
    assert boundary.candidate_fraction == 0.1
    assert not boundary.is_poor


def test_extract_count_is_options_minus_one():
    joined = make_joined(
        [[0.25, 0.25, 0.25, 0.25], [0.5, 0.3, 0.2], [0.5, 0.5]],
        answers=[0, 1, 1],
    )
    assert len(extract_distractors(joined)) == 3 + 2 + 1


def test_extract_never_includes_answer():
    joined = make_joined([[0.25, 0.25, 0.25, 0.25]], answers=[2])
    assert all(r.option_index != 2 for r in extract_distractors(joined))


def test_extract_reshaped_requires_params():
    joined = make_joined([[0.5, 0.5]], answers=[0])
    with pytest.raises(ValueError, match="params"):
        extract_distractors(joined, "reshaped")
    records = extract_distractors(joined, "reshaped", ReshapeParams(alpha=0.0, tau=1.0))
    assert len(records) == 1


# ---------------------------------------------------------------------------
# PR curve and average precision
# ---------------------------------------------------------------------------


def test_pr_curve_hand_case():
    records = [rec(0.01, True), rec(0.05, False), rec(0.2, True), rec(0.4, False)]
    curve = pr_curve(records)
    assert curve.average_precision == pytest.approx((1.0 + 2.0 / 3.0) / 2.0, abs=1e-12)
    assert curve.prevalence == 0.5


def test_pr_curve_perfect_separation():
    records = [rec(0.01 * i, True) for i in range(1, 6)] + [rec(0.5 + 0.01 * i, False) for i in range(5)]
    assert pr_curve(records).average_precision == 1.0


def test_pr_curve_all_positive():
    records = [rec(0.1 * i, True) for i in range(1, 5)]
    curve = pr_curve(records)
    assert curve.average_precision == 1.0
    assert all(p == 1.0 for _, p in curve.points)


def test_pr_curve_errors():
    with pytest.raises(ValueError):
        pr_curve([])
    with pytest.raises(ValueError, match="undefined recall"):
        pr_curve([rec(0.2, False), rec(0.4, False)])


def test_recalls_nondecreasing_and_bounded():
    rng = np.random.default_rng(0)
    records = [rec(float(rng.random()), bool(rng.random() < 0.3), item=f"i{i}") for i in range(50)]
    if not any(r.is_poor for r in records):
        records[0] = rec(0.5, True)
    curve = pr_curve(records)
    recalls = [r for r, _ in curve.points]
    assert recalls == sorted(recalls)
    assert all(0.0 <= r <= 1.0 and 0.0 <= p <= 1.0 for r, p in curve.points)
    assert recalls[-1] == 1.0


def test_ap_matches_oracle_all_labelings_up_to_8():
    for n in range(1, 9):
        scores = [0.1 * (i + 1) for i in range(n)]
        for labels in itertools.product([False, True], repeat=n):
            if not any(labels):
                continue
            records = [rec(s, l, item=f"i{i}") for i, (s, l) in enumerate(zip(scores, labels))]
            got = pr_curve(records).average_precision
            assert got == pytest.approx(ap_oracle(scores, labels), abs=1e-12)


def test_worst_case_ap_closed_form():
    for n in range(2, 9):
        for n_pos in range(1, n):
            n_neg = n - n_pos
            # all negatives ranked ahead (lower scores) of all positives
            records = [rec(0.1 + 0.01 * i, False, item=f"n{i}") for i in range(n_neg)]
            records += [rec(0.5 + 0.01 * i, True, item=f"p{i}") for i in range(n_pos)]
            expected = sum(k / (n_neg + k) for k in range(1, n_pos + 1)) / n_pos
            assert pr_curve(records).average_precision == pytest.approx(expected, abs=1e-12)


def test_tie_block_permutation_invariance():
    rng = np.random.default_rng(1)
    base = [
        rec(0.2, True, item="a"),
        rec(0.2, False, item="b"),
        rec(0.2, True, item="c"),
        rec(0.5, False, item="d"),
        rec(0.5, True, item="e"),
    ]
    reference = pr_curve(base)
    for _ in range(20):
        shuffled = list(base)
        rng.shuffle(shuffled)
        curve = pr_curve(shuffled)
        assert curve.average_precision == reference.average_precision
        assert curve.points == reference.points


def test_expected_ap_over_shuffles_matches_enumeration():
    # Exact expectation for 6 records with 2 positives under a uniformly
    # random ranking: average over all positive-position pairs.
    n, n_pos = 6, 2
    scores = [0.1 * (i + 1) for i in range(n)]
    exact = np.mean(
        [
            ap_oracle(scores, [i in pos for i in range(n)])
            for pos in itertools.combinations(range(n), n_pos)
        ]
    )
    rng = np.random.default_rng(2)
    labels = [True, True, False, False, False, False]
    total = 0.0
    trials = 10_000
    for _ in range(trials):
        rng.shuffle(labels)
        records = [rec(s, l, item=f"i{i}") for i, (s, l) in enumerate(zip(scores, labels))]
        total += pr_curve(records).average_precision
    assert abs(total / trials - exact) < 0.02


def test_random_baseline_counting():
    records = [rec(0.1 * i, i < 2, item=f"i{i}") for i in range(10)]
    assert random_baseline(records) == 0.2
    assert random_baseline([rec(0.1, True), rec(0.2, True)]) == 1.0
    four = [rec(0.01, True), rec(0.05, False), rec(0.2, True), rec(0.4, False)]
    assert random_baseline(four) == 0.5
    with pytest.raises(ValueError):
        random_baseline([])


def test_flagged_report_sorted_by_score():
    records = [rec(0.5, False, item="b"), rec(0.1, True, item="a"), rec(0.3, False, item="c")]
    ranked = flagged_report(records)
    assert [r.model_probability for r in ranked] == [0.1, 0.3, 0.5]
