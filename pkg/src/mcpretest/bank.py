"""Item banks, candidate distributions, model predictions: types, IO, validation, join.

File formats (all UTF-8 JSON):

* items file: an array of records, or one record per line (JSONL).
  Record: ``{item_id, context_id, context, question, options[], answer_index,
  level, discrimination?[], candidate_count?}``.
* distributions file: array or JSONL of ``{item_id, fractions[]}``.
* predictions file: a single object ``{variant: "QOC"|"QO", entries: {item_id: [p...]}}``.
  Unknown extra top-level keys (e.g. exporter metadata) are ignored.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BankValidationError, LowCandidateCountWarning, ParseError

DEFAULT_LEVELS = ("B1", "B2", "C1", "C2")

# Model probabilities are clamped here at load time so that logarithms taken
# downstream are always defined.
PROB_FLOOR = 1e-10

# Unit-sum slack accepted from files; vectors are renormalized after the check.
SUM_TOLERANCE = 1e-6

# Pretest convention: items answered by fewer candidates get a warning.
MIN_CANDIDATE_COUNT = 100

PREDICTION_VARIANTS = ("QOC", "QO")


@dataclass(frozen=True)
class Item:
    """One multiple-choice question."""

    item_id: str
    context_id: str
    context: str
    question: str
    options: tuple[str, ...]
    answer_index: int
    level: str
    discrimination: tuple[float, ...] | None = None
    candidate_count: int | None = None

    @property
    def n_options(self) -> int:
        return len(self.options)


@dataclass(frozen=True)
class CandidateDistribution:
    """Fraction of candidates selecting each option of one item."""

    item_id: str
    fractions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "fractions", np.asarray(self.fractions, dtype=float))


@dataclass(frozen=True)
class PredictionSet:
    """Model option-probabilities per item, tagged with the input variant."""

    variant: str
    entries: dict[str, np.ndarray]


@dataclass(frozen=True)
class JoinedItem:
    """An item aligned with its candidate distribution and model probabilities."""

    item: Item
    candidate: np.ndarray
    prediction: np.ndarray


@dataclass(frozen=True)
class JoinedBank:
    """Per-level aligned triples plus a report of anything that failed to align."""

    levels: dict[str, list[JoinedItem]]
    missing_distributions: tuple[str, ...] = ()
    missing_predictions: tuple[str, ...] = ()
    unmatched_distribution_ids: tuple[str, ...] = ()
    unmatched_prediction_ids: tuple[str, ...] = ()

    @property
    def n_items(self) -> int:
        return sum(len(v) for v in self.levels.values())

    def level_counts(self) -> dict[str, int]:
        return {level: len(items) for level, items in self.levels.items()}

    def all_items(self) -> list[JoinedItem]:
        out: list[JoinedItem] = []
        for level in sorted(self.levels):
            out.extend(self.levels[level])
        return out


# ---------------------------------------------------------------------------
# record-level parsing/validation
# ---------------------------------------------------------------------------


def _read_records(path: str | Path) -> list[tuple[object, str]]:
    """Read an array-style or line-delimited JSON file into (record, locator) pairs."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if not stripped:
        return []
    if stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
        if not isinstance(data, list):
            raise ParseError("expected a JSON array of records", "top level")
        return [(rec, f"record {i}") for i, rec in enumerate(data)]
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append((json.loads(line), f"line {lineno}"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {lineno}") from exc
    return records


def _item_from_record(rec: object, locator: str, allowed_levels: Iterable[str] | None) -> tuple[Item | None, list[str]]:
    findings: list[str] = []
    if not isinstance(rec, dict):
        return None, [f"{locator}: item record must be a JSON object"]
    try:
        item_id = str(rec["item_id"])
        options = rec["options"]
        answer_index = rec["answer_index"]
        level = str(rec["level"])
    except KeyError as exc:
        return None, [f"{locator}: missing required field {exc.args[0]!r}"]

    if not isinstance(options, list) or len(options) < 2:
        findings.append(f"{locator} [{item_id}]: options must be a list of length >= 2")
        return None, findings
    if any(not isinstance(o, str) or not o for o in options):
        findings.append(f"{locator} [{item_id}]: option texts must be non-empty strings")
    if not isinstance(answer_index, int) or isinstance(answer_index, bool):
        findings.append(f"{locator} [{item_id}]: answer_index must be an integer")
        return None, findings
    if not (0 <= answer_index < len(options)):
        findings.append(
            f"{locator} [{item_id}]: answer_index {answer_index} out of range for {len(options)} options"
        )
    if allowed_levels is not None and level not in allowed_levels:
        findings.append(f"{locator} [{item_id}]: unknown level {level!r}")

    discrimination = rec.get("discrimination")
    if discrimination is not None:
        if not isinstance(discrimination, list) or len(discrimination) != len(options):
            findings.append(f"{locator} [{item_id}]: discrimination must list one value per option")
            discrimination = None
        else:
            discrimination = tuple(float(x) for x in discrimination)

    candidate_count = rec.get("candidate_count")
    if candidate_count is not None:
        if not isinstance(candidate_count, int) or candidate_count <= 0:
            findings.append(f"{locator} [{item_id}]: candidate_count must be a positive integer")
            candidate_count = None

    if findings:
        return None, findings
    return (
        Item(
            item_id=item_id,
            context_id=str(rec.get("context_id", "")),
            context=str(rec.get("context", "")),
            question=str(rec.get("question", "")),
            options=tuple(options),
            answer_index=answer_index,
            level=level,
            discrimination=discrimination,
            candidate_count=candidate_count,
        ),
        [],
    )


def scan_items(path: str | Path, allowed_levels: Iterable[str] | None = DEFAULT_LEVELS) -> tuple[list[Item], list[str]]:
    """Parse an items file, returning all loadable items and every violation found."""
    allowed = frozenset(allowed_levels) if allowed_levels is not None else None
    items: list[Item] = []
    findings: list[str] = []
    seen: set[str] = set()
    for rec, locator in _read_records(path):
        item, item_findings = _item_from_record(rec, locator, allowed)
        findings.extend(item_findings)
        if item is None:
            continue
        if item.item_id in seen:
            findings.append(f"{locator} [{item.item_id}]: duplicate item_id")
            continue
        seen.add(item.item_id)
        items.append(item)
    return items, findings


def load_item_bank(path: str | Path, allowed_levels: Iterable[str] | None = DEFAULT_LEVELS) -> list[Item]:
    """Load and validate an items file, raising on the violations scan_items reports."""
    items, findings = scan_items(path, allowed_levels)
    if findings:
        raise BankValidationError("; ".join(findings))
    for item in items:
        if item.candidate_count is not None and item.candidate_count < MIN_CANDIDATE_COUNT:
            warnings.warn(
                f"item {item.item_id}: answered by only {item.candidate_count} candidates "
                f"(pretest convention is at least {MIN_CANDIDATE_COUNT})",
                LowCandidateCountWarning,
                stacklevel=2,
            )
    return items


def low_candidate_count_findings(items: Sequence[Item]) -> list[str]:
    """Warning-level findings for items pretested on few candidates."""
    return [
        f"[{it.item_id}]: candidate_count {it.candidate_count} below {MIN_CANDIDATE_COUNT}"
        for it in items
        if it.candidate_count is not None and it.candidate_count < MIN_CANDIDATE_COUNT
    ]


def scan_candidate_distributions(path: str | Path) -> tuple[list[CandidateDistribution], list[str]]:
    """Parse a distributions file; vectors are renormalized to exact unit sum."""
    dists: list[CandidateDistribution] = []
    findings: list[str] = []
    for rec, locator in _read_records(path):
        if not isinstance(rec, dict) or "item_id" not in rec or "fractions" not in rec:
            findings.append(f"{locator}: distribution record needs item_id and fractions")
            continue
        item_id = str(rec["item_id"])
        fractions = np.asarray(rec["fractions"], dtype=float)
        if fractions.ndim != 1 or fractions.size < 2:
            findings.append(f"{locator} [{item_id}]: fractions must be a flat list of length >= 2")
            continue
        if np.any(fractions < 0):
            findings.append(f"{locator} [{item_id}]: negative fraction")
            continue
        total = float(fractions.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            findings.append(f"{locator} [{item_id}]: fractions sum to {total:.8f}, not 1")
            continue
        dists.append(CandidateDistribution(item_id, fractions / total))
    return dists, findings


def load_candidate_distributions(path: str | Path) -> list[CandidateDistribution]:
    dists, findings = scan_candidate_distributions(path)
    if findings:
        raise BankValidationError("; ".join(findings))
    return dists


def floor_probabilities(p: np.ndarray, floor: float = PROB_FLOOR) -> np.ndarray:
    """Clamp probabilities away from zero and renormalize to unit sum."""
    clamped = np.maximum(np.asarray(p, dtype=float), floor)
    return clamped / clamped.sum()


def scan_predictions(path: str | Path) -> tuple[PredictionSet | None, list[str]]:
    """Parse a predictions file; probabilities are floored and renormalized."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    findings: list[str] = []
    if not isinstance(data, dict):
        return None, ["top level: predictions file must be a JSON object"]
    variant = data.get("variant")
    if variant not in PREDICTION_VARIANTS:
        findings.append(f"variant must be one of {PREDICTION_VARIANTS}, got {variant!r}")
    entries_raw = data.get("entries")
    if not isinstance(entries_raw, dict):
        findings.append("entries must map item_id to a probability vector")
        return None, findings
    entries: dict[str, np.ndarray] = {}
    for item_id, probs in entries_raw.items():
        vec = np.asarray(probs, dtype=float)
        if vec.ndim != 1 or vec.size < 2:
            findings.append(f"[{item_id}]: probability vector must be a flat list of length >= 2")
            continue
        if np.any(vec < 0):
            findings.append(f"[{item_id}]: negative probability")
            continue
        total = float(vec.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            findings.append(f"[{item_id}]: probabilities sum to {total:.8f}, not 1")
            continue
        entries[str(item_id)] = floor_probabilities(vec)
    if findings:
        return None, findings
    return PredictionSet(variant=str(variant), entries=entries), []


def load_predictions(path: str | Path) -> PredictionSet:
    preds, findings = scan_predictions(path)
    if findings or preds is None:
        raise BankValidationError("; ".join(findings) or "empty predictions file")
    return preds


# ---------------------------------------------------------------------------
# join
# ---------------------------------------------------------------------------


def join(
    items: Sequence[Item],
    candidate_dists: Sequence[CandidateDistribution],
    predictions: PredictionSet,
    strict: bool = False,
) -> JoinedBank:
    """Align items, distributions and predictions by item_id and group by level.

    Length mismatches are always errors; missing members drop the item unless
    ``strict``, in which case they raise with the offending ids listed.
    """
    dist_by_id = {d.item_id: d for d in candidate_dists}
    if len(dist_by_id) != len(candidate_dists):
        raise BankValidationError("duplicate item_id among candidate distributions")
    item_ids = {it.item_id for it in items}

    missing_dists = tuple(it.item_id for it in items if it.item_id not in dist_by_id)
    missing_preds = tuple(it.item_id for it in items if it.item_id not in predictions.entries)
    unmatched_dists = tuple(sorted(set(dist_by_id) - item_ids))
    unmatched_preds = tuple(sorted(set(predictions.entries) - item_ids))

    if strict:
        problems = []
        if missing_dists:
            problems.append(f"items without candidate distribution: {list(missing_dists)}")
        if missing_preds:
            problems.append(f"items without prediction: {list(missing_preds)}")
        if unmatched_dists:
            problems.append(f"distributions for unknown items: {list(unmatched_dists)}")
        if unmatched_preds:
            problems.append(f"predictions for unknown items: {list(unmatched_preds)}")
        if problems:
            raise BankValidationError("; ".join(problems))

    levels: dict[str, list[JoinedItem]] = {}
    for item in items:
        dist = dist_by_id.get(item.item_id)
        pred = predictions.entries.get(item.item_id)
        if dist is None or pred is None:
            continue
        if dist.fractions.size != item.n_options:
            raise BankValidationError(
                f"item {item.item_id}: candidate distribution has {dist.fractions.size} "
                f"entries but the item has {item.n_options} options"
            )
        if pred.size != item.n_options:
            raise BankValidationError(
                f"item {item.item_id}: prediction vector has {pred.size} "
                f"entries but the item has {item.n_options} options"
            )
        levels.setdefault(item.level, []).append(
            JoinedItem(item=item, candidate=dist.fractions, prediction=pred)
        )
    return JoinedBank(
        levels=levels,
        missing_distributions=missing_dists,
        missing_predictions=missing_preds,
        unmatched_distribution_ids=unmatched_dists,
        unmatched_prediction_ids=unmatched_preds,
    )


# ---------------------------------------------------------------------------
# writers (round-trip counterparts of the loaders)
# ---------------------------------------------------------------------------


def _item_record(item: Item) -> dict:
    rec: dict = {
        "item_id": item.item_id,
        "context_id": item.context_id,
        "context": item.context,
        "question": item.question,
        "options": list(item.options),
        "answer_index": item.answer_index,
        "level": item.level,
    }
    if item.discrimination is not None:
        rec["discrimination"] = list(item.discrimination)
    if item.candidate_count is not None:
        rec["candidate_count"] = item.candidate_count
    return rec


def write_item_bank(items: Sequence[Item], path: str | Path) -> None:
    """Write items as JSONL, one record per line."""
    lines = [json.dumps(_item_record(it), ensure_ascii=False) for it in items]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_candidate_distributions(dists: Sequence[CandidateDistribution], path: str | Path) -> None:
    lines = [
        json.dumps({"item_id": d.item_id, "fractions": [float(x) for x in d.fractions]})
        for d in dists
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_predictions(predictions: PredictionSet, path: str | Path, metadata: Mapping[str, object] | None = None) -> None:
    doc: dict = {
        "variant": predictions.variant,
        "entries": {k: [float(x) for x in v] for k, v in predictions.entries.items()},
    }
    if metadata:
        doc["metadata"] = dict(metadata)
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=1), encoding="utf-8")
