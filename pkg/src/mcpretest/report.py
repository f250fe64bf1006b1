"""Evaluation-report assembly and the CSV/JSON emitters the CLI writes.

Reports are pure functions of their inputs: identical inputs and config give
byte-identical files. Provenance records input digests, toolkit version and
the effective config; no wall-clock values appear anywhere.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .bank import Item, JoinedBank, JoinedItem
from .distractors import DistractorRecord, PRCurve, extract_distractors, flagged_report, pr_curve, random_baseline
from .divergence import aggregate_divergences, empirical_cdf, pooled_probabilities
from .readability import (
    INDEX_NAMES,
    ComplexityProbs,
    SummaryCell,
    complexity_score,
    item_text,
    level_summary,
    readability_indices,
    text_stats,
)
from .reshape import ReshapeParams, level_stats

PR_POINTS_FILE = "pr_points.csv"
CDF_POINTS_FILE = "cdf_points.csv"
FLAGGED_FILE = "flagged_distractors.csv"
TABLE3_FILE = "table3.csv"
TABLE4_FILE = "table4.csv"
TABLE6_FILE = "table6.csv"
REPORT_FILE = "report.json"


def sha256_of(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# report blocks
# ---------------------------------------------------------------------------


def accuracy_block(bank: JoinedBank) -> dict:
    """Per-level candidate vs model mode accuracy and true class probability."""
    block = {}
    for level in sorted(bank.levels):
        joined = bank.levels[level]
        cand = level_stats(joined, "candidate")
        model = level_stats(joined, "model")
        block[level] = {
            "n_items": cand.n_items,
            "candidate_accuracy": cand.mode_accuracy,
            "model_accuracy": model.mode_accuracy,
            "candidate_tcp": cand.true_class_prob,
            "model_tcp": model.true_class_prob,
        }
    return block


def matching_block(bank: JoinedBank, params_by_level: Mapping[str, ReshapeParams]) -> dict:
    """Raw vs reshaped accuracy/tcp and divergences per level."""
    block = {}
    for level in sorted(bank.levels):
        joined = bank.levels[level]
        raw_stats = level_stats(joined, "model")
        raw_div = aggregate_divergences(joined, "model", level=level)
        rows = {
            "raw": {
                "tau": 1.0,
                "alpha": 0.0,
                "accuracy": raw_stats.mode_accuracy,
                "tcp": raw_stats.true_class_prob,
                "kl": raw_div.kl,
                "hellinger": raw_div.hellinger,
                "total_variation": raw_div.total_variation,
            }
        }
        params = params_by_level.get(level)
        if params is not None:
            shaped_stats = level_stats(joined, "reshaped", params)
            shaped_div = aggregate_divergences(joined, "reshaped", params, level=level)
            rows["reshaped"] = {
                "tau": params.tau,
                "alpha": params.alpha,
                "accuracy": shaped_stats.mode_accuracy,
                "tcp": shaped_stats.true_class_prob,
                "kl": shaped_div.kl,
                "hellinger": shaped_div.hellinger,
                "total_variation": shaped_div.total_variation,
            }
        block[level] = rows
    return block


def detection_block(
    bank: JoinedBank,
    score_source: str,
    params_by_level: Mapping[str, ReshapeParams],
    per_level: bool = False,
) -> tuple[dict, dict[str, PRCurve], list[DistractorRecord]]:
    """Detection summary plus the PR curves and ranked records behind it.

    Scopes with no poor distractor are reported with a note instead of a
    curve, since recall is undefined there.
    """

    def records_for(level: str | None) -> list[DistractorRecord]:
        if level is None:
            items: list[JoinedItem] = bank.all_items()
            scoped = [(lvl, ji) for lvl in sorted(bank.levels) for ji in bank.levels[lvl]]
        else:
            scoped = [(level, ji) for ji in bank.levels[level]]
        out: list[DistractorRecord] = []
        for lvl, ji in scoped:
            params = params_by_level.get(lvl)
            if score_source == "reshaped" and params is None:
                raise ValueError(f"score source 'reshaped' needs fitted params for level {lvl}")
            out.extend(extract_distractors([ji], score_source, params))
        return out

    scopes = sorted(bank.levels) if per_level else [None]
    summary: dict = {"score_source": score_source, "mode": "per_level" if per_level else "global", "scopes": {}}
    curves: dict[str, PRCurve] = {}
    all_records: list[DistractorRecord] = []
    for scope in scopes:
        name = scope if scope is not None else "all"
        records = records_for(scope)
        all_records.extend(records)
        entry: dict = {"n_distractors": len(records), "n_poor": sum(r.is_poor for r in records)}
        if records and entry["n_poor"] > 0:
            curve = pr_curve(records)
            curves[name] = curve
            entry["average_precision"] = curve.average_precision
            entry["prevalence"] = curve.prevalence
            entry["random_baseline"] = random_baseline(records)
        else:
            entry["note"] = "undefined recall: no poor distractors in this scope"
        summary["scopes"][name] = entry
    summary["pr_points_path"] = PR_POINTS_FILE
    summary["flagged_path"] = FLAGGED_FILE
    return summary, curves, all_records


def readability_block(
    items_by_level: Mapping[str, Sequence[Item]],
    text_unit: str = "full",
    complexity_probs: Mapping[str, ComplexityProbs] | None = None,
) -> dict:
    """Table of mean +/- sample std per metric and level, deep score included
    when classifier probabilities are supplied."""
    per_metric: dict[str, dict[str, list[float]]] = {name: {} for name in INDEX_NAMES}
    deep: dict[str, list[float]] = {}
    for level in sorted(items_by_level):
        for item in items_by_level[level]:
            indices = readability_indices(text_stats(item_text(item, text_unit)))
            for name, value in indices.items():
                per_metric[name].setdefault(level, []).append(value)
            if complexity_probs is not None and item.item_id in complexity_probs:
                deep.setdefault(level, []).append(complexity_score(complexity_probs[item.item_id]))

    metrics: dict[str, dict[str, SummaryCell]] = {}
    if deep:
        metrics["deep"] = level_summary(deep)
    for name in INDEX_NAMES:
        if per_metric[name]:
            metrics[name] = level_summary(per_metric[name])

    return {
        "text_unit": text_unit,
        "metrics": {
            name: {
                level: {
                    "mean": cell.mean,
                    "std": cell.std,
                    "n": cell.n,
                    "single_item": cell.single_item,
                }
                for level, cell in sorted(cells.items())
            }
            for name, cells in metrics.items()
        },
    }


# ---------------------------------------------------------------------------
# file emitters
# ---------------------------------------------------------------------------


def write_table3_csv(block: dict, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "n_items", "candidate_accuracy", "model_accuracy", "candidate_tcp", "model_tcp"])
        for level in sorted(block):
            row = block[level]
            writer.writerow(
                [level, row["n_items"]]
                + [_fmt(row[k]) for k in ("candidate_accuracy", "model_accuracy", "candidate_tcp", "model_tcp")]
            )


def write_table4_csv(block: dict, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "variant", "tau", "alpha", "accuracy", "tcp", "kl", "hellinger", "total_variation"])
        for level in sorted(block):
            for variant in ("raw", "reshaped"):
                row = block[level].get(variant)
                if row is None:
                    continue
                writer.writerow(
                    [level, variant]
                    + [_fmt(row[k]) for k in ("tau", "alpha", "accuracy", "tcp", "kl", "hellinger", "total_variation")]
                )


def write_table6_csv(block: dict, path: Path) -> None:
    levels = sorted({level for cells in block["metrics"].values() for level in cells})
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["metric"]
        for level in levels:
            header += [f"{level}_mean", f"{level}_std"]
        writer.writerow(header)
        for name, cells in block["metrics"].items():
            row = [name]
            for level in levels:
                cell = cells.get(level)
                row += ["", ""] if cell is None else [_fmt(cell["mean"]), _fmt(cell["std"])]
            writer.writerow(row)


def write_pr_points_csv(curves: Mapping[str, PRCurve], path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scope", "recall", "precision"])
        for scope in sorted(curves):
            for recall, precision in curves[scope].points:
                writer.writerow([scope, _fmt(recall), _fmt(precision)])


def write_flagged_csv(records: Sequence[DistractorRecord], path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "option_index", "score", "candidate_fraction", "is_poor"])
        for rec in flagged_report(records):
            writer.writerow(
                [rec.item_id, rec.option_index, _fmt(rec.model_probability), _fmt(rec.candidate_fraction), int(rec.is_poor)]
            )


def write_cdf_points_csv(
    bank: JoinedBank, params_by_level: Mapping[str, ReshapeParams], path: Path
) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "source", "threshold", "cumulative_fraction"])
        for level in sorted(bank.levels):
            joined = bank.levels[level]
            sources: list[tuple[str, ReshapeParams | None]] = [("candidate", None), ("model", None)]
            params = params_by_level.get(level)
            if params is not None:
                sources.append(("reshaped", params))
            for source, p in sources:
                for threshold, fraction in empirical_cdf(pooled_probabilities(joined, source, p)):
                    writer.writerow([level, source, _fmt(threshold), _fmt(fraction)])


def build_report(
    bank: JoinedBank,
    params_by_level: Mapping[str, ReshapeParams],
    inputs: Mapping[str, str],
    config: Mapping[str, object],
    score_source: str = "raw",
    per_level_detection: bool = False,
    text_unit: str = "full",
    complexity_probs: Mapping[str, ComplexityProbs] | None = None,
) -> tuple[dict, dict[str, PRCurve], list[DistractorRecord]]:
    """Assemble the full report dict plus the data behind its side files."""
    detection, curves, records = detection_block(bank, score_source, params_by_level, per_level_detection)
    report = {
        "provenance": {
            "toolkit_version": __version__,
            "inputs": {name: {"path": str(p), "sha256": sha256_of(p)} for name, p in inputs.items()},
            "config": dict(config),
        },
        "level_counts": bank.level_counts(),
        "table3": accuracy_block(bank),
        "table4": matching_block(bank, params_by_level),
        "detection": detection,
        "readability": readability_block(
            {lvl: [ji.item for ji in joined] for lvl, joined in bank.levels.items()},
            text_unit,
            complexity_probs,
        ),
        "cdf_points_path": CDF_POINTS_FILE,
    }
    return report, curves, records


def write_report_files(
    out_dir: str | Path,
    report: dict,
    curves: Mapping[str, PRCurve],
    records: Sequence[DistractorRecord],
    bank: JoinedBank,
    params_by_level: Mapping[str, ReshapeParams],
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / REPORT_FILE).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    write_table3_csv(report["table3"], out / TABLE3_FILE)
    write_table4_csv(report["table4"], out / TABLE4_FILE)
    write_table6_csv(report["readability"], out / TABLE6_FILE)
    write_pr_points_csv(curves, out / PR_POINTS_FILE)
    write_flagged_csv(records, out / FLAGGED_FILE)
    write_cdf_points_csv(bank, params_by_level, out / CDF_POINTS_FILE)
