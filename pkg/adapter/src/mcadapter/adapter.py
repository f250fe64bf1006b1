"""Batch inference over an item bank, emitting the toolkit's file formats.

Input assembly follows the standard multiple-choice encoder scheme: for the
full QOC variant each option is scored from the pair (context, question +
option) with context-side truncation; the QO variant drops the context string
entirely and scores (question, option). The complexity classifier consumes
the concatenation of context, question and all options.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import torch

VARIANTS = ("QOC", "QO")


@dataclass(frozen=True)
class AdapterConfig:
    model: str
    variant: str = "QOC"
    batch_size: int = 4
    max_length: int = 512
    device: str = "cpu"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.max_length < 8:
            raise ValueError("max_length must be at least 8")


@dataclass(frozen=True)
class BankItem:
    item_id: str
    context: str
    question: str
    options: tuple[str, ...]


def read_items(path: str | Path) -> list[BankItem]:
    """Read the toolkit's items file (JSON array or JSONL)."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        records = json.loads(text)
    else:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    items = []
    for rec in records:
        options = tuple(rec["options"])
        if len(options) < 2:
            raise ValueError(f"item {rec.get('item_id')!r} has fewer than 2 options")
        items.append(
            BankItem(
                item_id=str(rec["item_id"]),
                context=str(rec.get("context", "")),
                question=str(rec.get("question", "")),
                options=options,
            )
        )
    return items


def _atomic_write_json(doc: dict, path: str | Path) -> None:
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, indent=1)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _load_tokenizer_and(model_cls, config: AdapterConfig):
    from transformers import AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = model_cls.from_pretrained(config.model).to(config.device).eval()
    return tokenizer, model


def _option_pairs(item: BankItem, variant: str) -> list[tuple[str, str]]:
    if variant == "QOC":
        return [(item.context, f"{item.question} {option}") for option in item.options]
    return [(item.question, option) for option in item.options]


def export_predictions(items_path: str | Path, config: AdapterConfig, out_path: str | Path) -> dict:
    """Score every option of every item and write a predictions file.

    Returns the written document. Probabilities are the softmax of the
    model's per-option scores, so each entry sums to 1.
    """
    from transformers import AutoModelForMultipleChoice

    items = read_items(items_path)
    tokenizer, model = _load_tokenizer_and(AutoModelForMultipleChoice, config)
    torch.manual_seed(config.seed)
    truncation = "only_first" if config.variant == "QOC" else "longest_first"

    entries: dict[str, list[float]] = {}
    batch: list[BankItem] = []

    def flush(batch_items: list[BankItem]) -> None:
        if not batch_items:
            return
        n_options = len(batch_items[0].options)
        pairs = [pair for item in batch_items for pair in _option_pairs(item, config.variant)]
        try:
            encoded = tokenizer(
                pairs,
                truncation=truncation,
                max_length=config.max_length,
                padding=True,
                return_tensors="pt",
            )
        except Exception as exc:
            ids = ", ".join(item.item_id for item in batch_items)
            raise ValueError(
                f"over-length input: question+option exceeds max_length={config.max_length} "
                f"even with context-side truncation (items {ids})"
            ) from exc
        encoded = {k: v.view(len(batch_items), n_options, -1).to(config.device) for k, v in encoded.items()}
        with torch.no_grad():
            logits = model(**encoded).logits
        probs = torch.softmax(logits.float(), dim=-1).cpu()
        for item, row in zip(batch_items, probs):
            entries[item.item_id] = [float(x) for x in row]

    for item in items:
        if batch and (len(batch) >= config.batch_size or len(item.options) != len(batch[0].options)):
            flush(batch)
            batch = []
        batch.append(item)
    flush(batch)

    doc = {
        "variant": config.variant,
        "entries": entries,
        "metadata": {
            "model": str(config.model),
            "truncation": "context_only" if config.variant == "QOC" else "longest_first",
            "max_length": config.max_length,
            "seed": config.seed,
        },
    }
    _atomic_write_json(doc, out_path)
    return doc


def export_complexity_probs(items_path: str | Path, config: AdapterConfig, out_path: str | Path) -> dict:
    """Run the 3-class complexity classifier and write per-item triples."""
    from transformers import AutoModelForSequenceClassification

    items = read_items(items_path)
    tokenizer, model = _load_tokenizer_and(AutoModelForSequenceClassification, config)
    if model.config.num_labels != 3:
        raise ValueError(
            f"complexity classifier must have 3 labels, got {model.config.num_labels}"
        )
    torch.manual_seed(config.seed)

    triples: dict[str, list[float]] = {}
    for start in range(0, len(items), config.batch_size):
        chunk = items[start : start + config.batch_size]
        texts = [" ".join([item.context, item.question, *item.options]) for item in chunk]
        encoded = tokenizer(
            texts, truncation=True, max_length=config.max_length, padding=True, return_tensors="pt"
        ).to(config.device)
        with torch.no_grad():
            logits = model(**encoded).logits
        probs = torch.softmax(logits.float(), dim=-1).cpu()
        for item, row in zip(chunk, probs):
            triples[item.item_id] = [float(x) for x in row]

    _atomic_write_json(triples, out_path)
    return triples
