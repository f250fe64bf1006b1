import json
import os

import pytest
import torch

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")


@pytest.fixture(scope="session", autouse=True)
def _quiet_transformers():
    import transformers

    transformers.utils.logging.set_verbosity_error()
    transformers.utils.logging.disable_progress_bar()


@pytest.fixture(scope="session")
def tiny_models(tmp_path_factory):
    """Randomly initialized but seeded miniature models saved to disk.

    Stands in for a small published checkpoint: the sandbox has no model hub,
    and the export code path is identical either way.
    """
    from transformers import (
        ElectraConfig,
        ElectraForMultipleChoice,
        ElectraForSequenceClassification,
        ElectraTokenizer,
    )

    root = tmp_path_factory.mktemp("models")
    vocab = (
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
        + list("abcdefghijklmnopqrstuvwxyz")
        + ["##" + c for c in "abcdefghijklmnopqrstuvwxyz"]
        + ["the", "a", "what", "which", "about", "option", "passage", "mainly", "town", "river"]
    )
    vocab_file = root / "vocab.txt"
    vocab_file.write_text("\n".join(vocab), encoding="utf-8")
    tokenizer = ElectraTokenizer(str(vocab_file))

    def config(**extra):
        return ElectraConfig(
            vocab_size=len(vocab),
            embedding_size=16,
            hidden_size=32,
            num_hidden_layers=1,
            num_attention_heads=2,
            intermediate_size=37,
            max_position_embeddings=256,
            **extra,
        )

    torch.manual_seed(1234)
    mc_dir = root / "mc"
    ElectraForMultipleChoice(config()).save_pretrained(mc_dir)
    tokenizer.save_pretrained(mc_dir)

    torch.manual_seed(1234)
    cls_dir = root / "cls"
    ElectraForSequenceClassification(config(num_labels=3)).save_pretrained(cls_dir)
    tokenizer.save_pretrained(cls_dir)

    torch.manual_seed(1234)
    bad_dir = root / "cls2"
    ElectraForSequenceClassification(config(num_labels=2)).save_pretrained(bad_dir)
    tokenizer.save_pretrained(bad_dir)

    return {"mc": str(mc_dir), "cls": str(cls_dir), "cls_wrong_labels": str(bad_dir)}


@pytest.fixture(scope="session")
def toy_bank(tmp_path_factory):
    """A five-item bank plus matching candidate distributions."""
    root = tmp_path_factory.mktemp("bank")
    contexts = [
        "The town market opened before sunrise and sold fruit from nearby farms.",
        "A narrow river crossed the valley and powered the old mill.",
    ]
    items = []
    for i in range(5):
        items.append(
            {
                "item_id": f"toy{i}",
                "context_id": f"ctx{i % 2}",
                "context": contexts[i % 2],
                "question": f"What is the passage mainly about (question {i})?",
                "options": [
                    "It is mainly about the market.",
                    "It is mainly about the river.",
                    "It is mainly about the weather.",
                    "It is mainly about a school.",
                ],
                "answer_index": i % 4,
                "level": "B1",
            }
        )
    items_path = root / "items.jsonl"
    items_path.write_text("\n".join(json.dumps(rec) for rec in items) + "\n", encoding="utf-8")

    dists_path = root / "distributions.jsonl"
    dists_path.write_text(
        "\n".join(
            json.dumps({"item_id": rec["item_id"], "fractions": [0.25, 0.25, 0.25, 0.25]})
            for rec in items
        )
        + "\n",
        encoding="utf-8",
    )
    return {"items": str(items_path), "distributions": str(dists_path), "records": items}
