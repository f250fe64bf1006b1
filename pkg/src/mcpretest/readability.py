"""Text-complexity analytics: classic readability indices and the 3-class score.

Everything here is deterministic under one fixed tokenizer so that fixture
values are exact:

* sentences split on '.', '!' or '?' followed by whitespace or end of text;
* words split on whitespace, with non-alphanumeric edges stripped;
* characters count letters and digits only;
* syllables come from a vowel-group heuristic (clusters of aeiouy, silent
  trailing 'e' dropped unless it is the only cluster or follows consonant+l,
  minimum one), patched by a small versioned exceptions table.

Higher index values mean harder text throughout.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .bank import Item
from .errors import ParseError
from .wordlists import DALE_CHALL_FAMILIAR, SPACHE_FAMILIAR

INDEX_NAMES = (
    "flesch_kincaid_grade",
    "dale_chall",
    "ari",
    "coleman_liau",
    "gunning_fog",
    "spache",
    "linsear_write",
)

_SENTENCE_SPLIT = re.compile(r"[.!?]+(?=\s|$)")
_EDGE_PUNCT = re.compile(r"^[^0-9A-Za-z]+|[^0-9A-Za-z]+$")
_VOWEL_GROUPS = re.compile(r"[aeiouy]+")

# Words the vowel-group heuristic miscounts; versioned with the fixtures.
SYLLABLE_EXCEPTIONS = {
    "science": 2,
    "being": 2,
    "quiet": 2,
    "create": 2,
    "really": 3,
    "poem": 2,
    "doing": 2,
    "going": 2,
    "seeing": 2,
}


@dataclass(frozen=True)
class TextStats:
    sentences: int
    words: int
    characters: int
    syllables: int
    complex_words: int
    difficult_words_dale: int
    difficult_words_spache: int
    long_words_linsear: int


@dataclass(frozen=True)
class ComplexityProbs:
    """Easy/medium/hard class probabilities from an external classifier."""

    p_easy: float
    p_medium: float
    p_hard: float

    def __post_init__(self):
        total = self.p_easy + self.p_medium + self.p_hard
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"complexity probabilities must sum to 1, got {total}")
        if min(self.p_easy, self.p_medium, self.p_hard) < 0:
            raise ValueError("complexity probabilities must be nonnegative")


def count_syllables(word: str) -> int:
    """Syllables of one word under the fixed heuristic; never less than 1."""
    letters = "".join(c for c in word.lower() if c.isalpha())
    if not letters:
        return 1
    if letters in SYLLABLE_EXCEPTIONS:
        return SYLLABLE_EXCEPTIONS[letters]
    groups = _VOWEL_GROUPS.findall(letters)
    count = len(groups)
    if count > 1 and letters.endswith("e") and groups[-1] == "e":
        # Trailing silent 'e', except the consonant+le pattern (ta-ble, lit-tle).
        if not (len(letters) >= 3 and letters.endswith("le") and letters[-3] not in "aeiouy"):
            count -= 1
    return max(count, 1)


def _tokenize_words(text: str) -> list[str]:
    words = []
    for token in text.split():
        stripped = _EDGE_PUNCT.sub("", token)
        if stripped and any(c.isalnum() for c in stripped):
            words.append(stripped)
    return words


def _count_sentences(text: str) -> int:
    segments = _SENTENCE_SPLIT.split(text)
    return sum(1 for seg in segments if any(c.isalnum() for c in seg))


def text_stats(
    text: str,
    dale_familiar: frozenset[str] = DALE_CHALL_FAMILIAR,
    spache_familiar: frozenset[str] = SPACHE_FAMILIAR,
) -> TextStats:
    """Deterministic counts for one text; empty text yields all zeros."""
    words = _tokenize_words(text)
    syllable_counts = [count_syllables(w) for w in words]
    lowered = [w.lower() for w in words]
    n_long = sum(1 for s in syllable_counts if s >= 3)
    return TextStats(
        sentences=_count_sentences(text),
        words=len(words),
        characters=sum(sum(c.isalnum() for c in w) for w in words),
        syllables=sum(syllable_counts),
        complex_words=n_long,
        difficult_words_dale=sum(1 for w in lowered if w not in dale_familiar),
        difficult_words_spache=sum(1 for w in lowered if w not in spache_familiar),
        long_words_linsear=n_long,
    )


def readability_indices(stats: TextStats) -> dict[str, float]:
    """The seven classic indices from one set of text counts.

    Constants are the canonical published ones; see README for the exact
    formulas this implementation pins.
    """
    if stats.words < 1 or stats.sentences < 1:
        raise ValueError("readability indices need at least one word and one sentence")
    w, s = stats.words, stats.sentences
    words_per_sentence = w / s
    pct_difficult_dale = 100.0 * stats.difficult_words_dale / w
    pct_difficult_spache = 100.0 * stats.difficult_words_spache / w

    dale_chall = 0.1579 * pct_difficult_dale + 0.0496 * words_per_sentence
    if pct_difficult_dale > 5.0:
        dale_chall += 3.6365

    easy_words = w - stats.long_words_linsear
    provisional = (easy_words + 3.0 * stats.long_words_linsear) / s
    linsear = provisional / 2.0 if provisional > 20.0 else provisional / 2.0 - 1.0

    letters_per_100 = 100.0 * stats.characters / w
    sentences_per_100 = 100.0 * s / w

    return {
        "flesch_kincaid_grade": 0.39 * words_per_sentence + 11.8 * (stats.syllables / w) - 15.59,
        "dale_chall": dale_chall,
        "ari": 4.71 * (stats.characters / w) + 0.5 * words_per_sentence - 21.43,
        "coleman_liau": 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8,
        "gunning_fog": 0.4 * (words_per_sentence + 100.0 * stats.complex_words / w),
        "spache": 0.121 * words_per_sentence + 0.082 * pct_difficult_spache + 0.659,
        "linsear_write": linsear,
    }


def complexity_score(probs: ComplexityProbs) -> float:
    """Map [p_easy, p_medium, p_hard] to a 0-100 scale: 0, 50 and 100 weights."""
    total = probs.p_easy + probs.p_medium + probs.p_hard
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"complexity probabilities must sum to 1, got {total}")
    return 0.0 * probs.p_easy + 50.0 * probs.p_medium + 100.0 * probs.p_hard


def item_text(item: Item, unit: str = "full") -> str:
    """Text scored for one item: full concatenation or the context alone."""
    if unit == "context":
        return item.context
    if unit == "full":
        return " ".join([item.context, item.question, *item.options])
    raise ValueError(f"unknown text unit {unit!r}")


def load_complexity_probs(path: str | Path) -> dict[str, ComplexityProbs]:
    """Load a JSON map item_id -> [p_easy, p_medium, p_hard]."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    if not isinstance(data, dict):
        raise ValueError("complexity probabilities file must be a JSON object")
    out: dict[str, ComplexityProbs] = {}
    for item_id, triple in data.items():
        if not isinstance(triple, list) or len(triple) != 3:
            raise ValueError(f"[{item_id}]: expected a [p_easy, p_medium, p_hard] triple")
        out[str(item_id)] = ComplexityProbs(*(float(x) for x in triple))
    return out


@dataclass(frozen=True)
class SummaryCell:
    mean: float
    std: float
    n: int
    single_item: bool


def level_summary(scores_by_level: Mapping[str, Sequence[float]]) -> dict[str, SummaryCell]:
    """Per-level mean and sample (n-1) standard deviation of one metric."""
    out: dict[str, SummaryCell] = {}
    for level, scores in scores_by_level.items():
        values = np.asarray(list(scores), dtype=float)
        if values.size == 0:
            raise ValueError(f"level {level!r} has no scores")
        single = values.size == 1
        std = 0.0 if single else float(np.std(values, ddof=1))
        out[level] = SummaryCell(mean=float(values.mean()), std=std, n=int(values.size), single_item=single)
    return out
