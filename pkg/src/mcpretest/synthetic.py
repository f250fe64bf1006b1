"""Seeded synthetic banks with known ground-truth relationships.

The sampler is a counter-based splitmix64: every draw is a pure function of
(seed, counter), uniforms are exact dyadic rationals built from 53 high bits,
and no transcendental math touches the sampling path, so identical configs
yield identical banks on any platform. Distribution transforms applied after
sampling (temperature distortion) do use the float math library.

The population model here is a test harness, not a claim about any real
candidate population: option-selection simplex points are normalized uniforms
tilted toward the keyed answer by an ability knob in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bank import CandidateDistribution, Item, PredictionSet, floor_probabilities

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed: int, counter: int) -> int:
    """The counter-th 64-bit output of the splitmix64 stream for this seed."""
    z = (seed + (counter + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class _Stream:
    """Sequential view over the counter-based generator."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.counter = 0

    def raw(self) -> int:
        value = splitmix64(self.seed, self.counter)
        self.counter += 1
        return value

    def u01(self) -> float:
        # (k + 0.5) / 2^53 for k in [0, 2^53): strictly inside (0, 1), exact.
        return ((self.raw() >> 11) + 0.5) / 9007199254740992.0

    def randint(self, n: int) -> int:
        return self.raw() % n

    def shuffled(self, values: list[int]) -> list[int]:
        out = list(values)
        for i in range(len(out) - 1, 0, -1):
            j = self.randint(i + 1)
            out[i], out[j] = out[j], out[i]
        return out


@dataclass(frozen=True)
class ModelDistortion:
    """How model predictions are derived from the candidate distributions.

    * ``none``: predictions equal the candidates.
    * ``temperature``: predictions are the candidates sharpened so that
      annealing them back with tau = value reproduces the candidates exactly;
      a fit on such a bank recovers tau = value.
    * ``redistribution``: predictions are the pre-image of the candidates
      under answer-mass blending with weight = value.
    * ``noise``: predictions are a (1 - value) : value mixture of the
      candidates with a fresh random simplex point.
    """

    kind: str = "none"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "temperature", "redistribution", "noise"):
            raise ValueError(f"unknown distortion kind {self.kind!r}")
        if self.kind == "temperature" and self.value <= 0:
            raise ValueError("temperature distortion needs a positive value")
        if self.kind == "redistribution" and not 0.0 <= self.value < 1.0:
            raise ValueError("redistribution distortion needs a value in [0, 1)")
        if self.kind == "noise" and not 0.0 <= self.value <= 1.0:
            raise ValueError("noise distortion needs a value in [0, 1]")


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    n_items: int
    options_per_item: int = 4
    ability: float = 0.5
    model_distortion: ModelDistortion = field(default_factory=ModelDistortion)
    levels: tuple[str, ...] = ("B1",)
    items_per_context: int = 6
    candidate_count: int = 250

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be at least 1")
        if self.options_per_item < 2:
            raise ValueError("options_per_item must be at least 2")
        if not 0.0 <= self.ability <= 1.0:
            raise ValueError("ability must be in [0, 1]")
        if not self.levels:
            raise ValueError("levels must be non-empty")
        if self.items_per_context < 1:
            raise ValueError("items_per_context must be at least 1")


_TOPIC_WORDS = (
    "rivers", "gardens", "markets", "travel", "weather", "music", "animals",
    "cooking", "painting", "bridges", "forests", "letters", "machines",
    "mountains", "harvests", "festivals",
)

_CONTEXT_SENTENCES = (
    "The town kept careful records of every season.",
    "People gathered early because the light was better then.",
    "Nobody remembered exactly when the custom started.",
    "The old building stood at the end of a narrow street.",
    "Visitors often asked about the strange name of the place.",
    "Each family had its own way of telling the story.",
    "The work was slow but the results lasted for years.",
    "Children learned the craft by watching their elders.",
)


def _make_item(stream: _Stream, config: SynthConfig, index: int, answer_index: int) -> Item:
    context_index = index // config.items_per_context
    topic = _TOPIC_WORDS[splitmix64(config.seed ^ 0xC0FFEE, context_index) % len(_TOPIC_WORDS)]
    sentence_a = _CONTEXT_SENTENCES[stream.randint(len(_CONTEXT_SENTENCES))]
    sentence_b = _CONTEXT_SENTENCES[stream.randint(len(_CONTEXT_SENTENCES))]
    options = tuple(
        f"It is mainly about {_TOPIC_WORDS[(stream.randint(len(_TOPIC_WORDS)))]} (choice {k})."
        for k in range(config.options_per_item)
    )
    return Item(
        item_id=f"synth-{index:05d}",
        context_id=f"ctx-{context_index:04d}",
        context=f"This passage is about {topic}. {sentence_a} {sentence_b}",
        question=f"What is the passage about (question {index})?",
        options=options,
        answer_index=answer_index,
        level=config.levels[index % len(config.levels)],
        candidate_count=config.candidate_count,
    )


def _simplex_point(stream: _Stream, k: int) -> np.ndarray:
    draws = np.array([stream.u01() for _ in range(k)])
    return draws / draws.sum()


def _tilt_toward_answer(base: np.ndarray, answer_index: int, ability: float) -> np.ndarray:
    tilted = (1.0 - ability) * base
    tilted[answer_index] += ability
    return tilted / tilted.sum()


def _distort(candidate: np.ndarray, answer_index: int, distortion: ModelDistortion, stream: _Stream) -> np.ndarray:
    if distortion.kind == "none":
        return candidate.copy()
    if distortion.kind == "temperature":
        sharpened = np.power(candidate, distortion.value)
        return sharpened / sharpened.sum()
    if distortion.kind == "redistribution":
        if candidate[answer_index] < distortion.value:
            raise ValueError(
                "redistribution distortion infeasible: candidate answer mass "
                f"{candidate[answer_index]:.4f} below weight {distortion.value}"
            )
        undone = candidate.copy()
        undone[answer_index] -= distortion.value
        undone /= 1.0 - distortion.value
        return undone / undone.sum()
    mixed = (1.0 - distortion.value) * candidate + distortion.value * _simplex_point(stream, candidate.size)
    return mixed / mixed.sum()


def gen_bank(config: SynthConfig) -> tuple[list[Item], list[CandidateDistribution], PredictionSet]:
    """Generate an aligned synthetic bank; identical configs give identical banks."""
    stream = _Stream(config.seed)
    items: list[Item] = []
    dists: list[CandidateDistribution] = []
    entries: dict[str, np.ndarray] = {}
    for i in range(config.n_items):
        k = config.options_per_item
        base = _simplex_point(stream, k)
        answer_index = stream.randint(k)
        candidate = _tilt_toward_answer(base, answer_index, config.ability)
        prediction = _distort(candidate, answer_index, config.model_distortion, stream)
        item = _make_item(stream, config, i, answer_index)
        items.append(item)
        dists.append(CandidateDistribution(item.item_id, candidate))
        entries[item.item_id] = floor_probabilities(prediction)
    return items, dists, PredictionSet(variant="QOC", entries=entries)


def gen_poor_distractors(
    config: SynthConfig, poor_rate: float
) -> tuple[list[Item], list[CandidateDistribution], PredictionSet]:
    """Generate a bank whose poor-distractor prevalence is controlled.

    Exactly round(poor_rate * total_distractors) distractors receive a
    candidate fraction strictly below the 10% threshold; all others sit
    strictly above it.
    """
    if not 0.0 <= poor_rate <= 1.0:
        raise ValueError("poor_rate must be in [0, 1]")
    n, k = config.n_items, config.options_per_item
    total = n * (k - 1)
    n_poor = round(poor_rate * total)
    base_quota, extra = divmod(n_poor, n)

    stream = _Stream(config.seed)
    items: list[Item] = []
    dists: list[CandidateDistribution] = []
    entries: dict[str, np.ndarray] = {}
    for i in range(n):
        quota = base_quota + (1 if i < extra else 0)
        answer_index = stream.randint(k)
        distractor_slots = [j for j in range(k) if j != answer_index]
        poor_slots = set(stream.shuffled(distractor_slots)[:quota])
        fractions = np.zeros(k)
        for j in distractor_slots:
            if j in poor_slots:
                fractions[j] = 0.01 + 0.08 * stream.u01()
            else:
                fractions[j] = 0.105 + 0.05 * stream.u01()
        remainder = 1.0 - fractions.sum()
        if remainder < 0.02:
            raise ValueError(
                f"infeasible poor_rate {poor_rate} for {k} options: "
                "non-poor distractors leave no mass for the answer"
            )
        fractions[answer_index] = remainder
        candidate = fractions / fractions.sum()
        prediction = _distort(candidate, answer_index, config.model_distortion, stream)
        item = _make_item(stream, config, i, answer_index)
        items.append(item)
        dists.append(CandidateDistribution(item.item_id, candidate))
        entries[item.item_id] = floor_probabilities(prediction)
    return items, dists, PredictionSet(variant="QOC", entries=entries)
