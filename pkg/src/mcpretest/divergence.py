"""Distances between candidate and model option-distributions, plus CDF points.

Conventions, fixed for determinism: the first argument ``p`` is the candidate
(true) distribution and ``q`` the model's; KL uses the natural log and the
0 * log(0/q) = 0 extension. Model-side zeros cannot occur after load-time
flooring, and the functions refuse them rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .bank import JoinedItem
from .reshape import ReshapeParams, _reshape_at


@dataclass(frozen=True)
class DivergenceRow:
    level: str
    kl: float
    hellinger: float
    total_variation: float
    n_items: int


def _check_pair(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """sum_i p_i * ln(p_i / q_i); requires q strictly positive."""
    p, q = _check_pair(p, q)
    if np.any(q <= 0.0):
        raise ValueError("kl_divergence requires strictly positive q (floor model probabilities first)")
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """(1/2) * sum_i |p_i - q_i|."""
    p, q = _check_pair(p, q)
    return float(0.5 * np.abs(p - q).sum())


def hellinger(p: np.ndarray, q: np.ndarray) -> float:
    """(1/sqrt 2) * sqrt(sum_i (sqrt p_i - sqrt q_i)^2)."""
    p, q = _check_pair(p, q)
    return float(np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / 2.0))


def aggregate_divergences(
    joined: Sequence[JoinedItem],
    source: Literal["model", "reshaped"],
    params: ReshapeParams | None = None,
    level: str = "",
) -> DivergenceRow:
    """Unweighted per-item mean of each divergence, candidate vs chosen model side."""
    if not joined:
        raise ValueError("cannot aggregate divergences over an empty item list")
    if source == "reshaped" and params is None:
        raise ValueError("source 'reshaped' requires fitted params")
    kls, hs, tvs = [], [], []
    for ji in joined:
        q = (
            ji.prediction
            if source == "model"
            else _reshape_at(ji.prediction, ji.item.answer_index, params.alpha, params.tau)
        )
        kls.append(kl_divergence(ji.candidate, q))
        hs.append(hellinger(ji.candidate, q))
        tvs.append(total_variation(ji.candidate, q))
    return DivergenceRow(
        level=level,
        kl=float(np.mean(kls)),
        hellinger=float(np.mean(hs)),
        total_variation=float(np.mean(tvs)),
        n_items=len(joined),
    )


def empirical_cdf(values: Sequence[float]) -> list[tuple[float, float]]:
    """Right-continuous step CDF: (threshold, cumulative fraction) per distinct value."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot build a CDF from no values")
    thresholds, counts = np.unique(arr, return_counts=True)
    cumulative = np.cumsum(counts) / arr.size
    return [(float(t), float(c)) for t, c in zip(thresholds, cumulative)]


def pooled_probabilities(
    joined: Sequence[JoinedItem],
    source: Literal["model", "candidate", "reshaped"],
    params: ReshapeParams | None = None,
) -> np.ndarray:
    """All probability values of one source pooled across items and options."""
    if source == "reshaped" and params is None:
        raise ValueError("source 'reshaped' requires fitted params")
    chunks = []
    for ji in joined:
        if source == "model":
            chunks.append(ji.prediction)
        elif source == "candidate":
            chunks.append(ji.candidate)
        else:
            chunks.append(_reshape_at(ji.prediction, ji.item.answer_index, params.alpha, params.tau))
    return np.concatenate(chunks) if chunks else np.empty(0)
