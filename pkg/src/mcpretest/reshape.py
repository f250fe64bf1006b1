"""Probability reshaping and test-level parameter fitting.

Two transforms shape model option-probabilities toward candidate behavior:

* mass redistribution: a convex blend with the delta on the keyed answer,
  weighted by ``alpha``;
* temperature annealing: componentwise ``p ** (1/tau)`` renormalized, which
  flattens (tau > 1) or sharpens (tau < 1) while preserving the argmax.

A single (alpha, tau) pair is fitted per test level so that the reshaped
probabilities match the candidates' mode accuracy and true class probability.
The fit is sequential and exact in the following sense: annealing never moves
the argmax, so mode accuracy depends on alpha alone; alpha is solved first by
a breakpoint scan, then tau by a dense log-grid with golden-section refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .bank import JoinedItem

Source = Literal["model", "candidate", "reshaped"]

TAU_MIN = 1e-2
TAU_MAX = 1e2
TAU_GRID_POINTS = 1000

# Added to each critical alpha so the answer strictly overtakes the previous
# argmax rather than tying with it.
ALPHA_NUDGE = 1e-9

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FitDiagnostics:
    target_accuracy: float
    achieved_accuracy: float
    target_tcp: float
    achieved_tcp: float
    accuracy_residual: float
    tcp_residual: float
    tau_at_boundary: bool = False


@dataclass(frozen=True)
class ReshapeParams:
    """Fitted reshaping weights for one test level."""

    alpha: float
    tau: float
    level: str = ""
    fit_diagnostics: FitDiagnostics | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class LevelStats:
    mode_accuracy: float
    true_class_prob: float
    n_items: int


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def mass_redistribute(p: np.ndarray, answer_index: int, alpha: float) -> np.ndarray:
    """Blend ``p`` with the delta on the answer: ``(1 - alpha) * p + alpha * delta``."""
    p = np.asarray(p, dtype=float)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if not 0 <= answer_index < p.size:
        raise ValueError(f"answer_index {answer_index} out of range for {p.size} options")
    out = (1.0 - alpha) * p
    out[answer_index] += alpha
    return out


def temperature_anneal(p: np.ndarray, tau: float) -> np.ndarray:
    """Rescale ``p`` to ``p ** (1/tau)`` and renormalize.

    Zero entries stay zero (the continuous extension of exp(log p / tau)), so a
    delta distribution is an exact fixed point for every tau. If the whole
    vector underflows (possible only for extreme sharpening), the tau -> 0
    limit is returned: all mass on the argmax, ties split evenly.
    """
    p = np.asarray(p, dtype=float)
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    powered = np.power(p, 1.0 / tau)
    total = powered.sum()
    if total == 0.0:
        top = p == p.max()
        return top / top.sum()
    return powered / total


def reshape(p: np.ndarray, answer_index: int, params: ReshapeParams) -> np.ndarray:
    """Apply both transforms: redistribute toward the answer, then anneal."""
    return temperature_anneal(mass_redistribute(p, answer_index, params.alpha), params.tau)


def _reshape_at(p: np.ndarray, answer_index: int, alpha: float, tau: float) -> np.ndarray:
    return temperature_anneal(mass_redistribute(p, answer_index, alpha), tau)


# ---------------------------------------------------------------------------
# summary statistics
# ---------------------------------------------------------------------------


def _resolve(joined: Sequence[JoinedItem], source: Source, params: ReshapeParams | None) -> list[np.ndarray]:
    if source == "model":
        return [ji.prediction for ji in joined]
    if source == "candidate":
        return [ji.candidate for ji in joined]
    if source == "reshaped":
        if params is None:
            raise ValueError("source 'reshaped' requires fitted params")
        return [
            _reshape_at(ji.prediction, ji.item.answer_index, params.alpha, params.tau)
            for ji in joined
        ]
    raise ValueError(f"unknown source {source!r}")


def mode_accuracy(joined: Sequence[JoinedItem], source: Source, params: ReshapeParams | None = None) -> float:
    """Fraction of items whose most probable option is the keyed answer.

    Argmax ties resolve to the lowest option index, for every source alike.
    """
    if not joined:
        raise ValueError("mode_accuracy of an empty item list is undefined")
    dists = _resolve(joined, source, params)
    hits = [int(np.argmax(d)) == ji.item.answer_index for d, ji in zip(dists, joined)]
    return float(np.mean(hits))


def true_class_probability(joined: Sequence[JoinedItem], source: Source, params: ReshapeParams | None = None) -> float:
    """Mean probability mass placed on the keyed answer."""
    if not joined:
        raise ValueError("true_class_probability of an empty item list is undefined")
    dists = _resolve(joined, source, params)
    return float(np.mean([d[ji.item.answer_index] for d, ji in zip(dists, joined)]))


def level_stats(joined: Sequence[JoinedItem], source: Source, params: ReshapeParams | None = None) -> LevelStats:
    return LevelStats(
        mode_accuracy=mode_accuracy(joined, source, params),
        true_class_prob=true_class_probability(joined, source, params),
        n_items=len(joined),
    )


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


def fit_alpha(joined: Sequence[JoinedItem], target_accuracy: float) -> float:
    """Smallest alpha in [0, 1] whose reshaped accuracy is closest to the target.

    Accuracy is a nondecreasing step function of alpha (annealing never moves
    the argmax, and redistribution only ever promotes the answer), so it
    suffices to scan the per-item critical points where the answer overtakes
    the strongest other option: (1-a)*p_max = (1-a)*p_ans + a.
    """
    if not joined:
        raise ValueError("cannot fit alpha on an empty item list")
    if not 0.0 <= target_accuracy <= 1.0:
        raise ValueError(f"target_accuracy must be in [0, 1], got {target_accuracy}")

    n = len(joined)
    base_correct = 0
    breakpoints: list[float] = []
    for ji in joined:
        p = ji.prediction
        ans = ji.item.answer_index
        if int(np.argmax(p)) == ans:
            base_correct += 1
            continue
        others = np.delete(p, ans)
        gap = float(others.max() - p[ans])  # >= 0 for items not already correct
        breakpoints.append(max(gap, 0.0) / (1.0 + max(gap, 0.0)))

    # Candidate alphas: 0, and each distinct breakpoint nudged past the tie.
    candidates = [(0.0, base_correct / n)]
    breakpoints.sort()
    for k, bp in enumerate(breakpoints, start=1):
        if k < len(breakpoints) and breakpoints[k] == bp:
            continue  # duplicate: only the last of an equal run carries the full count
        candidates.append((min(bp + ALPHA_NUDGE, 1.0), (base_correct + k) / n))

    best_alpha, best_resid = 0.0, abs(candidates[0][1] - target_accuracy)
    for alpha, acc in candidates[1:]:
        resid = abs(acc - target_accuracy)
        if resid < best_resid - 1e-15:
            best_alpha, best_resid = alpha, resid
    return best_alpha


def _prediction_blocks(joined: Sequence[JoinedItem], alpha: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Redistributed predictions stacked into per-option-count matrices."""
    by_k: dict[int, tuple[list[np.ndarray], list[int]]] = {}
    for ji in joined:
        rows, answers = by_k.setdefault(ji.item.n_options, ([], []))
        rows.append(mass_redistribute(ji.prediction, ji.item.answer_index, alpha))
        answers.append(ji.item.answer_index)
    return [
        (np.vstack(rows), np.asarray(answers, dtype=int))
        for rows, answers in by_k.values()
    ]


def _tcp_of_tau(blocks: Sequence[tuple[np.ndarray, np.ndarray]], n: int, tau: float) -> float:
    total = 0.0
    for matrix, answers in blocks:
        powered = np.power(matrix, 1.0 / tau)
        sums = powered.sum(axis=1)
        # Guard the underflow corner the scalar transform also handles.
        dead = sums == 0.0
        if np.any(dead):
            top = matrix[dead] == matrix[dead].max(axis=1, keepdims=True)
            powered[dead] = top / top.sum(axis=1, keepdims=True)
            sums[dead] = 1.0
        total += float((powered[np.arange(len(answers)), answers] / sums).sum())
    return total / n


def fit_tau(joined: Sequence[JoinedItem], alpha: float, target_tcp: float) -> float:
    """Tau minimizing |tcp(reshaped) - target| over a log grid, then refined.

    Deterministic: a 1000-point grid over log tau in [log 1e-2, log 1e2] picks
    the best bracket, and golden-section search narrows it. If the target is
    reached at several taus (possible only when answer mass is uncorrelated
    with the answers, so tcp barely moves with tau), the smallest grid
    minimizer wins.
    """
    if not joined:
        raise ValueError("cannot fit tau on an empty item list")
    if not 0.0 < target_tcp < 1.0:
        raise ValueError(f"target_tcp must be in (0, 1), got {target_tcp}")

    n = len(joined)
    blocks = _prediction_blocks(joined, alpha)

    def residual(log_tau: float) -> float:
        return abs(_tcp_of_tau(blocks, n, float(np.exp(log_tau))) - target_tcp)

    grid = np.linspace(np.log(TAU_MIN), np.log(TAU_MAX), TAU_GRID_POINTS)
    values = np.array([residual(x) for x in grid])
    best = int(np.argmin(values))

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, TAU_GRID_POINTS - 1)]
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = residual(x1), residual(x2)
    while hi - lo > 1e-12:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = residual(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = residual(x2)
    log_tau = 0.5 * (lo + hi)
    return float(np.exp(log_tau))


def fit_params(joined: Sequence[JoinedItem], level: str = "") -> ReshapeParams:
    """Fit (alpha, tau) so the reshaped model matches the candidates' acc and tcp."""
    if not joined:
        raise ValueError("cannot fit on an empty item list")
    target_acc = mode_accuracy(joined, "candidate")
    target_tcp = true_class_probability(joined, "candidate")
    alpha = fit_alpha(joined, target_acc)
    tau = fit_tau(joined, alpha, target_tcp)
    params = ReshapeParams(alpha=alpha, tau=tau, level=level)
    achieved_acc = mode_accuracy(joined, "reshaped", params)
    achieved_tcp = true_class_probability(joined, "reshaped", params)
    diagnostics = FitDiagnostics(
        target_accuracy=target_acc,
        achieved_accuracy=achieved_acc,
        target_tcp=target_tcp,
        achieved_tcp=achieved_tcp,
        accuracy_residual=abs(achieved_acc - target_acc),
        tcp_residual=abs(achieved_tcp - target_tcp),
        tau_at_boundary=bool(tau <= TAU_MIN * 1.01 or tau >= TAU_MAX * 0.99),
    )
    return ReshapeParams(alpha=alpha, tau=tau, level=level, fit_diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def params_to_record(params: ReshapeParams) -> dict:
    rec: dict = {"level": params.level, "alpha": params.alpha, "tau": params.tau}
    if params.fit_diagnostics is not None:
        d = params.fit_diagnostics
        rec["diagnostics"] = {
            "target_accuracy": d.target_accuracy,
            "achieved_accuracy": d.achieved_accuracy,
            "target_tcp": d.target_tcp,
            "achieved_tcp": d.achieved_tcp,
            "accuracy_residual": d.accuracy_residual,
            "tcp_residual": d.tcp_residual,
            "tau_at_boundary": d.tau_at_boundary,
        }
    return rec


def params_from_record(rec: dict) -> ReshapeParams:
    diagnostics = None
    if "diagnostics" in rec:
        diagnostics = FitDiagnostics(**rec["diagnostics"])
    return ReshapeParams(
        alpha=float(rec["alpha"]),
        tau=float(rec["tau"]),
        level=str(rec.get("level", "")),
        fit_diagnostics=diagnostics,
    )
