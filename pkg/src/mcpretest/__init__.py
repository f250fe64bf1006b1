"""Pre-test evaluation toolkit for multiple-choice exam items.

Fits the two-parameter reshaping that matches model option-probabilities to
real candidate selection behavior, measures the match with divergence
metrics, detects underperforming distractors, and computes readability and
complexity analytics. See README.md for the CLI and file formats.
"""

__version__ = "0.1.0"

from .bank import (
    CandidateDistribution,
    Item,
    JoinedBank,
    JoinedItem,
    PredictionSet,
    join,
    load_candidate_distributions,
    load_item_bank,
    load_predictions,
    write_candidate_distributions,
    write_item_bank,
    write_predictions,
)
from .distractors import DistractorRecord, PRCurve, extract_distractors, pr_curve, random_baseline
from .divergence import (
    DivergenceRow,
    aggregate_divergences,
    empirical_cdf,
    hellinger,
    kl_divergence,
    total_variation,
)
from .errors import BankValidationError, ParseError, PretestError
from .readability import (
    ComplexityProbs,
    TextStats,
    complexity_score,
    level_summary,
    readability_indices,
    text_stats,
)
from .reshape import (
    FitDiagnostics,
    LevelStats,
    ReshapeParams,
    fit_alpha,
    fit_params,
    fit_tau,
    mass_redistribute,
    mode_accuracy,
    reshape,
    temperature_anneal,
    true_class_probability,
)
from .synthetic import ModelDistortion, SynthConfig, gen_bank, gen_poor_distractors

__all__ = [
    "__version__",
    "BankValidationError",
    "CandidateDistribution",
    "ComplexityProbs",
    "DistractorRecord",
    "DivergenceRow",
    "FitDiagnostics",
    "Item",
    "JoinedBank",
    "JoinedItem",
    "LevelStats",
    "ModelDistortion",
    "PRCurve",
    "ParseError",
    "PredictionSet",
    "PretestError",
    "ReshapeParams",
    "SynthConfig",
    "TextStats",
    "aggregate_divergences",
    "complexity_score",
    "empirical_cdf",
    "extract_distractors",
    "fit_alpha",
    "fit_params",
    "fit_tau",
    "gen_bank",
    "gen_poor_distractors",
    "hellinger",
    "join",
    "kl_divergence",
    "level_summary",
    "load_candidate_distributions",
    "load_item_bank",
    "load_predictions",
    "mass_redistribute",
    "mode_accuracy",
    "pr_curve",
    "random_baseline",
    "readability_indices",
    "reshape",
    "temperature_anneal",
    "text_stats",
    "total_variation",
    "true_class_probability",
    "write_candidate_distributions",
    "write_item_bank",
    "write_predictions",
]
