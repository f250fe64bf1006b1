"""Inference adapter producing mcpretest-compatible probability files.

Runs an already-trained multiple-choice model over an item bank to export
per-option probabilities (full QOC input or context-free QO), and a 3-class
complexity classifier to export [p_easy, p_medium, p_hard] triples. Output
files follow the mcpretest predictions and complexity-probs schemas exactly;
no training happens here.
"""

__version__ = "0.1.0"

from .adapter import AdapterConfig, export_complexity_probs, export_predictions, read_items

__all__ = ["AdapterConfig", "export_complexity_probs", "export_predictions", "read_items", "__version__"]
