"""Uncertainty quantification for binary yes/no classifiers evaluated from logit logs."""

__version__ = "0.1.0"

from yesno_uq.records import PredictionRecord, SplitSpec, parse_records, read_records, split_calibration, write_records
from yesno_uq.metrics import ScoredPrediction, binary_entropy, calibration_metrics, reliability_bins, score

__all__ = [
    "PredictionRecord",
    "ScoredPrediction",
    "SplitSpec",
    "binary_entropy",
    "calibration_metrics",
    "parse_records",
    "read_records",
    "reliability_bins",
    "score",
    "split_calibration",
    "write_records",
]
