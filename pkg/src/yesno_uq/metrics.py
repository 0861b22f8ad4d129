"""Per-prediction probability/entropy math and dataset-level calibration metrics.

Everything is in nats. A prediction with ``p_yes == 0.5`` is labelled "Yes".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

N_BINS = 15
NLL_EPS = 1e-12
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScoredPrediction:
    margin: float
    probability: float
    confidence: float
    predicted: int
    entropy: float
    label: int

    @property
    def correct(self) -> int:
        return int(self.predicted == self.label)


@dataclass(frozen=True)
class ReliabilityBin:
    lower: float
    upper: float
    count: int
    mean_confidence: float
    accuracy: float


@dataclass(frozen=True)
class CalibrationMetrics:
    ece: float
    brier: float
    nll: float
    accuracy: float


def sigmoid(x):
    """Logistic function, stable for large |x|; works on scalars and arrays."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def logit(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(p) - np.log1p(-p)
    return out if out.ndim else float(out)


def binary_entropy(p: float) -> float:
    """Shannon entropy of Bernoulli(p) in nats, with 0 ln 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    h = 0.0
    if p > 0.0:
        h -= p * math.log(p)
    if p < 1.0:
        h -= (1.0 - p) * math.log1p(-p)
    return h


def entropy_array(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("probabilities must be in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0.0, -p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
        b = np.where(p < 1.0, -(1.0 - p) * np.log1p(-np.where(p < 1.0, p, 0.0)), 0.0)
    return a + b


def from_probability(p: float, label: int, margin: float | None = None) -> ScoredPrediction:
    if margin is None:
        margin = logit(p)
    predicted = int(p >= 0.5)
    return ScoredPrediction(
        margin=float(margin),
        probability=float(p),
        confidence=max(p, 1.0 - p),
        predicted=predicted,
        entropy=binary_entropy(p),
        label=int(label),
    )


def score_margin(margin: float, label: int) -> ScoredPrediction:
    return from_probability(sigmoid(margin), label, margin)


def score(record) -> ScoredPrediction:
    """Single-pass softmax scoring of a record's yes/no logits."""
    return score_margin(record.logit_yes - record.logit_no, record.label)


def _arrays(preds: Sequence[ScoredPrediction]) -> tuple[np.ndarray, np.ndarray]:
    probs = np.fromiter((p.probability for p in preds), dtype=float, count=len(preds))
    labels = np.fromiter((p.label for p in preds), dtype=float, count=len(preds))
    return probs, labels


def bin_statistics(probs: np.ndarray, labels: np.ndarray, bins: int = N_BINS) -> list[ReliabilityBin]:
    """Equal-width confidence bins over [0, 1]; left-closed, last bin closed."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels)
    conf = np.maximum(probs, 1.0 - probs)
    hits = ((probs >= 0.5).astype(int) == labels).astype(float)
    idx = np.minimum(np.floor(conf * bins).astype(int), bins - 1)
    out = []
    for b in range(bins):
        mask = idx == b
        count = int(mask.sum())
        if count:
            mean_conf = float(conf[mask].mean())
            acc = float(hits[mask].mean())
        else:
            mean_conf = acc = 0.0
        out.append(ReliabilityBin(b / bins, (b + 1) / bins, count, mean_conf, acc))
    return out


def ece_from_bins(bins: Sequence[ReliabilityBin]) -> float:
    n = sum(b.count for b in bins)
    if n == 0:
        return 0.0
    total = 0.0
    for b in bins:
        if b.count:
            total += b.count / n * abs(b.accuracy - b.mean_confidence)
    return total


def ece_score(probs, labels, bins: int = N_BINS) -> float:
    return ece_from_bins(bin_statistics(probs, labels, bins))


def brier_score(probs, labels) -> float:
    probs = np.asarray(probs, dtype=float)
    return float(np.mean((probs - np.asarray(labels, dtype=float)) ** 2))


def nll_score(probs, labels) -> float:
    p = np.clip(np.asarray(probs, dtype=float), NLL_EPS, 1.0 - NLL_EPS)
    y = np.asarray(labels, dtype=float)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def accuracy_score(probs, labels) -> float:
    return float(np.mean((np.asarray(probs) >= 0.5).astype(int) == np.asarray(labels)))


def calibration_metrics(preds: Sequence[ScoredPrediction], bins: int = N_BINS) -> CalibrationMetrics:
    if len(preds) == 0:
        raise ValueError("calibration metrics need at least one prediction")
    probs, labels = _arrays(preds)
    return CalibrationMetrics(
        ece=ece_score(probs, labels, bins),
        brier=brier_score(probs, labels),
        nll=nll_score(probs, labels),
        accuracy=accuracy_score(probs, labels),
    )


def reliability_bins(preds: Sequence[ScoredPrediction], bins: int = N_BINS) -> list[ReliabilityBin]:
    probs, labels = _arrays(preds)
    return bin_statistics(probs, labels, bins)
