"""Entropy decomposition and multi-sample aggregation (MC dropout passes, ensemble members).

The same decomposition serves both pathways: ensemble members and dropout
passes are just different sources of per-sample probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from yesno_uq.metrics import binary_entropy, calibration_metrics, from_probability, score_margin, sigmoid
from yesno_uq.selective import aurc, risk_coverage


class Strategy(str, Enum):
    PROBABILITY_AVERAGE = "probability_average"
    LOGIT_AVERAGE = "logit_average"
    MAJORITY_VOTE = "majority_vote"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        aliases = {"prob": cls.PROBABILITY_AVERAGE, "logit": cls.LOGIT_AVERAGE, "vote": cls.MAJORITY_VOTE}
        if name in aliases:
            return aliases[name]
        return cls(name)


@dataclass(frozen=True)
class UncertaintyDecomposition:
    mean_probability: float
    total: float
    aleatoric: float
    epistemic: float

    @property
    def ratio(self) -> float:
        return self.epistemic / self.total if self.total > 0 else 0.0


@dataclass(frozen=True)
class MemberDiagnostics:
    seed: int
    accuracy: float
    ece: float
    brier: float
    nll: float
    aurc: float


def decompose(probabilities: Sequence[float]) -> UncertaintyDecomposition:
    """Split the entropy of the mean prediction into expected entropy and mutual information."""
    probs = [float(p) for p in probabilities]
    if len(probs) < 2:
        raise ValueError("decomposition needs at least two samples")
    for p in probs:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of range: {p}")
    if all(p == probs[0] for p in probs):
        # exact zero MI; a float mean of identical values can drift by an ulp
        h = binary_entropy(probs[0])
        return UncertaintyDecomposition(probs[0], h, h, 0.0)
    p_bar = min(max(math.fsum(probs) / len(probs), 0.0), 1.0)
    total = binary_entropy(p_bar)
    aleatoric = math.fsum(binary_entropy(p) for p in probs) / len(probs)
    return UncertaintyDecomposition(p_bar, total, aleatoric, total - aleatoric)


def decompose_margins(margins: Sequence[float]) -> UncertaintyDecomposition:
    return decompose(np.atleast_1d(sigmoid(np.asarray(margins, dtype=float))).tolist())


def aggregate(member_logits: Sequence[tuple[float, float]], strategy: Strategy | str, label: int = 0):
    """Combine member (or pass) logit pairs into one scored prediction."""
    if len(member_logits) == 0:
        raise ValueError("cannot aggregate an empty member list")
    strategy = Strategy.parse(strategy) if isinstance(strategy, str) else strategy
    margins = np.array([yes - no for yes, no in member_logits], dtype=float)
    if strategy is Strategy.PROBABILITY_AVERAGE:
        p = float(np.mean(np.atleast_1d(sigmoid(margins))))
        return from_probability(min(max(p, 0.0), 1.0), label)
    if strategy is Strategy.LOGIT_AVERAGE:
        return score_margin(float(np.mean(margins)), label)
    if strategy is Strategy.MAJORITY_VOTE:
        yes_votes = int(np.sum(margins >= 0.0))
        return from_probability(yes_votes / len(margins), label)
    raise ValueError(f"unknown strategy {strategy!r}")


def disagreement_matrix(predictions) -> np.ndarray:
    """Pairwise fraction of records on which two members predict different labels.

    ``predictions`` is an n x M array-like of 0/1 member predictions.
    """
    rows = list(predictions)
    if not rows:
        raise ValueError("need at least one record")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged prediction matrix")
    P = np.asarray(rows, dtype=int)
    n = P.shape[0]
    diff = (P[:, :, None] != P[:, None, :]).sum(axis=0)
    return diff / n


def check_member_layout(records) -> tuple[int, ...]:
    seeds = None
    for rec in records:
        if not rec.members:
            raise ValueError(f"record {rec.id!r} has no ensemble members")
        if seeds is None:
            seeds = rec.member_seeds
        elif rec.member_seeds != seeds:
            raise ValueError(f"record {rec.id!r} has member seeds {rec.member_seeds}, expected {seeds}")
    if seeds is None:
        raise ValueError("no records")
    return seeds


def member_diagnostics(records) -> list[MemberDiagnostics]:
    seeds = check_member_layout(records)
    out = []
    for k, seed in enumerate(seeds):
        preds = [score_margin(rec.members[k].margin, rec.label) for rec in records]
        cm = calibration_metrics(preds)
        curve = risk_coverage([p.confidence for p in preds], [p.correct for p in preds])
        out.append(MemberDiagnostics(seed, cm.accuracy, cm.ece, cm.brier, cm.nll, aurc(curve)))
    return out


def member_predictions(records) -> np.ndarray:
    check_member_layout(records)
    return np.array([[int(m.margin >= 0.0) for m in rec.members] for rec in records], dtype=int)
