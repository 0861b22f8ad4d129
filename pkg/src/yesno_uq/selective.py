"""Risk-coverage analysis, joint entropy-threshold sweeps and the abstention gate."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from yesno_uq.metrics import LN2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvePoint:
    coverage: float
    selective_risk: float
    generalized_risk: float
    threshold: float


@dataclass(frozen=True)
class RiskCoverageCurve:
    points: tuple[CurvePoint, ...]
    n: int

    @property
    def coverages(self) -> np.ndarray:
        return np.array([p.coverage for p in self.points])

    @property
    def selective_risks(self) -> np.ndarray:
        return np.array([p.selective_risk for p in self.points])

    @property
    def generalized_risks(self) -> np.ndarray:
        return np.array([p.generalized_risk for p in self.points])


def _descending_order(scores: np.ndarray, tiebreak: np.ndarray | None) -> np.ndarray:
    if tiebreak is None:
        return np.argsort(-scores, kind="stable")
    # lexsort: last key is primary; stable on input order for full ties
    return np.lexsort((np.arange(len(scores)), -tiebreak, -scores))


def _prefix_risks(scores: np.ndarray, correct: np.ndarray, tiebreak) -> tuple[np.ndarray, np.ndarray]:
    tb = None if tiebreak is None else np.asarray(tiebreak, dtype=float)
    order = _descending_order(scores, tb)
    errors = np.cumsum(1 - correct[order])
    return order, errors / np.arange(1, scores.shape[0] + 1)


def aurc_score(scores, correct, tiebreak=None) -> float:
    """AURC straight from scores, without materializing the curve."""
    scores = np.asarray(scores, dtype=float)
    _, sel = _prefix_risks(scores, np.asarray(correct, dtype=int), tiebreak)
    return math.fsum(sel.tolist()) / scores.shape[0]


def augrc_score(scores, correct, tiebreak=None) -> float:
    scores = np.asarray(scores, dtype=float)
    n = scores.shape[0]
    _, sel = _prefix_risks(scores, np.asarray(correct, dtype=int), tiebreak)
    return math.fsum((sel * (np.arange(1, n + 1) / n)).tolist()) / n


def risk_coverage(scores, correct, tiebreak=None) -> RiskCoverageCurve:
    """Risk-coverage curve accepting the highest-scoring predictions first.

    Ties are broken by ``tiebreak`` (higher first) when given, then by input
    order, so the curve is fully deterministic.
    """
    scores = np.asarray(scores, dtype=float)
    correct = np.asarray(correct, dtype=int)
    if scores.shape != correct.shape:
        raise ValueError(f"length mismatch: {scores.shape[0]} scores vs {correct.shape[0]} outcomes")
    n = scores.shape[0]
    if n == 0:
        raise ValueError("risk-coverage curve needs at least one prediction")
    order, sel = _prefix_risks(scores, correct, tiebreak)
    coverage = np.arange(1, n + 1) / n
    points = tuple(
        CurvePoint(float(c), float(r), float(r * c), float(t))
        for c, r, t in zip(coverage, sel, scores[order])
    )
    return RiskCoverageCurve(points, n)


def aurc(curve: RiskCoverageCurve) -> float:
    """Mean selective risk over the n acceptance prefixes."""
    return math.fsum(p.selective_risk for p in curve.points) / curve.n


def augrc(curve: RiskCoverageCurve) -> float:
    """Mean generalized (joint) risk over the n acceptance prefixes."""
    return math.fsum(p.generalized_risk for p in curve.points) / curve.n


def coverage_at_risk(curve: RiskCoverageCurve, alpha: float) -> float:
    """Largest prefix coverage whose selective risk is at most ``alpha``; 0 if none."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    best = 0.0
    for p in curve.points:
        if p.selective_risk <= alpha:
            best = p.coverage
    return best


@dataclass(frozen=True)
class SweepRow:
    coverage: float
    n_retained: int
    tau: float
    error_rate: float
    flip_rate: float


def retained_count(coverage: float, n: int, rule: str = "round") -> int:
    x = coverage * n
    if rule == "round":
        # half-up; the small guard absorbs products like 0.9 * 861 landing an ulp off
        return int(math.floor(x + 0.5 + 1e-9))
    if rule == "ceil":
        return int(math.ceil(x - 1e-9))
    if rule == "floor":
        return int(math.floor(x + 1e-9))
    raise ValueError(f"unknown count rule {rule!r}")


def joint_threshold_sweep(entropies, correct, flipped, coverage_grid, count_rule: str = "round") -> list[SweepRow]:
    """Retain the lowest-entropy fraction at each coverage and report error and flip rates."""
    h = np.asarray(entropies, dtype=float)
    correct = np.asarray(correct, dtype=int)
    flipped = np.asarray(flipped, dtype=int)
    if not (h.shape == correct.shape == flipped.shape):
        raise ValueError("entropies, correct and flipped must have equal lengths")
    n = h.shape[0]
    order = np.argsort(h, kind="stable")
    rows = []
    for c in coverage_grid:
        if not 0.0 < c <= 1.0:
            raise ValueError(f"coverage must be in (0, 1], got {c}")
        k = min(retained_count(c, n, count_rule), n)
        if k == 0:
            logger.warning("coverage %s retains no records out of %d; skipped", c, n)
            continue
        keep = order[:k]
        rows.append(
            SweepRow(
                coverage=float(c),
                n_retained=k,
                tau=float(h[keep].max()),
                error_rate=float(1.0 - correct[keep].mean()),
                flip_rate=float(flipped[keep].mean()),
            )
        )
    return rows


class Tier(str, Enum):
    SINGLE_PASS = "single_pass"
    MULTI_PASS = "multi_pass"

    @classmethod
    def parse(cls, name: str) -> "Tier":
        aliases = {"single": cls.SINGLE_PASS, "1": cls.SINGLE_PASS, "multi": cls.MULTI_PASS, "2": cls.MULTI_PASS}
        return aliases.get(name) or cls(name)


@dataclass(frozen=True)
class GateConfig:
    entropy_threshold: float
    tier: Tier = Tier.SINGLE_PASS

    def __post_init__(self):
        if not 0.0 <= self.entropy_threshold <= LN2:
            raise ValueError(f"entropy threshold must lie in [0, ln 2], got {self.entropy_threshold}")


@dataclass(frozen=True)
class GateDecision:
    decision: str
    probability: float
    entropy: float

    @property
    def abstained(self) -> bool:
        return self.decision == "abstain"


def abstain(prediction, config: GateConfig) -> GateDecision:
    """Answer when the predictive entropy is at most the threshold, abstain otherwise.

    Accepts a ScoredPrediction (single pass) or an UncertaintyDecomposition
    (mean over passes).
    """
    if hasattr(prediction, "mean_probability"):
        prob, entropy = prediction.mean_probability, prediction.total
    else:
        prob, entropy = prediction.probability, prediction.entropy
    decision = "abstain" if entropy > config.entropy_threshold else "answer"
    return GateDecision(decision, float(prob), float(entropy))
