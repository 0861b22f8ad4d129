"""Split-conformal prediction sets for binary labels with APS scores."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConformalModel:
    alpha: float
    q_hat: float
    n_cal: int


@dataclass(frozen=True)
class PredictionSet:
    contains_yes: bool
    contains_no: bool

    @property
    def size(self) -> int:
        return int(self.contains_yes) + int(self.contains_no)

    def contains(self, label: int) -> bool:
        return self.contains_yes if label == 1 else self.contains_no


@dataclass(frozen=True)
class ConformalReport:
    alpha: float
    empirical_coverage: float
    mean_size: float
    singleton_fraction: float

    @property
    def target(self) -> float:
        return 1.0 - self.alpha

    @property
    def coverage_gap(self) -> float:
        return self.target - self.empirical_coverage


def nonconformity(p_yes: float, label: int) -> float:
    """APS score for the binary case: one minus the probability of the true label."""
    return 1.0 - p_yes if label == 1 else p_yes


def quantile_rank(n_cal: int, alpha: float) -> int:
    # ceil((n+1)(1-alpha)) with an ulp guard, e.g. 20 * 0.9 must give 18
    return min(math.ceil((n_cal + 1) * (1.0 - alpha) - 1e-9), n_cal)


def conformal_calibrate(p_yes_list: Sequence[float], labels: Sequence[int], alpha: float) -> ConformalModel:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if len(p_yes_list) != len(labels):
        raise ValueError("p_yes and labels must have equal lengths")
    n = len(p_yes_list)
    if n == 0:
        raise ValueError("empty calibration set")
    scores = np.sort([nonconformity(p, y) for p, y in zip(p_yes_list, labels)])
    k = quantile_rank(n, alpha)
    return ConformalModel(alpha=alpha, q_hat=float(scores[max(k, 1) - 1]), n_cal=n)


def conformal_predict(p_yes: float, model: ConformalModel) -> PredictionSet:
    return PredictionSet(contains_yes=1.0 - p_yes <= model.q_hat, contains_no=p_yes <= model.q_hat)


def conformal_report(sets: Sequence[PredictionSet], labels: Sequence[int], alpha: float) -> ConformalReport:
    if len(sets) != len(labels):
        raise ValueError("sets and labels must have equal lengths")
    n = len(sets)
    if n == 0:
        raise ValueError("no prediction sets to report on")
    covered = sum(s.contains(y) for s, y in zip(sets, labels))
    sizes = [s.size for s in sets]
    return ConformalReport(
        alpha=alpha,
        empirical_coverage=covered / n,
        mean_size=sum(sizes) / n,
        singleton_fraction=sum(1 for s in sizes if s == 1) / n,
    )
