"""Bootstrap intervals, paired bootstrap tests, Mann-Whitney U and AUROC.

Resampling uses numpy's PCG64 generator (``numpy.random.default_rng``), whose
stream is specified and reproducible across platforms for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import rankdata

EXACT_MAX_GROUP = 20


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 2000
    seed: int = 0
    ci_level: float = 0.95

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must be in (0, 1)")


@dataclass(frozen=True)
class ConfidenceInterval:
    estimate: float
    lower: float
    upper: float


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    effect_size: float
    method: str

    __test__ = False  # not a pytest class


def _take(values, idx):
    if isinstance(values, np.ndarray):
        return values[idx]
    return [values[i] for i in idx]


def bootstrap_replicates(values, statistic: Callable, config: BootstrapConfig) -> np.ndarray:
    n = len(values)
    if n == 0:
        raise ValueError("cannot bootstrap an empty sample")
    rng = np.random.default_rng(config.seed)
    reps = np.empty(config.replicates)
    for b in range(config.replicates):
        idx = rng.integers(0, n, size=n)
        reps[b] = statistic(_take(values, idx))
    return reps


def bootstrap_ci(values, statistic: Callable, config: BootstrapConfig = BootstrapConfig()) -> ConfidenceInterval:
    """Percentile bootstrap interval around ``statistic(values)``."""
    reps = bootstrap_replicates(values, statistic, config)
    tail = (1.0 - config.ci_level) / 2.0
    lower, upper = np.percentile(reps, [100.0 * tail, 100.0 * (1.0 - tail)])
    return ConfidenceInterval(float(statistic(values)), float(lower), float(upper))


def paired_bootstrap_test(
    values_a, values_b, statistic: Callable, config: BootstrapConfig = BootstrapConfig()
) -> float:
    """Two-sided paired bootstrap p-value for ``statistic(a) - statistic(b)``.

    Pair indices are drawn jointly; p = 2 min(P(delta <= 0), P(delta >= 0)), capped at 1.
    """
    n = len(values_a)
    if n != len(values_b):
        raise ValueError("paired samples must have equal lengths")
    if n == 0:
        raise ValueError("cannot bootstrap an empty sample")
    rng = np.random.default_rng(config.seed)
    deltas = np.empty(config.replicates)
    for b in range(config.replicates):
        idx = rng.integers(0, n, size=n)
        deltas[b] = statistic(_take(values_a, idx)) - statistic(_take(values_b, idx))
    p_left = float(np.mean(deltas <= 0.0))
    p_right = float(np.mean(deltas >= 0.0))
    return min(1.0, 2.0 * min(p_left, p_right))


def mann_whitney_u(u_group: Sequence[float], v_group: Sequence[float]) -> float:
    """U = #{u > v} + 0.5 #{u = v}, via midranks."""
    u = np.asarray(u_group, dtype=float)
    v = np.asarray(v_group, dtype=float)
    ranks = rankdata(np.concatenate([u, v]))
    nf = u.size
    return float(ranks[:nf].sum() - nf * (nf + 1) / 2.0)


def _exact_u_counts(doubled_ranks: np.ndarray, nf: int) -> np.ndarray:
    """Number of size-nf subsets for each doubled rank sum (midranks doubled are integers)."""
    total = int(doubled_ranks.sum())
    counts = np.zeros((nf + 1, total + 1), dtype=np.int64)
    counts[0, 0] = 1
    for i, r in enumerate(doubled_ranks):
        for j in range(min(i + 1, nf), 0, -1):
            counts[j, r:] += counts[j - 1, : total + 1 - r]
    return counts[nf]


def _exact_p(u_stat: float, u: np.ndarray, v: np.ndarray, alternative: str) -> float:
    nf = u.size
    doubled = np.rint(2.0 * rankdata(np.concatenate([u, v]))).astype(np.int64)
    counts = _exact_u_counts(doubled, nf)
    sums = np.arange(counts.size)
    u2 = sums - nf * (nf + 1)  # doubled U for each rank sum
    obs = int(round(2.0 * u_stat))
    total = counts.sum()
    p_le = counts[u2 <= obs].sum() / total
    p_ge = counts[u2 >= obs].sum() / total
    if alternative == "greater":
        return float(p_ge)
    if alternative == "less":
        return float(p_le)
    return float(min(1.0, 2.0 * min(p_le, p_ge)))


def _normal_p(u_stat: float, u: np.ndarray, v: np.ndarray, alternative: str) -> float:
    nf, ns = u.size, v.size
    n = nf + ns
    _, tie_counts = np.unique(np.concatenate([u, v]), return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1)) if n > 1 else 0.0
    var = nf * ns / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return 1.0
    sd = math.sqrt(var)
    mu = nf * ns / 2.0

    def sf(z: float) -> float:
        return 0.5 * math.erfc(z / math.sqrt(2.0))

    if alternative == "greater":
        return sf((u_stat - mu - 0.5) / sd)
    if alternative == "less":
        return sf((mu - u_stat - 0.5) / sd)
    z = max(abs(u_stat - mu) - 0.5, 0.0) / sd
    return min(1.0, 2.0 * sf(z))


def mann_whitney(
    u_group: Sequence[float], v_group: Sequence[float], alternative: str = "two-sided", method: str = "auto"
) -> TestResult:
    """Mann-Whitney U test of whether ``u_group`` tends to exceed ``v_group``.

    ``method="auto"`` enumerates the exact null distribution (ties included,
    via midranks) when both groups have at most 20 members, and uses the
    tie-corrected normal approximation with continuity correction otherwise.
    The effect size is the rank-biserial correlation 2U/(n_u n_v) - 1.
    """
    u = np.asarray(u_group, dtype=float)
    v = np.asarray(v_group, dtype=float)
    if u.size == 0 or v.size == 0:
        raise ValueError("both groups must be non-empty")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    small = u.size <= EXACT_MAX_GROUP and v.size <= EXACT_MAX_GROUP
    if method == "auto":
        method = "exact" if small else "normal_approx"
    if method == "exact" and not small:
        raise ValueError(f"exact test limited to groups of at most {EXACT_MAX_GROUP}")
    if method not in ("exact", "normal_approx"):
        raise ValueError(f"unknown method {method!r}")

    u_stat = mann_whitney_u(u, v)
    if method == "exact":
        p = _exact_p(u_stat, u, v, alternative)
    else:
        p = _normal_p(u_stat, u, v, alternative)
    effect = 2.0 * u_stat / (u.size * v.size) - 1.0
    return TestResult(u_stat, min(max(p, 0.0), 1.0), effect, method)


def auroc(scores: Sequence[float], positives: Sequence[int]) -> float:
    """Probability a random positive outscores a random negative, ties counted as one half."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(positives, dtype=int)
    if s.shape != y.shape:
        raise ValueError("scores and labels must have equal lengths")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both positive and negative examples")
    return mann_whitney_u(s[y == 1], s[y == 0]) / (n_pos * n_neg)
