"""Seeded synthetic prediction logs with known ground truth.

Each record draws a true probability p ~ Beta(a, b), a label y ~ Bernoulli(p)
and a base margin m = T0 * logit(p); logits are stored as (m, 0). Paraphrase,
pass and member margins are m plus Gaussian jitter (members also get a fixed
per-member bias). With T0 = 1 the single-pass log is calibrated by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from yesno_uq.records import Member, Paraphrase, PredictionRecord


@dataclass(frozen=True)
class SynthConfig:
    n: int = 1000
    seed: int = 0
    temperature_distortion: float = 1.0
    prevalence_shape: tuple[float, float] = (2.0, 2.0)
    ensemble_members: int = 0
    member_biases: tuple[float, ...] = ()
    member_noise: float = 0.0
    pass_count: int = 0
    pass_jitter: float = 0.0
    paraphrase_count: int = 0
    paraphrase_jitter: float = 0.0
    dataset: str = "synth"

    def __post_init__(self):
        for name in ("n", "ensemble_members", "pass_count", "paraphrase_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("member_noise", "pass_jitter", "paraphrase_jitter"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.temperature_distortion <= 0:
            raise ValueError("temperature_distortion must be > 0")
        a, b = self.prevalence_shape
        if a <= 0 or b <= 0:
            raise ValueError(f"Beta parameters must be positive, got {self.prevalence_shape}")
        if self.member_biases and len(self.member_biases) != self.ensemble_members:
            raise ValueError("member_biases must have one entry per ensemble member")


def _true_margins(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 1e-15, 1.0 - 1e-15)
    return np.log(p) - np.log1p(-p)


def generate(config: SynthConfig) -> list[PredictionRecord]:
    rng = np.random.default_rng(config.seed)
    n = config.n
    a, b = config.prevalence_shape
    p = rng.beta(a, b, size=n)
    labels = (rng.random(n) < p).astype(int)
    m = config.temperature_distortion * _true_margins(p)

    P, K, M = config.paraphrase_count, config.pass_count, config.ensemble_members
    para = m[:, None] + config.paraphrase_jitter * rng.standard_normal((n, P))
    passes = m[:, None] + config.pass_jitter * rng.standard_normal((n, K))
    bias = np.asarray(config.member_biases if config.member_biases else [0.0] * M, dtype=float)
    members = m[:, None] + bias[None, :] + config.member_noise * rng.standard_normal((n, M))

    width = max(6, len(str(n)))
    records = []
    for i in range(n):
        rid = f"s{i:0{width}d}"
        records.append(
            PredictionRecord(
                id=rid,
                logit_yes=float(m[i]),
                logit_no=0.0,
                label=int(labels[i]),
                dataset=config.dataset,
                paraphrases=tuple(Paraphrase(f"{rid}-p{j}", float(para[i, j]), 0.0) for j in range(P)),
                passes=tuple((float(passes[i, k]), 0.0) for k in range(K)),
                members=tuple(Member(k, float(members[i, k]), 0.0) for k in range(M)),
            )
        )
    return records
