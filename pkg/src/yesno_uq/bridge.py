"""Paraphrase flip labels and the entropy/flip bridge analysis."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from yesno_uq.stats import auroc, mann_whitney

logger = logging.getLogger(__name__)


class FlipMode(str, Enum):
    CANONICAL = "canonical"
    METHOD_CONSISTENT = "method_consistent"

    @classmethod
    def parse(cls, name: str) -> "FlipMode":
        return cls.METHOD_CONSISTENT if name == "consistent" else cls(name)


@dataclass(frozen=True)
class FlipRecord:
    id: str
    flipped: int
    n_paraphrases: int
    mode: FlipMode


@dataclass(frozen=True)
class BridgeReport:
    n: int
    skipped: int
    flip_rate: float
    mean_entropy_flipped: float | None
    mean_entropy_stable: float | None
    flip_auroc: float | None
    p_value: float | None
    effect_size: float | None

    @property
    def entropy_gap(self) -> float | None:
        if self.mean_entropy_flipped is None or self.mean_entropy_stable is None:
            return None
        return self.mean_entropy_flipped - self.mean_entropy_stable


def _predicted(margin: float) -> int:
    return int(margin >= 0.0)


def flip_labels(
    records,
    mode: FlipMode | str = FlipMode.CANONICAL,
    reference: Mapping[str, int] | None = None,
    counters: Counter | None = None,
) -> list[FlipRecord]:
    """Flag records whose prediction changes under any paraphrase.

    Paraphrases are always scored single-pass. In canonical mode they are
    compared to the record's own single-pass prediction; in method-consistent
    mode to ``reference[id]``, the prediction of the method under study.
    """
    mode = FlipMode.parse(mode) if isinstance(mode, str) else mode
    if mode is FlipMode.METHOD_CONSISTENT and reference is None:
        raise ValueError("method-consistent flips need reference predictions")
    if counters is None:
        counters = Counter()
    out = []
    for rec in records:
        ids = [p.id for p in rec.paraphrases]
        if len(set(ids)) != len(ids):
            raise ValueError(f"record {rec.id!r} has colliding paraphrase ids")
        if mode is FlipMode.CANONICAL:
            base = _predicted(rec.margin)
        else:
            if rec.id not in reference:
                raise ValueError(f"no reference prediction for record {rec.id!r}")
            base = int(reference[rec.id])
        if not rec.paraphrases:
            counters["no_paraphrases"] += 1
            out.append(FlipRecord(rec.id, 0, 0, mode))
            continue
        flipped = int(any(_predicted(p.margin) != base for p in rec.paraphrases))
        out.append(FlipRecord(rec.id, flipped, len(rec.paraphrases), mode))
    if counters["no_paraphrases"]:
        logger.warning("%d records have no paraphrases and cannot flip", counters["no_paraphrases"])
    return out


def bridge_report(entropies: Mapping[str, float], flips: Sequence[FlipRecord]) -> BridgeReport:
    """Compare entropy between flipped and stable records.

    Records without paraphrases are left out of every denominator and counted
    as skipped. When only one flip class is present the AUROC and test fields
    are None.
    """
    h, f = [], []
    skipped = 0
    for fr in flips:
        if fr.n_paraphrases == 0:
            skipped += 1
            continue
        if fr.id not in entropies:
            raise ValueError(f"no entropy for record {fr.id!r}")
        h.append(float(entropies[fr.id]))
        f.append(fr.flipped)
    h_arr = np.asarray(h)
    f_arr = np.asarray(f, dtype=int)
    n = h_arr.size
    if n == 0:
        return BridgeReport(0, skipped, 0.0, None, None, None, None, None)
    flipped_h = h_arr[f_arr == 1]
    stable_h = h_arr[f_arr == 0]
    mean_f = float(flipped_h.mean()) if flipped_h.size else None
    mean_s = float(stable_h.mean()) if stable_h.size else None
    if flipped_h.size and stable_h.size:
        test = mann_whitney(flipped_h, stable_h)
        auc, p, effect = auroc(h_arr, f_arr), test.p_value, test.effect_size
    else:
        auc = p = effect = None
    return BridgeReport(n, skipped, float(f_arr.mean()), mean_f, mean_s, auc, p, effect)
