"""Scalar temperature scaling fitted by NLL minimization on calibration margins."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from yesno_uq.metrics import ScoredPrediction, score_margin

T_MIN = 0.05
T_MAX = 20.0
MIN_CALIBRATION = 20
TOL = 1e-9
MAX_ITER = 200

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TemperatureModel:
    temperature: float
    calibration_size: int
    final_nll: float
    converged: bool = True

    def __post_init__(self):
        if not T_MIN <= self.temperature <= T_MAX:
            raise ValueError(f"temperature {self.temperature} outside [{T_MIN}, {T_MAX}]")

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TemperatureModel":
        d = json.loads(text)
        return cls(
            temperature=float(d["temperature"]),
            calibration_size=int(d["calibration_size"]),
            final_nll=float(d["final_nll"]),
            converged=bool(d.get("converged", True)),
        )


def tempered_nll(margins: np.ndarray, labels: np.ndarray, temperature: float) -> float:
    """Mean NLL of sigma(m / T), evaluated in log space (no clamping needed)."""
    signed = (2.0 * labels - 1.0) * margins / temperature
    return float(np.mean(np.logaddexp(0.0, -signed)))


def fit_temperature(margins, labels, minimum_calibration: int = MIN_CALIBRATION) -> TemperatureModel:
    """Golden-section search for the NLL-minimizing temperature over log T in [ln 0.05, ln 20]."""
    m = np.asarray(margins, dtype=float)
    y = np.asarray(labels, dtype=float)
    if m.shape != y.shape:
        raise ValueError("margins and labels must have equal lengths")
    if m.size < minimum_calibration:
        raise ValueError(f"need at least {minimum_calibration} calibration records, got {m.size}")
    if not (np.any(y == 1) and np.any(y == 0)):
        raise ValueError("temperature fitting needs both label values in the calibration set")

    def f(log_t: float) -> float:
        return tempered_nll(m, y, math.exp(log_t))

    a, b = math.log(T_MIN), math.log(T_MAX)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    converged = False
    for _ in range(MAX_ITER):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        if abs(fc - fd) < TOL and (b - a) < 1e-6:
            converged = True
            break

    # identity temperature included so the fit never scores worse than T = 1
    candidates = [(fc, c), (fd, d), (f(a), a), (f(b), b), (f(0.0), 0.0)]
    best_nll, best_log_t = min(candidates)
    t = min(max(math.exp(best_log_t), T_MIN), T_MAX)
    return TemperatureModel(t, int(m.size), best_nll, converged)


def apply_temperature(margin: float, model: TemperatureModel, label: int = 0) -> ScoredPrediction:
    """Score the tempered margin ``m / T``; its sign, and so the predicted label, is unchanged."""
    return score_margin(margin / model.temperature, label)
