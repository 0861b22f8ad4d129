"""Prediction-log records: parsing, validation, serialization and calibration splits.

A log is a JSON Lines file, one question instance per line::

    {"id": "q17", "dataset": "padchest", "logit_yes": 1.2, "logit_no": -0.3, "label": 1,
     "paraphrases": [{"id": "q17-p1", "logit_yes": 0.4, "logit_no": 0.1}],
     "passes": [[1.1, -0.2], [1.3, -0.4]],
     "members": [{"seed": 0, "logit_yes": 1.0, "logit_no": -0.1}],
     "corruption": {"kind": "gaussian_noise", "severity": 1}}

Only ``id``, ``logit_yes``, ``logit_no`` and ``label`` are required.
"""

from __future__ import annotations

import io
import json
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

CORRUPTION_KINDS = ("gaussian_noise", "gaussian_blur", "contrast", "brightness", "jpeg")

_KNOWN_FIELDS = frozenset(
    {"id", "dataset", "logit_yes", "logit_no", "label", "paraphrases", "passes", "members", "corruption"}
)


class RecordError(ValueError):
    """Malformed or invalid prediction record."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Paraphrase:
    id: str
    logit_yes: float
    logit_no: float

    @property
    def margin(self) -> float:
        return self.logit_yes - self.logit_no


@dataclass(frozen=True)
class Member:
    seed: int
    logit_yes: float
    logit_no: float

    @property
    def margin(self) -> float:
        return self.logit_yes - self.logit_no


@dataclass(frozen=True)
class Corruption:
    kind: str
    severity: int


@dataclass(frozen=True)
class PredictionRecord:
    """One yes/no question instance with its logged logits."""

    id: str
    logit_yes: float
    logit_no: float
    label: int
    dataset: str = ""
    paraphrases: tuple[Paraphrase, ...] = ()
    passes: tuple[tuple[float, float], ...] = ()
    members: tuple[Member, ...] = ()
    corruption: Corruption | None = None
    line: int | None = field(default=None, compare=False, repr=False)

    @property
    def margin(self) -> float:
        return self.logit_yes - self.logit_no

    @property
    def pass_margins(self) -> list[float]:
        return [yes - no for yes, no in self.passes]

    @property
    def member_margins(self) -> list[float]:
        return [m.margin for m in self.members]

    @property
    def member_seeds(self) -> tuple[int, ...]:
        return tuple(m.seed for m in self.members)

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "dataset": self.dataset,
            "logit_yes": self.logit_yes,
            "logit_no": self.logit_no,
            "label": self.label,
        }
        if self.paraphrases:
            out["paraphrases"] = [
                {"id": p.id, "logit_yes": p.logit_yes, "logit_no": p.logit_no} for p in self.paraphrases
            ]
        if self.passes:
            out["passes"] = [[yes, no] for yes, no in self.passes]
        if self.members:
            out["members"] = [{"seed": m.seed, "logit_yes": m.logit_yes, "logit_no": m.logit_no} for m in self.members]
        if self.corruption is not None:
            out["corruption"] = {"kind": self.corruption.kind, "severity": self.corruption.severity}
        return out


@dataclass(frozen=True)
class SplitSpec:
    calibration_fraction: float = 0.15
    minimum_calibration: int = 20
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.calibration_fraction < 1.0:
            raise ValueError(f"calibration_fraction must be in (0, 1), got {self.calibration_fraction}")
        if self.minimum_calibration < 1:
            raise ValueError("minimum_calibration must be >= 1")


def _logit(value, name: str, line: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordError(f"{name} must be a number, got {value!r}", line)
    value = float(value)
    if not math.isfinite(value):
        raise RecordError(f"{name} is not finite ({value})", line)
    return value


def _require(obj: dict, key: str, line: int, where: str = "record"):
    if key not in obj:
        raise RecordError(f"{where} is missing required field '{key}'", line)
    return obj[key]


def record_from_dict(obj: dict, line: int = 0, unknown: Counter | None = None) -> PredictionRecord:
    """Validate a decoded JSON object and build a record from it."""
    if not isinstance(obj, dict):
        raise RecordError("expected a JSON object", line)
    if unknown is not None:
        for key in obj:
            if key not in _KNOWN_FIELDS:
                unknown[key] += 1

    rid = _require(obj, "id", line)
    if not isinstance(rid, str) or not rid:
        raise RecordError(f"id must be a non-empty string, got {rid!r}", line)
    logit_yes = _logit(_require(obj, "logit_yes", line), "logit_yes", line)
    logit_no = _logit(_require(obj, "logit_no", line), "logit_no", line)
    label = _require(obj, "label", line)
    if isinstance(label, bool) or label not in (0, 1):
        raise RecordError(f"label must be 0 or 1, got {label!r}", line)
    dataset = obj.get("dataset", "")
    if not isinstance(dataset, str):
        raise RecordError("dataset must be a string", line)

    paraphrases = []
    seen_para = set()
    for para in obj.get("paraphrases") or ():
        if not isinstance(para, dict):
            raise RecordError("paraphrase entries must be objects", line)
        pid = str(_require(para, "id", line, "paraphrase"))
        if pid in seen_para:
            raise RecordError(f"duplicate paraphrase id {pid!r}", line)
        seen_para.add(pid)
        paraphrases.append(
            Paraphrase(
                pid,
                _logit(_require(para, "logit_yes", line, "paraphrase"), "paraphrase logit_yes", line),
                _logit(_require(para, "logit_no", line, "paraphrase"), "paraphrase logit_no", line),
            )
        )

    passes = []
    for pair in obj.get("passes") or ():
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise RecordError("each pass must be a [logit_yes, logit_no] pair", line)
        passes.append((_logit(pair[0], "pass logit_yes", line), _logit(pair[1], "pass logit_no", line)))

    members = []
    for mem in obj.get("members") or ():
        if not isinstance(mem, dict):
            raise RecordError("member entries must be objects", line)
        seed = _require(mem, "seed", line, "member")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise RecordError(f"member seed must be an integer, got {seed!r}", line)
        members.append(
            Member(
                seed,
                _logit(_require(mem, "logit_yes", line, "member"), "member logit_yes", line),
                _logit(_require(mem, "logit_no", line, "member"), "member logit_no", line),
            )
        )

    corruption = None
    if obj.get("corruption") is not None:
        c = obj["corruption"]
        if not isinstance(c, dict):
            raise RecordError("corruption must be an object", line)
        kind = _require(c, "kind", line, "corruption")
        severity = _require(c, "severity", line, "corruption")
        if kind not in CORRUPTION_KINDS:
            raise RecordError(f"unknown corruption kind {kind!r}", line)
        if isinstance(severity, bool) or not isinstance(severity, int):
            raise RecordError("corruption severity must be an integer", line)
        corruption = Corruption(kind, severity)

    return PredictionRecord(
        id=rid,
        logit_yes=logit_yes,
        logit_no=logit_no,
        label=int(label),
        dataset=dataset,
        paraphrases=tuple(paraphrases),
        passes=tuple(passes),
        members=tuple(members),
        corruption=corruption,
        line=line,
    )


def parse_records(source: IO | Iterable, unknown: Counter | None = None) -> list[PredictionRecord]:
    """Parse a JSON Lines stream into validated records.

    ``source`` may be a binary or text stream, or any iterable of lines.
    Blank lines are skipped. Unknown top-level fields are ignored and tallied
    in ``unknown`` if a counter is supplied.
    """
    if unknown is None:
        unknown = Counter()
    records: list[PredictionRecord] = []
    first_line: dict[str, int] = {}
    seed_order: tuple[int, ...] | None = None
    seed_line = 0

    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise RecordError(f"invalid UTF-8 ({exc})", lineno) from None
        text = raw.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RecordError(f"malformed JSON ({exc.msg})", lineno) from None
        rec = record_from_dict(obj, lineno, unknown)

        if rec.id in first_line:
            raise RecordError(f"duplicate id {rec.id!r} (first seen on line {first_line[rec.id]})", lineno)
        first_line[rec.id] = lineno

        if rec.members:
            if seed_order is None:
                seed_order, seed_line = rec.member_seeds, lineno
            elif rec.member_seeds != seed_order:
                raise RecordError(
                    f"member seed order {list(rec.member_seeds)} differs from line {seed_line} ({list(seed_order)})",
                    lineno,
                )
        records.append(rec)

    if unknown:
        logger.warning("ignored unknown fields: %s", dict(unknown))
    return records


def read_records(path: str | os.PathLike, unknown: Counter | None = None) -> list[PredictionRecord]:
    with open(path, "rb") as fh:
        return parse_records(fh, unknown)


def dumps_records(records: Iterable[PredictionRecord]) -> str:
    buf = io.StringIO()
    for rec in records:
        buf.write(json.dumps(rec.to_dict(), separators=(",", ":")))
        buf.write("\n")
    return buf.getvalue()


def write_records(path: str | os.PathLike, records: Iterable[PredictionRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_records(records))


def filter_records(
    records: Sequence[PredictionRecord],
    dataset: str | None = None,
    corruption_kind: str | None = None,
    severity: int | None = None,
    clean_only: bool = False,
) -> list[PredictionRecord]:
    """Select records by dataset tag and corruption metadata."""
    out = []
    for rec in records:
        if dataset is not None and rec.dataset != dataset:
            continue
        if clean_only and rec.corruption is not None:
            continue
        if corruption_kind is not None and (rec.corruption is None or rec.corruption.kind != corruption_kind):
            continue
        if severity is not None and (rec.corruption is None or rec.corruption.severity != severity):
            continue
        out.append(rec)
    return out


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def calibration_size(n: int, spec: SplitSpec) -> int:
    return max(round_half_up(spec.calibration_fraction * n), spec.minimum_calibration)


def split_calibration(
    records: Sequence[PredictionRecord], spec: SplitSpec = SplitSpec()
) -> tuple[list[PredictionRecord], list[PredictionRecord]]:
    """Seeded random calibration/evaluation split.

    The calibration part gets ``max(round(fraction * n), minimum_calibration)``
    records, taken as a prefix of a seeded permutation; the evaluation part
    keeps the remaining records in their original file order.
    """
    n = len(records)
    if n == 0:
        raise ValueError("cannot split an empty record list")
    n_cal = calibration_size(n, spec)
    if n_cal >= n:
        raise ValueError(
            f"{n} records cannot provide {n_cal} calibration records and at least one evaluation record"
        )
    perm = np.random.default_rng(spec.seed).permutation(n)
    cal_idx = np.sort(perm[:n_cal])
    eval_mask = np.ones(n, dtype=bool)
    eval_mask[cal_idx] = False
    calibration = [records[i] for i in cal_idx]
    evaluation = [records[i] for i in np.flatnonzero(eval_mask)]
    return calibration, evaluation
