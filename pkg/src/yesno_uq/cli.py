"""Command-line front end: ``yesno-uq <subcommand> [options]``.

Every subcommand writes its reports (CSV, JSON) plus a ``manifest.json``
into ``--out-dir``. Reruns with the same inputs and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from yesno_uq import __version__
from yesno_uq.bridge import FlipMode, bridge_report, flip_labels
from yesno_uq.conformal import conformal_calibrate, conformal_predict, conformal_report
from yesno_uq.corruption import KINDS, SEVERITIES, CorruptionSpec, GrayImage, apply_corruption
from yesno_uq.metrics import (
    ScoredPrediction,
    accuracy_score,
    brier_score,
    calibration_metrics,
    ece_score,
    from_probability,
    nll_score,
    reliability_bins,
    score,
)
from yesno_uq.records import PredictionRecord, SplitSpec, read_records, split_calibration, write_records
from yesno_uq.selective import (
    GateConfig,
    Tier,
    abstain,
    augrc,
    augrc_score,
    aurc,
    aurc_score,
    coverage_at_risk,
    joint_threshold_sweep,
    risk_coverage,
)
from yesno_uq.stats import BootstrapConfig, bootstrap_ci, paired_bootstrap_test
from yesno_uq.synth import SynthConfig, generate
from yesno_uq.temperature import TemperatureModel, apply_temperature, fit_temperature
from yesno_uq.uncertainty import (
    Strategy,
    aggregate,
    decompose_margins,
    disagreement_matrix,
    member_diagnostics,
    member_predictions,
)

logger = logging.getLogger("yesno_uq")

SEED_ENV = "YESNO_UQ_SEED"
METHODS = ("softmax", "margin", "temp", "mcdrop", "ensemble")
STRATEGIES = ("prob", "logit", "vote")
DEFAULT_COVERAGES = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1"
METRIC_NAMES = ("accuracy", "ece", "brier", "nll", "aurc", "augrc")


class MissingFieldError(ValueError):
    """Records lack the optional field a method needs."""


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Outputs:
    """Collects the files a run writes, for the manifest."""

    def __init__(self, out_dir: str):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def csv(self, name: str, header: Sequence[str], rows) -> None:
        with open(self.path(name), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])

    def json(self, name: str, obj) -> None:
        with open(self.path(name), "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def manifest(self, args: argparse.Namespace, inputs: Sequence[str], extra: dict | None = None) -> None:
        config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
        doc = {
            "command": args.command,
            "version": __version__,
            "seed": getattr(args, "seed", None),
            "inputs": [str(p) for p in inputs],
            "config": config,
            "outputs": list(self.files),
        }
        if extra:
            doc.update(extra)
        with open(self.dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")


# ---------------------------------------------------------------- method registry


@dataclass
class MethodOutput:
    name: str
    preds: list[ScoredPrediction]
    scores: np.ndarray  # selective score, higher = more confident
    tiebreak: np.ndarray | None
    decompositions: list | None = None
    temperature: TemperatureModel | None = None

    @property
    def entropies(self) -> np.ndarray:
        return np.array([p.entropy for p in self.preds])

    @property
    def correct(self) -> np.ndarray:
        return np.array([p.correct for p in self.preds], dtype=int)


def _require(records: Sequence[PredictionRecord], method: str, field: str, minimum: int) -> None:
    for rec in records:
        if len(getattr(rec, field)) < minimum:
            raise MissingFieldError(
                f"method '{method}' needs at least {minimum} '{field}' entries per record; "
                f"record {rec.id!r} has {len(getattr(rec, field))}"
            )


def run_method(
    records: Sequence[PredictionRecord],
    method: str,
    strategy: str = "prob",
    temperature: TemperatureModel | None = None,
) -> MethodOutput:
    if method in ("softmax", "margin"):
        preds = [score(r) for r in records]
        abs_m = np.abs([r.margin for r in records])
        if method == "margin":
            return MethodOutput(method, preds, abs_m, None)
        # confidence saturates where |m| does not; break those ties by |m| so both rank identically
        return MethodOutput(method, preds, np.array([p.confidence for p in preds]), abs_m)
    if method == "temp":
        if temperature is None:
            raise ValueError("temp method needs a fitted temperature")
        preds = [apply_temperature(r.margin, temperature, r.label) for r in records]
        abs_m = np.abs([r.margin for r in records])
        return MethodOutput(method, preds, np.array([p.confidence for p in preds]), abs_m, temperature=temperature)
    if method == "mcdrop":
        _require(records, method, "passes", 2)
        decs = [decompose_margins(r.pass_margins) for r in records]
        preds = [from_probability(d.mean_probability, r.label) for d, r in zip(decs, records)]
        return MethodOutput(method, preds, np.array([p.confidence for p in preds]), None, decs)
    if method == "ensemble":
        _require(records, method, "members", 1)
        strat = Strategy.parse(strategy)
        preds = [aggregate([(m.logit_yes, m.logit_no) for m in r.members], strat, r.label) for r in records]
        decs = [decompose_margins(r.member_margins) for r in records] if len(records[0].members) >= 2 else None
        return MethodOutput(f"ensemble[{strategy}]", preds, np.array([p.confidence for p in preds]), None, decs)
    raise ValueError(f"unknown method {method!r}")


def _fit_temperature_for(args, records: list[PredictionRecord]) -> tuple[TemperatureModel, list[PredictionRecord]]:
    """Fit on --calib-input (all of it) or on a calibration split of --input.

    Returns the model and the records left for evaluation.
    """
    if args.calib_input:
        calib = read_records(args.calib_input)
        evaluation = records
    else:
        calib, evaluation = split_calibration(records, SplitSpec(seed=args.seed))
    model = fit_temperature([r.margin for r in calib], [r.label for r in calib])
    return model, evaluation


def _prepare(args) -> tuple[list[PredictionRecord], MethodOutput]:
    records = read_records(args.input)
    if not records:
        raise ValueError(f"{args.input} contains no records")
    temperature = None
    if args.method == "temp":
        temperature, records = _fit_temperature_for(args, records)
    return records, run_method(records, args.method, args.strategy, temperature)


# ---------------------------------------------------------------- subcommands


def _metrics_row(out: MethodOutput, bins: int) -> list:
    cm = calibration_metrics(out.preds, bins)
    curve = risk_coverage(out.scores, out.correct, out.tiebreak)
    return [
        out.name,
        len(out.preds),
        cm.accuracy,
        cm.ece,
        cm.brier,
        cm.nll,
        aurc(curve),
        augrc(curve),
        coverage_at_risk(curve, 0.05),
        coverage_at_risk(curve, 0.10),
    ]


METRICS_HEADER = ["method", "n", "accuracy", "ece", "brier", "nll", "aurc", "augrc", "cov_at_5", "cov_at_10"]


def cmd_evaluate(args) -> dict:
    records, out = _prepare(args)
    o = Outputs(args.out_dir)
    o.csv("metrics.csv", METRICS_HEADER, [_metrics_row(out, args.bins)])
    o.csv(
        "reliability.csv",
        ["method", "bin", "lower", "upper", "count", "mean_confidence", "accuracy"],
        [[out.name, i, b.lower, b.upper, b.count, b.mean_confidence, b.accuracy]
         for i, b in enumerate(reliability_bins(out.preds, args.bins))],
    )
    curve = risk_coverage(out.scores, out.correct, out.tiebreak)
    o.csv(
        "risk_coverage.csv",
        ["method", "k", "coverage", "selective_risk", "generalized_risk", "threshold"],
        [[out.name, k, p.coverage, p.selective_risk, p.generalized_risk, p.threshold]
         for k, p in enumerate(curve.points, start=1)],
    )
    if out.temperature is not None:
        o.json("temperature.json", json.loads(out.temperature.to_json()))
    if out.decompositions:
        correct = out.correct
        rows = []
        for subset, mask in (("all", np.ones_like(correct, bool)), ("correct", correct == 1), ("error", correct == 0)):
            decs = [d for d, keep in zip(out.decompositions, mask) if keep]
            if not decs:
                continue
            total = float(np.mean([d.total for d in decs]))
            ale = float(np.mean([d.aleatoric for d in decs]))
            mi = float(np.mean([d.epistemic for d in decs]))
            rows.append([out.name, subset, len(decs), total, ale, mi, mi / total if total > 0 else 0.0])
        o.csv("decomposition.csv", ["method", "subset", "n", "total", "aleatoric", "epistemic", "mi_ratio"], rows)
    if args.method == "ensemble":
        diags = member_diagnostics(records)
        o.csv(
            "members.csv",
            ["seed", "accuracy", "ece", "brier", "nll", "aurc"],
            [[d.seed, d.accuracy, d.ece, d.brier, d.nll, d.aurc] for d in diags],
        )
        mat = disagreement_matrix(member_predictions(records))
        seeds = records[0].member_seeds
        o.csv("disagreement.csv", ["seed"] + [str(s) for s in seeds],
              [[s] + list(row) for s, row in zip(seeds, mat)])
    o.manifest(args, [p for p in (args.input, args.calib_input) if p])
    return {}


def cmd_temp(args) -> dict:
    records = read_records(args.input)
    model, evaluation = _fit_temperature_for(args, records)
    o = Outputs(args.out_dir)
    o.json("temperature.json", json.loads(model.to_json()))
    before = run_method(evaluation, "softmax")
    after = run_method(evaluation, "temp", temperature=model)
    rows = []
    for label, out in (("before", before), ("after", after)):
        row = _metrics_row(out, args.bins)
        rows.append([label] + row)
    o.csv("metrics.csv", ["stage"] + METRICS_HEADER, rows)
    o.manifest(args, [p for p in (args.input, args.calib_input) if p])
    return {}


def _p_yes(records, method: str, strategy: str, temperature=None) -> list[float]:
    return [p.probability for p in run_method(records, method, strategy, temperature).preds]


def cmd_conformal(args) -> dict:
    records = read_records(args.input)
    if args.calib_input:
        # calibrate on the held-out split of a separate (e.g. clean) file, test on all of --input
        calib, _ = split_calibration(read_records(args.calib_input), SplitSpec(seed=args.seed))
        test = records
    else:
        calib, test = split_calibration(records, SplitSpec(seed=args.seed))
    method = args.method
    temperature = None
    if method == "temp":
        temperature = fit_temperature([r.margin for r in calib], [r.label for r in calib])
    cal_p = _p_yes(calib, method, args.strategy, temperature)
    test_p = _p_yes(test, method, args.strategy, temperature)
    test_y = [r.label for r in test]
    rows = []
    set_rows = []
    for alpha in _floats(args.alpha):
        model = conformal_calibrate(cal_p, [r.label for r in calib], alpha)
        sets = [conformal_predict(p, model) for p in test_p]
        rep = conformal_report(sets, test_y, alpha)
        rows.append([
            alpha, rep.target, rep.empirical_coverage, model.q_hat, rep.mean_size,
            100.0 * rep.singleton_fraction, rep.coverage_gap, model.n_cal, len(test),
        ])
        set_rows.extend(
            [alpha, r.id, int(s.contains_yes), int(s.contains_no), r.label] for r, s in zip(test, sets)
        )
    o = Outputs(args.out_dir)
    o.csv(
        "conformal.csv",
        ["alpha", "target", "empirical", "q_hat", "mean_size", "singleton_pct", "coverage_gap", "n_cal", "n_test"],
        rows,
    )
    o.csv("sets.csv", ["alpha", "id", "contains_yes", "contains_no", "label"], set_rows)
    o.manifest(args, [p for p in (args.input, args.calib_input) if p])
    return {}


def _flips(records, out: MethodOutput, mode: str, counters: Counter):
    reference = None
    if FlipMode.parse(mode) is FlipMode.METHOD_CONSISTENT:
        reference = {r.id: p.predicted for r, p in zip(records, out.preds)}
    return flip_labels(records, mode, reference, counters)


def cmd_bridge(args) -> dict:
    records, out = _prepare(args)
    counters: Counter = Counter()
    flips = _flips(records, out, args.mode, counters)
    entropies = {r.id: p.entropy for r, p in zip(records, out.preds)}
    rep = bridge_report(entropies, flips)
    o = Outputs(args.out_dir)
    o.csv(
        "bridge.csv",
        ["method", "mode", "n", "skipped", "flip_rate", "H_flip", "H_stable", "delta_H", "auroc", "p_value",
         "effect_size"],
        [[out.name, FlipMode.parse(args.mode).value, rep.n, rep.skipped, rep.flip_rate, rep.mean_entropy_flipped,
          rep.mean_entropy_stable, rep.entropy_gap, rep.flip_auroc, rep.p_value, rep.effect_size]],
    )
    o.csv(
        "flips.csv",
        ["id", "flipped", "n_paraphrases", "entropy"],
        [[f.id, f.flipped, f.n_paraphrases, entropies[f.id]] for f in flips],
    )
    o.manifest(args, [args.input], {"counters": dict(counters)})
    return {}


def cmd_sweep(args) -> dict:
    records, out = _prepare(args)
    counters: Counter = Counter()
    flips = _flips(records, out, args.mode, counters)
    rows = joint_threshold_sweep(
        out.entropies, out.correct, [f.flipped for f in flips], _floats(args.coverages), args.count_rule
    )
    o = Outputs(args.out_dir)
    o.csv(
        "sweep.csv",
        ["coverage", "n", "tau", "error_pct", "flip_pct"],
        [[r.coverage, r.n_retained, r.tau, 100.0 * r.error_rate, 100.0 * r.flip_rate] for r in rows],
    )
    o.manifest(args, [args.input], {"counters": dict(counters)})
    return {}


def cmd_gate(args) -> dict:
    records = read_records(args.input)
    config = GateConfig(args.tau, Tier.parse(args.tier))
    rows = []
    for rec in records:
        if config.tier is Tier.MULTI_PASS:
            if len(rec.passes) < 2:
                raise MissingFieldError(f"tier multi needs at least 2 'passes' entries; record {rec.id!r} has "
                                        f"{len(rec.passes)}")
            pred = decompose_margins(rec.pass_margins)
        else:
            pred = score(rec)
        d = abstain(pred, config)
        rows.append([rec.id, d.decision, d.probability, d.entropy])
    o = Outputs(args.out_dir)
    o.csv("decisions.csv", ["id", "decision", "probability", "entropy"], rows)
    n_abstain = sum(1 for r in rows if r[1] == "abstain")
    o.manifest(args, [args.input], {"summary": {"n": len(rows), "abstained": n_abstain}})
    return {}


def cmd_corrupt(args) -> dict:
    kinds = args.kinds.split(",") if args.kinds else list(KINDS)
    severities = [int(s) for s in args.severities.split(",")] if args.severities else list(SEVERITIES)
    o = Outputs(args.out_dir)
    rows = []
    for i, path in enumerate(args.images):
        image = GrayImage.load(path)
        stem = Path(path).stem
        for kind in kinds:
            for sev in severities:
                spec = CorruptionSpec.of(kind, sev)
                name = f"{stem}_{kind}_s{sev}.png"
                apply_corruption(image, spec, seed=args.seed + i).save(o.path(name))
                rows.append([path, kind, sev, spec.parameter, str(o.dir / name)])
    o.csv("corruptions.csv", ["image_path", "kind", "severity", "parameter", "output_path"], rows)
    o.manifest(args, list(args.images))
    return {}


def cmd_synth(args) -> dict:
    biases = tuple(_floats(args.member_biases)) if args.member_biases else ()
    config = SynthConfig(
        n=args.n,
        seed=args.seed,
        temperature_distortion=args.temperature,
        prevalence_shape=(args.beta_a, args.beta_b),
        ensemble_members=args.members,
        member_biases=biases,
        member_noise=args.member_noise,
        pass_count=args.passes,
        pass_jitter=args.pass_jitter,
        paraphrase_count=args.paraphrases,
        paraphrase_jitter=args.paraphrase_jitter,
        dataset=args.dataset,
    )
    o = Outputs(args.out_dir)
    write_records(o.path(args.output), generate(config))
    o.manifest(args, [])
    return {}


def _metric_fn(name: str):
    # rows: [probability, label, score, tiebreak]
    if name == "accuracy":
        return lambda a: accuracy_score(a[:, 0], a[:, 1])
    if name == "ece":
        return lambda a: ece_score(a[:, 0], a[:, 1])
    if name == "brier":
        return lambda a: brier_score(a[:, 0], a[:, 1])
    if name == "nll":
        return lambda a: nll_score(a[:, 0], a[:, 1])
    if name in ("aurc", "augrc"):
        f = aurc_score if name == "aurc" else augrc_score

        def stat(a):
            correct = ((a[:, 0] >= 0.5).astype(int) == a[:, 1]).astype(int)
            return f(a[:, 2], correct, a[:, 3])

        return stat
    raise ValueError(f"unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}")


def _metric_rows(out: MethodOutput) -> np.ndarray:
    tb = out.tiebreak if out.tiebreak is not None else np.zeros(len(out.preds))
    return np.column_stack([[p.probability for p in out.preds], [p.label for p in out.preds], out.scores, tb])


def cmd_report(args) -> dict:
    o = Outputs(args.out_dir)
    inputs: list[str] = []
    if args.merge:
        header = None
        merged = []
        for path in args.merge:
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv.reader(fh))
            if not rows:
                continue
            if header is None:
                header = ["source"] + rows[0]
            elif ["source"] + rows[0] != header:
                raise ValueError(f"{path} has columns {rows[0]}, expected {header[1:]}")
            merged.extend([path] + r for r in rows[1:])
            inputs.append(path)
        if header is not None:
            o.csv("merged.csv", header, merged)
    if args.input:
        inputs.append(args.input)
        records = read_records(args.input)
        temperature = None
        if "temp" in (args.method, args.compare):
            temperature, records = _fit_temperature_for(args, records)
        names = [n.strip() for n in args.metrics.split(",") if n.strip()]
        config = BootstrapConfig(replicates=args.bootstrap, seed=args.seed, ci_level=args.ci_level)
        methods = [args.method] + ([args.compare] if args.compare else [])
        rows_by_method = {}
        ci_rows = []
        for method in methods:
            out = run_method(records, method, args.strategy, temperature)
            data = _metric_rows(out)
            rows_by_method[method] = (out.name, data)
            for name in names:
                ci = bootstrap_ci(data, _metric_fn(name), config)
                ci_rows.append([out.name, name, ci.estimate, ci.lower, ci.upper, config.replicates, config.ci_level])
        o.csv("ci.csv", ["method", "metric", "estimate", "lower", "upper", "replicates", "ci_level"], ci_rows)
        if args.compare:
            (name_a, a), (name_b, b) = rows_by_method[args.method], rows_by_method[args.compare]
            paired = []
            for name in names:
                f = _metric_fn(name)
                p = paired_bootstrap_test(a, b, f, config)
                paired.append([name, name_a, name_b, f(a) - f(b), p])
            o.csv("paired.csv", ["metric", "method_a", "method_b", "delta", "p_value"], paired)
    if not inputs:
        raise ValueError("report needs --input and/or --merge")
    o.manifest(args, inputs)
    return {}


# ---------------------------------------------------------------- parser


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yesno-uq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, method=True):
        p.add_argument("--out-dir", required=True)
        p.add_argument("--seed", type=int, default=_default_seed(), help=f"default from ${SEED_ENV} or 0")
        if method:
            p.add_argument("--method", choices=METHODS, default="softmax")
            p.add_argument("--strategy", choices=STRATEGIES, default="prob")
            p.add_argument("--calib-input", help="fit temperature on this file instead of a split of --input")

    p = sub.add_parser("evaluate", help="calibration, reliability and risk-coverage for one method")
    p.add_argument("--input", required=True)
    p.add_argument("--bins", type=int, default=15)
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("temp", help="fit temperature and compare before/after")
    p.add_argument("--input", required=True)
    p.add_argument("--calib-input")
    p.add_argument("--bins", type=int, default=15)
    common(p, method=False)
    p.set_defaults(func=cmd_temp)

    p = sub.add_parser("conformal", help="split-conformal calibration and coverage report")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", default="0.05,0.10")
    common(p)
    p.set_defaults(func=cmd_conformal)

    p = sub.add_parser("bridge", help="paraphrase flip labels and entropy/flip bridge statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("canonical", "consistent"), default="canonical")
    common(p)
    p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("sweep", help="joint entropy threshold sweep over error and flip rates")
    p.add_argument("--input", required=True)
    p.add_argument("--coverages", default=DEFAULT_COVERAGES)
    p.add_argument("--mode", choices=("canonical", "consistent"), default="canonical")
    p.add_argument("--count-rule", choices=("round", "ceil", "floor"), default="round")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gate", help="entropy-threshold abstention decisions")
    p.add_argument("--input", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--tier", choices=("single", "multi"), default="single")
    common(p, method=False)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("corrupt", help="apply the corruption grid to grayscale images")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--kinds", help=f"comma list from {','.join(KINDS)}")
    p.add_argument("--severities", help="comma list from 1,3,5")
    common(p, method=False)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("synth", help="generate a synthetic prediction log")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--temperature", type=float, default=1.0, help="margin distortion T0")
    p.add_argument("--beta-a", type=float, default=2.0)
    p.add_argument("--beta-b", type=float, default=2.0)
    p.add_argument("--members", type=int, default=0)
    p.add_argument("--member-biases")
    p.add_argument("--member-noise", type=float, default=0.0)
    p.add_argument("--passes", type=int, default=0)
    p.add_argument("--pass-jitter", type=float, default=0.0)
    p.add_argument("--paraphrases", type=int, default=0)
    p.add_argument("--paraphrase-jitter", type=float, default=0.0)
    p.add_argument("--dataset", default="synth")
    p.add_argument("--output", default="records.jsonl", help="file name inside --out-dir")
    common(p, method=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="bootstrap CIs, paired tests and CSV merging")
    p.add_argument("--input")
    p.add_argument("--compare", choices=METHODS, help="second method for paired bootstrap tests")
    p.add_argument("--metrics", default="accuracy,ece,brier,nll,aurc")
    p.add_argument("--bootstrap", type=int, default=2000)
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--merge", nargs="+", help="CSV files with identical columns to concatenate")
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"yesno-uq {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
