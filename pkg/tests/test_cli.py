import csv
import json
import math

import numpy as np
import pytest
from PIL import Image

from yesno_uq.cli import run
from yesno_uq.records import PredictionRecord, write_records
from yesno_uq.synth import SynthConfig, generate


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def synth_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert run(["synth", "--n", "600", "--members", "3", "--member-noise", "0.4", "--passes", "4",
                "--pass-jitter", "0.2", "--paraphrases", "3", "--paraphrase-jitter", "0.5",
                "--seed", "4", "--out-dir", str(d)]) == 0
    return d / "records.jsonl"


@pytest.fixture(scope="module")
def plain_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("plain")
    path = d / "plain.jsonl"
    write_records(path, generate(SynthConfig(n=200, seed=2)))
    return path


def test_synth_manifest(synth_file):
    manifest = json.loads((synth_file.parent / "manifest.json").read_text())
    assert manifest["command"] == "synth" and manifest["outputs"] == ["records.jsonl"]
    assert manifest["seed"] == 4


@pytest.mark.parametrize("method", ["softmax", "margin", "temp", "mcdrop", "ensemble"])
def test_evaluate_methods(synth_file, tmp_path, method):
    assert run(["evaluate", "--input", str(synth_file), "--method", method, "--out-dir", str(tmp_path)]) == 0
    (row,) = read_csv(tmp_path / "metrics.csv")
    assert 0 <= float(row["ece"]) <= 1
    bins = read_csv(tmp_path / "reliability.csv")
    assert len(bins) == 15 and sum(int(b["count"]) for b in bins) == int(row["n"])
    assert len(read_csv(tmp_path / "risk_coverage.csv")) == int(row["n"])
    if method in ("mcdrop", "ensemble"):
        subsets = {r["subset"] for r in read_csv(tmp_path / "decomposition.csv")}
        assert subsets == {"all", "correct", "error"}
    if method == "ensemble":
        assert len(read_csv(tmp_path / "members.csv")) == 3
        assert len(read_csv(tmp_path / "disagreement.csv")) == 3
    if method == "temp":
        assert json.loads((tmp_path / "temperature.json").read_text())["calibration_size"] == 90


@pytest.mark.parametrize("strategy", ["prob", "logit", "vote"])
def test_evaluate_ensemble_strategies(synth_file, tmp_path, strategy):
    assert run(["evaluate", "--input", str(synth_file), "--method", "ensemble", "--strategy", strategy,
                "--out-dir", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "metrics.csv")[0]["method"] == f"ensemble[{strategy}]"


def test_evaluate_calibrated_synth_ece(tmp_path):
    src = tmp_path / "s.jsonl"
    write_records(src, generate(SynthConfig(n=20_000, seed=0)))
    assert run(["evaluate", "--input", str(src), "--out-dir", str(tmp_path / "o")]) == 0
    assert float(read_csv(tmp_path / "o" / "metrics.csv")[0]["ece"]) < 0.02


def test_missing_members_is_typed_error(plain_file, tmp_path, capsys):
    assert run(["evaluate", "--input", str(plain_file), "--method", "ensemble", "--out-dir", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "'members'" in err and "ensemble" in err


def test_unknown_flag_is_usage_error(plain_file, tmp_path):
    assert run(["evaluate", "--input", str(plain_file), "--out-dir", str(tmp_path), "--frobnicate"]) == 2


def test_bad_input_file_reports(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "logit_yes": 1}\n')
    assert run(["evaluate", "--input", str(bad), "--out-dir", str(tmp_path / "o")]) == 1
    assert "line 1" in capsys.readouterr().err


def test_temp_protocols(plain_file, synth_file, tmp_path):
    assert run(["temp", "--input", str(plain_file), "--out-dir", str(tmp_path / "a")]) == 0
    rows = read_csv(tmp_path / "a" / "metrics.csv")
    assert [r["stage"] for r in rows] == ["before", "after"]
    assert rows[0]["accuracy"] == rows[1]["accuracy"]
    # fit on another file, apply to all of --input
    assert run(["temp", "--input", str(plain_file), "--calib-input", str(synth_file),
                "--out-dir", str(tmp_path / "b")]) == 0
    assert json.loads((tmp_path / "b" / "temperature.json").read_text())["calibration_size"] == 600
    assert read_csv(tmp_path / "b" / "metrics.csv")[0]["n"] == "200"


def test_conformal(synth_file, plain_file, tmp_path):
    assert run(["conformal", "--input", str(synth_file), "--alpha", "0.05,0.1", "--out-dir", str(tmp_path / "a")]) == 0
    rows = read_csv(tmp_path / "a" / "conformal.csv")
    assert [float(r["alpha"]) for r in rows] == [0.05, 0.1]
    assert list(rows[0])[:6] == ["alpha", "target", "empirical", "q_hat", "mean_size", "singleton_pct"]
    assert rows[0]["n_cal"] == "90"
    # shift protocol: calibrate on another file's split, test on all of --input
    assert run(["conformal", "--input", str(plain_file), "--calib-input", str(synth_file),
                "--out-dir", str(tmp_path / "b")]) == 0
    assert read_csv(tmp_path / "b" / "conformal.csv")[0]["n_test"] == "200"


@pytest.mark.parametrize("mode", ["canonical", "consistent"])
def test_bridge(synth_file, tmp_path, mode):
    assert run(["bridge", "--input", str(synth_file), "--mode", mode, "--out-dir", str(tmp_path)]) == 0
    (row,) = read_csv(tmp_path / "bridge.csv")
    assert float(row["auroc"]) > 0.5 and float(row["delta_H"]) > 0
    assert len(read_csv(tmp_path / "flips.csv")) == 600


def test_bridge_canonical_matches_consistent_for_softmax(synth_file, tmp_path):
    run(["bridge", "--input", str(synth_file), "--out-dir", str(tmp_path / "c")])
    run(["bridge", "--input", str(synth_file), "--mode", "consistent", "--out-dir", str(tmp_path / "m")])
    assert (tmp_path / "c" / "flips.csv").read_bytes() == (tmp_path / "m" / "flips.csv").read_bytes()


def test_sweep_equipoise_row(tmp_path):
    recs = generate(SynthConfig(n=50, seed=3, paraphrase_count=2, paraphrase_jitter=0.5))
    recs.append(PredictionRecord("eq", 0.3, 0.3, 1))
    src = tmp_path / "r.jsonl"
    write_records(src, recs)
    assert run(["sweep", "--input", str(src), "--coverages", "1.0,0.8,0.5", "--out-dir", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "sweep.csv")
    assert list(rows[0]) == ["coverage", "n", "tau", "error_pct", "flip_pct"]
    assert float(rows[0]["tau"]) == pytest.approx(0.6931, abs=5e-5)
    assert [int(r["n"]) for r in rows] == [51, 41, 26]


def test_gate(tmp_path):
    # p = 0.4 has entropy 0.673 > 0.53; margin 3 is confident
    src = tmp_path / "g.jsonl"
    write_records(src, [PredictionRecord("unsure", math.log(0.4 / 0.6), 0.0, 1),
                        PredictionRecord("sure", 3.0, 0.0, 1, passes=((3.0, 0.0), (2.5, 0.0)))])
    assert run(["gate", "--input", str(src), "--tau", "0.53", "--tier", "single", "--out-dir", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "decisions.csv")
    assert [r["decision"] for r in rows] == ["abstain", "answer"]
    # multi tier needs passes on every record
    assert run(["gate", "--input", str(src), "--tau", "0.53", "--tier", "multi", "--out-dir", str(tmp_path / "m")]) == 1


def test_corrupt(tmp_path):
    img = tmp_path / "cxr.png"
    Image.fromarray(np.random.default_rng(0).integers(0, 256, (24, 24)).astype(np.uint8), mode="L").save(img)
    assert run(["corrupt", "--images", str(img), "--out-dir", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "corruptions.csv")
    assert len(rows) == 15
    assert list(rows[0])[:3] == ["image_path", "kind", "severity"]
    for r in rows:
        assert Image.open(r["output_path"]).size == (24, 24)


def test_report(synth_file, tmp_path):
    assert run(["report", "--input", str(synth_file), "--method", "softmax", "--compare", "mcdrop",
                "--bootstrap", "100", "--metrics", "ece,brier,aurc,augrc", "--out-dir", str(tmp_path)]) == 0
    ci = read_csv(tmp_path / "ci.csv")
    assert len(ci) == 8
    for r in ci:
        assert float(r["lower"]) <= float(r["upper"])
    paired = read_csv(tmp_path / "paired.csv")
    assert [r["metric"] for r in paired] == ["ece", "brier", "aurc", "augrc"]
    assert all(0 <= float(r["p_value"]) <= 1 for r in paired)


def test_report_merge(synth_file, tmp_path):
    for m in ("softmax", "mcdrop"):
        run(["evaluate", "--input", str(synth_file), "--method", m, "--out-dir", str(tmp_path / m)])
    assert run(["report", "--merge", str(tmp_path / "softmax" / "metrics.csv"), str(tmp_path / "mcdrop" / "metrics.csv"),
                "--out-dir", str(tmp_path / "r")]) == 0
    rows = read_csv(tmp_path / "r" / "merged.csv")
    assert [r["method"] for r in rows] == ["softmax", "mcdrop"]


def test_report_unknown_metric(synth_file, tmp_path):
    assert run(["report", "--input", str(synth_file), "--metrics", "f1", "--bootstrap", "5",
                "--out-dir", str(tmp_path)]) == 1


def test_seed_env_default(monkeypatch, tmp_path):
    monkeypatch.setenv("YESNO_UQ_SEED", "17")
    assert run(["synth", "--n", "5", "--out-dir", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 17
