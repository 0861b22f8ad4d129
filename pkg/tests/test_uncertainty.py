import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_record
from yesno_uq.metrics import binary_entropy, calibration_metrics, score_margin
from yesno_uq.records import Member
from yesno_uq.uncertainty import (
    Strategy,
    aggregate,
    decompose,
    decompose_margins,
    disagreement_matrix,
    member_diagnostics,
    member_predictions,
)

H_07 = 0.6108643020548935
# [0.3, 0.5, 0.7] via mpmath: total ln 2, aleatoric mean of three entropies
ALEATORIC_357 = 0.6382919282232441
EPISTEMIC_357 = 0.05485525233670123


def test_identical_samples():
    d = decompose([0.7, 0.7, 0.7])
    assert d.total == d.aleatoric == pytest.approx(H_07, abs=1e-15)
    assert d.epistemic == 0.0


def test_maximal_disagreement():
    d = decompose([0.0, 1.0])
    assert d.mean_probability == 0.5
    assert d.total == pytest.approx(math.log(2), abs=1e-15)
    assert d.aleatoric == 0.0
    assert d.epistemic == pytest.approx(math.log(2), abs=1e-15)
    assert d.ratio == pytest.approx(1.0)


def test_three_point_decomposition():
    d = decompose([0.3, 0.5, 0.7])
    assert d.aleatoric == pytest.approx(ALEATORIC_357, abs=1e-14)
    assert d.epistemic == pytest.approx(EPISTEMIC_357, abs=1e-14)


def test_single_sample_rejected():
    with pytest.raises(ValueError):
        decompose([0.4])


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        decompose([0.4, 1.2])


def test_zero_entropy_ratio():
    assert decompose([1.0, 1.0]).ratio == 0.0


@given(st.lists(st.floats(0, 1), min_size=2, max_size=32))
def test_identity_and_nonnegativity(ps):
    d = decompose(ps)
    assert abs(d.total - d.aleatoric - d.epistemic) < 1e-12
    assert d.epistemic >= -1e-12


def test_margins_pathway_matches_probabilities():
    ms = [-1.0, 0.3, 2.0]
    a = decompose_margins(ms)
    b = decompose([score_margin(m, 1).probability for m in ms])
    assert a == b


def test_probability_average():
    # margins with sigma = 0.2 and 0.8
    lo, hi = math.log(0.2 / 0.8), math.log(0.8 / 0.2)
    p = aggregate([(lo, 0.0), (hi, 0.0)], Strategy.PROBABILITY_AVERAGE, label=1)
    assert p.probability == pytest.approx(0.5, abs=1e-15)


def test_logit_average():
    p = aggregate([(-2.0, 0.0), (2.0, 0.0)], "logit_average", label=1)
    assert p.probability == 0.5


def test_majority_vote_fraction():
    p = aggregate([(1.0, 0.0), (2.0, 0.0), (-1.0, 0.0)], "vote", label=1)
    assert p.predicted == 1
    assert p.probability == pytest.approx(2 / 3)
    assert p.entropy == pytest.approx(binary_entropy(2 / 3))


def test_majority_vote_tie_goes_to_yes():
    p = aggregate([(1.0, 0.0), (-1.0, 0.0)], Strategy.MAJORITY_VOTE, label=0)
    assert p.predicted == 1 and p.probability == 0.5


def test_unanimous_strategies_agree():
    members = [(0.7, -0.2)] * 4
    a = aggregate(members, "prob", 1)
    b = aggregate(members, "logit", 1)
    assert a.probability == pytest.approx(b.probability, abs=1e-15)


def test_empty_members_rejected():
    with pytest.raises(ValueError):
        aggregate([], "prob")


def test_disagreement_identical():
    assert not disagreement_matrix([[1, 1, 1], [0, 0, 0]]).any()


def test_disagreement_complementary():
    m = disagreement_matrix([[1, 0], [0, 1], [1, 0]])
    np.testing.assert_array_equal(m, [[0.0, 1.0], [1.0, 0.0]])


def test_disagreement_brute_force():
    rows = [[1, 0, 1], [1, 1, 0], [0, 0, 0], [1, 0, 0]]
    m = disagreement_matrix(rows)
    for i, j in itertools.product(range(3), repeat=2):
        count = sum(1 for r in rows if r[i] != r[j])
        assert m[i, j] == count / 4
    np.testing.assert_array_equal(m, m.T)


def test_disagreement_ragged():
    with pytest.raises(ValueError, match="ragged"):
        disagreement_matrix([[1, 0], [1]])


def _with_members(margins, label, rid):
    return make_record(rid, margin=float(np.mean(margins)), label=label,
                       members=tuple(Member(k, m, 0.0) for k, m in enumerate(margins)))


def test_single_member_matches_single_model():
    rng = np.random.default_rng(0)
    recs = [_with_members([m], int(y), f"r{i}") for i, (m, y) in enumerate(zip(rng.normal(size=80), rng.random(80) < .5))]
    (diag,) = member_diagnostics(recs)
    single = calibration_metrics([score_margin(r.members[0].margin, r.label) for r in recs])
    assert (diag.accuracy, diag.ece, diag.brier, diag.nll) == (single.accuracy, single.ece, single.brier, single.nll)


def test_perfect_and_antiperfect_members():
    labels = [1, 0, 1, 1, 0, 0, 1]
    recs = []
    for i, y in enumerate(labels):
        good = 3.0 if y == 1 else -3.0
        recs.append(_with_members([good, -good], y, f"r{i}"))
    d0, d1 = member_diagnostics(recs)
    assert d0.accuracy == 1.0 and d1.accuracy == 0.0
    assert d0.aurc == 0.0 and d1.aurc == 1.0


def test_member_identical_to_aggregate():
    rng = np.random.default_rng(2)
    recs = [_with_members([m, m], int(y), f"r{i}") for i, (m, y) in enumerate(zip(rng.normal(size=50), rng.random(50) < .5))]
    agg = calibration_metrics([aggregate([(mm.logit_yes, mm.logit_no) for mm in r.members], "prob", r.label) for r in recs])
    d0 = member_diagnostics(recs)[0]
    assert d0.ece == pytest.approx(agg.ece, abs=1e-15)
    assert d0.brier == pytest.approx(agg.brier, abs=1e-15)


def test_member_order_mismatch_rejected():
    a = _with_members([1.0, 2.0], 1, "a")
    b = make_record("b", 1.0, 1, members=(Member(1, 1.0, 0.0), Member(0, 1.0, 0.0)))
    with pytest.raises(ValueError, match="seeds"):
        member_diagnostics([a, b])


def test_member_predictions_matrix():
    recs = [_with_members([1.0, -1.0, 0.0], 1, "a")]
    np.testing.assert_array_equal(member_predictions(recs), [[1, 0, 1]])
