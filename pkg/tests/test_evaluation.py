import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jitdp import LiftCurve, confusion_scores, effort_cutoff, evaluate_ranking, popt
from jitdp.rankers import Ranking


def ranking_in_given_order(efforts, labels):
    n = len(efforts)
    return Ranking(
        order=np.arange(n),
        scores=np.arange(n, 0, -1, dtype=float),
        efforts=np.asarray(efforts, dtype=float),
        labels=np.asarray(labels, dtype=bool),
    )


# --- independent oracles -----------------------------------------------------

def oracle_area(efforts, labels, fraction):
    """Trapezoid area of the cumulative lift curve, straightforwardly."""
    total_e = sum(efforts)
    total_d = sum(labels)
    pts = [(0.0, 0.0)]
    ce = cd = 0.0
    for e, b in zip(efforts, labels):
        ce += e
        cd += b
        pts.append((ce / total_e, cd / total_d))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 >= fraction:
            break
        if x1 <= fraction:
            area += (x1 - x0) * (y0 + y1) / 2.0
        else:
            ym = y0 + (y1 - y0) * (fraction - x0) / (x1 - x0)
            area += (fraction - x0) * (y0 + ym) / 2.0
            break
    return area


def oracle_popt(efforts, labels, order, fraction):
    """Popt from exhaustive permutation search for the best/worst areas."""
    base = list(zip(efforts, labels))
    areas = []
    for perm in itertools.permutations(range(len(base))):
        e = [efforts[i] for i in perm]
        b = [labels[i] for i in perm]
        areas.append(oracle_area(e, b, fraction))
    s_opt, s_worst = max(areas), min(areas)
    s_m = oracle_area([efforts[i] for i in order], [labels[i] for i in order], fraction)
    if s_opt - s_worst < 1e-12:
        return 0.5
    return min(1.0, max(0.0, 1.0 - (s_opt - s_m) / (s_opt - s_worst)))


# --- effort cutoff -----------------------------------------------------------

def test_cutoff_uniform_efforts():
    r = ranking_in_given_order([10, 10, 10, 10, 10], [0, 0, 0, 0, 0])
    assert list(effort_cutoff(r, 0.2)) == [0]


def test_cutoff_strict_budget_excludes_straddler():
    r = ranking_in_given_order([30, 10, 10], [0, 0, 0])
    assert list(effort_cutoff(r, 0.2)) == []


def test_cutoff_full_fraction_inspects_all():
    r = ranking_in_given_order([3, 1, 4], [0, 0, 0])
    assert list(effort_cutoff(r, 1.0)) == [0, 1, 2]


def test_cutoff_zero_effort_records_at_boundary_included():
    r = ranking_in_given_order([10, 0, 0, 40], [0, 0, 0, 0])
    assert list(effort_cutoff(r, 0.2)) == [0, 1, 2]


def test_cutoff_zero_total_effort_degenerate():
    r = ranking_in_given_order([0, 0], [1, 0])
    assert list(effort_cutoff(r, 0.5)) == []


def test_cutoff_rejects_bad_fraction():
    r = ranking_in_given_order([1], [0])
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            effort_cutoff(r, bad)


# --- confusion ---------------------------------------------------------------

def test_confusion_hand_counts():
    # inspected set of 4 records with 1 defective, 10 defective in total:
    # TP=1 FP=3 FN=9
    efforts = [1, 1, 1, 1] + [100] * 10
    labels = [0, 1, 0, 0] + [1] * 9 + [0]
    labels = labels[:14]
    r = ranking_in_given_order(efforts[:14], labels)
    assert sum(labels) == 10
    recall, precision, f1 = confusion_scores(r, 4 / sum(efforts[:14]))
    assert precision == pytest.approx(0.25)
    assert recall == pytest.approx(0.1)
    assert f1 == pytest.approx(2 * 0.25 * 0.1 / 0.35, abs=1e-12)


def test_confusion_all_defective_first():
    r = ranking_in_given_order([1, 1, 1, 1, 1], [1, 1, 0, 0, 0])
    recall, precision, _ = confusion_scores(r, 0.4)
    assert recall == 1.0
    assert precision == 1.0


def test_confusion_at_full_fraction():
    labels = [0, 1, 0, 1, 1]
    r = ranking_in_given_order([2, 3, 1, 5, 4], labels)
    recall, precision, _ = confusion_scores(r, 1.0)
    assert recall == 1.0
    assert precision == pytest.approx(np.mean(labels))


def test_confusion_no_defects_flagged_zero():
    r = ranking_in_given_order([1, 2], [0, 0])
    recall, precision, f1 = confusion_scores(r, 1.0)
    assert recall == 0.0
    assert precision == 0.0
    assert f1 == 0.0


# --- popt --------------------------------------------------------------------

def density_order(efforts, labels, descending=True):
    dens = [
        (np.inf if b and e == 0 else (b / e if e > 0 else 0.0))
        for e, b in zip(efforts, labels)
    ]
    idx = list(range(len(efforts)))
    idx.sort(key=lambda i: -dens[i] if descending else dens[i])
    return idx


def test_popt_optimal_is_one_worst_is_zero():
    efforts = [1.0, 2.0, 4.0, 1.0, 3.0]
    labels = [1, 0, 1, 0, 1]
    for fraction in (0.2, 0.5, 1.0):
        opt = density_order(efforts, labels)
        worst = density_order(efforts, labels, descending=False)
        r_opt = ranking_in_given_order(
            [efforts[i] for i in opt], [labels[i] for i in opt]
        )
        r_worst = ranking_in_given_order(
            [efforts[i] for i in worst], [labels[i] for i in worst]
        )
        assert popt(r_opt, fraction) == pytest.approx(1.0)
        assert popt(r_worst, fraction) == pytest.approx(0.0)


def test_popt_three_record_example():
    # (effort, label) = (1,1), (1,0), (2,1) in the given order, full curve:
    # optimal area 0.6875, worst 0.3125, predicted 0.5625 -> 2/3
    r = ranking_in_given_order([1, 1, 2], [1, 0, 1])
    expected = oracle_popt([1, 1, 2], [1, 0, 1], [0, 1, 2], 1.0)
    assert expected == pytest.approx(2.0 / 3.0)
    assert popt(r, 1.0) == pytest.approx(expected)


def test_popt_matches_permutation_oracle_on_small_slices():
    rng = np.random.default_rng(7)
    for trial in range(25):
        n = int(rng.integers(2, 7))
        efforts = rng.integers(0, 5, n).astype(float)
        labels = rng.integers(0, 2, n).astype(int)
        if labels.sum() == 0 or efforts.sum() == 0:
            continue
        order = list(rng.permutation(n))
        r = ranking_in_given_order(
            [efforts[i] for i in order], [labels[i] for i in order]
        )
        for fraction in (0.2, 1.0):
            got = popt(r, fraction)
            want = oracle_popt(list(efforts), list(labels), order, fraction)
            assert got == pytest.approx(want, abs=1e-9), (efforts, labels, order)


def test_popt_best_permutation_equals_density_sort():
    rng = np.random.default_rng(11)
    for trial in range(10):
        n = int(rng.integers(2, 8))
        efforts = rng.integers(0, 6, n).astype(float)
        labels = rng.integers(0, 2, n).astype(int)
        if labels.sum() == 0 or efforts.sum() == 0:
            continue
        for fraction in (0.2, 1.0):
            best = max(
                oracle_area([efforts[i] for i in p], [labels[i] for i in p], fraction)
                for p in itertools.permutations(range(n))
            )
            opt = density_order(efforts, labels)
            s_opt = oracle_area(
                [efforts[i] for i in opt], [labels[i] for i in opt], fraction
            )
            assert s_opt == pytest.approx(best, abs=1e-12)


def test_popt_uniform_density_is_half():
    r = ranking_in_given_order([2, 2, 2], [1, 1, 1])
    assert popt(r, 1.0) == 0.5


def test_popt_reversal_complements_at_full_fraction():
    rng = np.random.default_rng(3)
    for trial in range(20):
        n = int(rng.integers(2, 12))
        efforts = rng.uniform(0.5, 5.0, n)  # positive, distinct densities a.s.
        labels = rng.integers(0, 2, n).astype(bool)
        if labels.sum() == 0:
            continue
        fwd = ranking_in_given_order(efforts, labels)
        rev = ranking_in_given_order(efforts[::-1], labels[::-1])
        assert popt(fwd, 1.0) + popt(rev, 1.0) == pytest.approx(1.0, abs=1e-9)


@given(
    data=st.lists(
        st.tuples(st.integers(0, 8), st.booleans()), min_size=1, max_size=50
    ),
    fraction=st.sampled_from([0.1, 0.2, 0.5, 1.0]),
)
@settings(max_examples=120, deadline=None)
def test_popt_bounds_property(data, fraction):
    efforts = [float(e) for e, _ in data]
    labels = [b for _, b in data]
    r = ranking_in_given_order(efforts, labels)
    assert 0.0 <= popt(r, fraction) <= 1.0


@given(
    data=st.lists(
        st.tuples(st.integers(0, 8), st.booleans()), min_size=1, max_size=50
    )
)
@settings(max_examples=80, deadline=None)
def test_recall_monotone_in_fraction(data):
    efforts = [float(e) for e, _ in data]
    labels = [b for _, b in data]
    r = ranking_in_given_order(efforts, labels)
    recalls = [confusion_scores(r, f)[0] for f in (0.1, 0.25, 0.5, 0.75, 1.0)]
    assert recalls == sorted(recalls)


# --- lift curve --------------------------------------------------------------

def test_lift_curve_endpoints_and_area():
    efforts = np.array([1.0, 2.0, 1.0])
    labels = np.array([1.0, 0.0, 1.0])
    curve = LiftCurve.from_order(efforts, labels)
    assert (curve.x[0], curve.y[0]) == (0.0, 0.0)
    assert (curve.x[-1], curve.y[-1]) == (1.0, 1.0)
    for fraction in (0.2, 0.7, 1.0):
        assert curve.area(fraction) == pytest.approx(
            oracle_area(list(efforts), list(labels), fraction), abs=1e-12
        )


def test_evaluate_ranking_degenerate_reasons():
    scores, reason = evaluate_ranking(ranking_in_given_order([0, 0], [1, 0]))
    assert reason == "zero total effort"
    scores, reason = evaluate_ranking(ranking_in_given_order([1, 2], [0, 0]))
    assert reason == "no defective changes"
    scores, reason = evaluate_ranking(ranking_in_given_order([2, 2], [1, 1]))
    assert reason == "uniform defect density"
    assert scores.popt == 0.5
    scores, reason = evaluate_ranking(ranking_in_given_order([1, 9], [1, 0]))
    assert reason is None
