import datetime as dt

import pytest

from jitdp import (
    ChangeRecord,
    Dataset,
    InsufficientHistoryError,
    group_by_month,
    make_windows,
    run_experiment,
)
from jitdp.data import METRICS, MetricId
from jitdp.harness import ALL_LEARNERS, calendar_buckets
from jitdp.supervised import ClassifierConfig
from jitdp.synth import synthetic_dataset


def record(year, month, day, label=False, la=2.0):
    metrics = {m: 1.0 for m in METRICS}
    metrics[MetricId.FIX] = 0.0
    metrics[MetricId.LA] = la
    return ChangeRecord(dt.date(year, month, day), metrics, label)


def months_dataset(n_months, per_month=4, gap_after=None):
    records = []
    year, month = 2003, 1
    for i in range(n_months):
        for j in range(per_month):
            records.append(record(year, month, j + 1, label=(j % 2 == 0)))
        step = 2 if gap_after is not None and i == gap_after else 1
        month += step
        while month > 12:
            month -= 12
            year += 1
    return Dataset.from_records("demo", records)


def test_make_windows_smallest_case():
    buckets = group_by_month(months_dataset(6))
    windows = make_windows(buckets)
    assert len(windows) == 1
    assert windows[0].train_buckets == (0, 1)
    assert windows[0].test_buckets == (4, 5)


def test_make_windows_counts():
    assert len(make_windows(group_by_month(months_dataset(7)))) == 2
    assert len(make_windows(group_by_month(months_dataset(12)))) == 7


def test_make_windows_insufficient_history():
    with pytest.raises(InsufficientHistoryError):
        make_windows(group_by_month(months_dataset(5)))


def test_single_learner_single_window():
    results = run_experiment(months_dataset(6), ["lt"])
    assert len(results) == 1
    r = results[0]
    assert (r.learner, r.window, r.skipped) == ("lt", 1, False)


def test_temporal_safety():
    ds = synthetic_dataset(months=10, changes_per_month=30, seed=6)
    buckets = group_by_month(ds)
    for w in make_windows(buckets):
        train_max = max(buckets[i].data.dates.max() for i in w.train_buckets)
        test_min = min(buckets[i].data.dates.min() for i in w.test_buckets)
        train_month = train_max.astype("datetime64[M]")
        test_month = test_min.astype("datetime64[M]")
        assert test_month > train_month


def test_window_count_matches_formula():
    for months in (6, 9, 14):
        ds = synthetic_dataset(months=months, changes_per_month=20, seed=months)
        results = run_experiment(ds, ["age"])
        assert len(results) == months - 5


def test_unsupervised_results_unaffected_by_supervised_learners():
    ds = synthetic_dataset(months=8, changes_per_month=60, seed=14)
    alone = [r for r in run_experiment(ds, ["lt"], seed=5)]
    mixed = [
        r
        for r in run_experiment(
            ds,
            ["lt", "ealr", "forest"],
            seed=5,
            clf=ClassifierConfig(n_trees=5),
        )
        if r.learner == "lt"
    ]
    assert [r.scores for r in alone] == [r.scores for r in mixed]


def test_deterministic_given_seed():
    ds = synthetic_dataset(months=7, changes_per_month=50, seed=2)
    cfg = ClassifierConfig(n_trees=5)
    a = run_experiment(ds, ["forest", "oneway"], seed=9, clf=cfg)
    b = run_experiment(ds, ["forest", "oneway"], seed=9, clf=cfg)
    assert a == b


def test_single_class_training_window_skips_classifiers_only():
    records = []
    # months 1-2 all clean; months 3-8 mixed
    for month in range(1, 9):
        for day in (1, 2, 3, 4):
            label = (day % 2 == 0) if month >= 3 else False
            records.append(record(2004, month, day, label=label))
    ds = Dataset.from_records("demo", records)
    results = run_experiment(ds, ["lt", "ealr", "knn", "tree", "oneway"])
    first = {r.learner: r for r in results if r.window == 1}
    assert not first["lt"].skipped
    assert not first["ealr"].skipped  # regression target is all zeros, still fits
    assert not first["oneway"].skipped  # degenerate table, proceeds
    assert first["knn"].skipped and "single-class" in first["knn"].reason
    assert first["tree"].skipped and "single-class" in first["tree"].reason
    later = {r.learner: r for r in results if r.window == 3}
    assert not later["knn"].skipped


def test_calendar_mode_inserts_empty_months():
    ds = months_dataset(8, gap_after=2)  # month 4 of the span is empty
    populated = group_by_month(ds)
    calendar = calendar_buckets(ds)
    assert len(calendar) == len(populated) + 1
    sizes = [len(b.data) for b in calendar]
    assert sizes.count(0) == 1
    results_pop = run_experiment(ds, ["lt"], window_mode="populated")
    results_cal = run_experiment(ds, ["lt"], window_mode="calendar")
    assert len(results_cal) == len(results_pop) + 1
    # windows whose test slice is the empty month pair still yield results
    # because the other test month has data; fully empty slices skip
    assert all(
        ("empty" in r.reason) == r.skipped for r in results_cal
    )


def test_unknown_learner_and_empty_set_rejected():
    ds = months_dataset(6)
    with pytest.raises(ValueError, match="unknown learners"):
        run_experiment(ds, ["lt", "magic"])
    with pytest.raises(ValueError, match="no learners"):
        run_experiment(ds, [])
    with pytest.raises(ValueError, match="window mode"):
        run_experiment(ds, ["lt"], window_mode="weekly")


def test_all_learners_produce_rows():
    ds = synthetic_dataset(months=6, changes_per_month=40, seed=31)
    results = run_experiment(
        ds, list(ALL_LEARNERS), seed=3, clf=ClassifierConfig(n_trees=4)
    )
    assert len(results) == len(ALL_LEARNERS)
    assert {r.learner for r in results} == set(ALL_LEARNERS)
    for r in results:
        if not r.skipped:
            assert 0.0 <= r.scores.popt <= 1.0
            assert 0.0 <= r.scores.recall <= 1.0
