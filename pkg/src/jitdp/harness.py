"""Sliding-window time-wise cross-validation over month buckets.

Each window trains on months i and i+1 and tests on months i+4 and i+5,
so test data always postdates training data; a project with N month
buckets yields N-5 windows. Degenerate windows produce skip records with
a reason instead of aborting the run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RANKABLE, Dataset, MonthBucket, group_by_month
from .evaluation import (
    DEFAULT_FRACTION,
    DEFAULT_POPT_FRACTION,
    EvalScores,
    evaluate_ranking,
)
from .oneway import oneway_predict, oneway_train
from .rankers import rank_by_churn, rank_by_metric
from .supervised import (
    CLASSIFIER_KINDS,
    ClassifierConfig,
    UnfitError,
    fit_classifier,
    fit_ealr,
    predict_classifier,
    predict_ealr,
)

TRAIN_OFFSETS = (0, 1)
TEST_OFFSETS = (4, 5)
WINDOW_SPAN = 6

UNSUPERVISED_LEARNERS = tuple(m.value for m in RANKABLE)
SUPERVISED_LEARNERS = ("ealr",) + CLASSIFIER_KINDS
ALL_LEARNERS = UNSUPERVISED_LEARNERS + ("churn",) + SUPERVISED_LEARNERS + ("oneway",)

WINDOW_MODES = ("populated", "calendar")

_METRIC_BY_NAME = {m.value: m for m in RANKABLE}


class InsufficientHistoryError(ValueError):
    """Fewer than six month buckets: no window fits."""


@dataclass(frozen=True)
class WindowSpec:
    """One sliding-window experiment, bucket indices 0-based."""

    ordinal: int  # 1-based
    train_buckets: tuple[int, int]
    test_buckets: tuple[int, int]


@dataclass(frozen=True)
class ExperimentResult:
    project: str
    learner: str
    window: int
    scores: EvalScores | None
    skipped: bool = False
    reason: str = ""
    degenerate: bool = False


def make_windows(buckets: list[MonthBucket]) -> list[WindowSpec]:
    """All N-5 sliding windows over the bucket sequence."""
    n = len(buckets)
    if n < WINDOW_SPAN:
        raise InsufficientHistoryError(
            f"need at least {WINDOW_SPAN} month buckets, got {n}"
        )
    return [
        WindowSpec(
            ordinal=i + 1,
            train_buckets=(i + TRAIN_OFFSETS[0], i + TRAIN_OFFSETS[1]),
            test_buckets=(i + TEST_OFFSETS[0], i + TEST_OFFSETS[1]),
        )
        for i in range(n - WINDOW_SPAN + 1)
    ]


def calendar_buckets(ds: Dataset) -> list[MonthBucket]:
    """Buckets for every calendar month between the first and last change,
    including empty ones."""
    populated = group_by_month(ds)
    months = ds.dates.astype("datetime64[M]")
    first = int(months[0].astype(int))
    last = int(months[-1].astype(int))
    by_key = {b.key: b for b in populated}
    out = []
    for k in range(first, last + 1):
        key = (1970 + k // 12, k % 12 + 1)
        if key in by_key:
            out.append(by_key[key])
        else:
            out.append(MonthBucket(key=key, data=ds[0:0]))
    return out


def _slice(buckets: list[MonthBucket], pair: tuple[int, int]) -> Dataset:
    return Dataset.concat(buckets[pair[0]].data, buckets[pair[1]].data)


def _window_seed(base: int, ordinal: int) -> int:
    return int(np.random.SeedSequence([base, ordinal]).generate_state(1)[0])


def run_experiment(
    ds: Dataset,
    learners: list[str],
    fraction: float = DEFAULT_FRACTION,
    *,
    popt_fraction: float = DEFAULT_POPT_FRACTION,
    goal: str = "mean",
    recipe: str = "kamei",
    clf: ClassifierConfig | None = None,
    window_mode: str = "populated",
    seed: int = 0,
) -> list[ExperimentResult]:
    """Run every learner over every time-wise window of one project.

    Unsupervised rankers are built directly on the test slice; supervised
    learners and OneWay fit on the train slice first. Results come back in
    (window, learner) order, learners in the order given.
    """
    if not learners:
        raise ValueError("no learners configured")
    unknown = [l for l in learners if l not in ALL_LEARNERS]
    if unknown:
        raise ValueError(f"unknown learners {unknown}; known: {list(ALL_LEARNERS)}")
    if window_mode not in WINDOW_MODES:
        raise ValueError(f"unknown window mode {window_mode!r}; known: {WINDOW_MODES}")
    if clf is None:
        clf = ClassifierConfig()

    buckets = group_by_month(ds) if window_mode == "populated" else calendar_buckets(ds)
    windows = make_windows(buckets)
    results: list[ExperimentResult] = []
    for w in windows:
        train = _slice(buckets, w.train_buckets)
        test = _slice(buckets, w.test_buckets)
        single_class = len(train) > 0 and (train.y.all() or not train.y.any())
        for name in learners:
            results.append(
                _run_learner(
                    name, ds.project, w, train, test, single_class, fraction,
                    popt_fraction, goal, recipe, clf, seed,
                )
            )
    return results


def _skip(project: str, name: str, w: WindowSpec, reason: str) -> ExperimentResult:
    return ExperimentResult(
        project=project, learner=name, window=w.ordinal,
        scores=None, skipped=True, reason=reason,
    )


def _run_learner(
    name: str,
    project: str,
    w: WindowSpec,
    train: Dataset,
    test: Dataset,
    single_class: bool,
    fraction: float,
    popt_fraction: float,
    goal: str,
    recipe: str,
    clf: ClassifierConfig,
    seed: int,
) -> ExperimentResult:
    if len(test) == 0:
        return _skip(project, name, w, "empty test window")
    needs_train = name in SUPERVISED_LEARNERS or name == "oneway"
    if needs_train and len(train) == 0:
        return _skip(project, name, w, "empty train window")
    try:
        if name in _METRIC_BY_NAME:
            ranking = rank_by_metric(test, _METRIC_BY_NAME[name])
        elif name == "churn":
            ranking = rank_by_churn(test)
        elif name == "ealr":
            model = fit_ealr(train, recipe)
            ranking = predict_ealr(model, test)
        elif name in CLASSIFIER_KINDS:
            if single_class:
                return _skip(project, name, w, "single-class training window")
            config = clf.with_seed(_window_seed(seed, w.ordinal))
            model = fit_classifier(name, train, config)
            ranking = predict_classifier(model, test)
        else:  # oneway
            model = oneway_train(
                train, goal=goal, fraction=fraction, popt_fraction=popt_fraction
            )
            ranking = oneway_predict(model.best, test)
    except UnfitError as e:
        return _skip(project, name, w, str(e))
    scores, reason = evaluate_ranking(ranking, fraction, popt_fraction)
    return ExperimentResult(
        project=project,
        learner=name,
        window=w.ordinal,
        scores=scores,
        skipped=False,
        reason=reason or "",
        degenerate=reason is not None,
    )
