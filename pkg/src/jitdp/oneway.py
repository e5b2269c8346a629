"""OneWay: supervised pruning of the single-metric rankers.

Training data is used to score every candidate metric's ranker at the
effort cutoff; only the best metric survives and its ranker is applied to
the test slice. With no explicit goal the selection maximizes the mean of
recall, precision, F1 and Popt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .data import METRICS, RANKABLE, Dataset, MetricId
from .evaluation import (
    DEFAULT_FRACTION,
    DEFAULT_POPT_FRACTION,
    EvalScores,
    evaluate_ranking,
)
from .rankers import Ranking, rank_by_metric
from .supervised import UnfitError

GOALS = ("recall", "precision", "f1", "popt", "mean")


@dataclass(frozen=True)
class MetricScoreTable:
    """Training-side evaluation of every candidate metric's ranker."""

    scores: Mapping[MetricId, EvalScores]
    goal: str

    def goal_value(self, m: MetricId) -> float:
        s = self.scores[m]
        return s.mean() if self.goal == "mean" else s.get(self.goal)


@dataclass(frozen=True)
class OneWayModel:
    best: MetricId
    table: MetricScoreTable


def oneway_train(
    train: Dataset,
    goal: str = "mean",
    fraction: float = DEFAULT_FRACTION,
    popt_fraction: float = DEFAULT_POPT_FRACTION,
    include_size_metrics: bool = False,
) -> OneWayModel:
    """Score all candidate metrics on the training slice and keep the best.

    Ties go to the earliest metric in declaration order, so selection is
    reproducible. include_size_metrics=True widens the candidate pool to
    all 14 metrics (LA and LD included).
    """
    if goal not in GOALS:
        raise ValueError(f"unknown goal {goal!r}; known: {GOALS}")
    if len(train) == 0:
        raise UnfitError("cannot train OneWay on an empty slice")
    if float(train.efforts.sum()) <= 0:
        raise UnfitError("cannot train OneWay: training slice has zero total effort")
    candidates = METRICS if include_size_metrics else RANKABLE
    table: dict[MetricId, EvalScores] = {}
    for m in candidates:
        ranking = rank_by_metric(train, m, restrict=not include_size_metrics)
        table[m], _ = evaluate_ranking(ranking, fraction, popt_fraction)
    score_table = MetricScoreTable(scores=table, goal=goal)
    best = candidates[0]
    best_value = score_table.goal_value(best)
    for m in candidates[1:]:
        value = score_table.goal_value(m)
        if value > best_value:
            best, best_value = m, value
    return OneWayModel(best=best, table=score_table)


def oneway_predict(best: MetricId, test: Dataset) -> Ranking:
    """Rank the test slice with the selected metric's unsupervised ranker."""
    if best not in METRICS:
        raise ValueError(f"unknown metric {best!r}")
    return rank_by_metric(test, best, restrict=False)
