"""Unsupervised single-metric rankers.

Each ranker orders changes by the reciprocal of one change metric, so
changes with smaller metric values are inspected first. A zero metric
value scores +inf and ranks ahead of everything else; mutual zero ties
keep input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RANKABLE, Dataset, MetricId


class MetricRejectedError(ValueError):
    """Raised when ranking is requested on a non-rankable metric."""


@dataclass(frozen=True)
class Ranking:
    """An inspection order over a test slice.

    `order` is a permutation of the slice indices; `scores`, `efforts` and
    `labels` are aligned with `order` (i.e. already permuted).
    """

    order: np.ndarray
    scores: np.ndarray
    efforts: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        n = len(self.order)
        if not (len(self.scores) == len(self.efforts) == len(self.labels) == n):
            raise ValueError("ranking arrays must have equal length")
        if n:
            if np.isnan(self.scores).any():
                raise ValueError("ranking scores must not be NaN")
            # elementwise compare instead of diff: inf - inf would warn
            if np.any(self.scores[:-1] < self.scores[1:]):
                raise ValueError("ranking scores must be nonincreasing")
            if np.bincount(self.order, minlength=n).max() != 1:
                raise ValueError("ranking order must be a permutation")

    def __len__(self) -> int:
        return len(self.order)

    @classmethod
    def build(
        cls,
        scores: np.ndarray,
        efforts: np.ndarray,
        labels: np.ndarray,
        tie: str = "stable",
    ) -> "Ranking":
        """Sort descending by score. tie="stable" keeps input order among
        equals; tie="effort" prefers cheaper records among equals."""
        scores = np.asarray(scores, dtype=np.float64)
        efforts = np.asarray(efforts, dtype=np.float64)
        labels = np.asarray(labels, dtype=bool)
        if tie == "stable":
            order = np.argsort(-scores, kind="stable")
        elif tie == "effort":
            order = np.lexsort((efforts, -scores))
        else:
            raise ValueError(f"unknown tie rule {tie!r}")
        return cls(
            order=order,
            scores=scores[order],
            efforts=efforts[order],
            labels=labels[order],
        )


def _reciprocal_ranking(values: np.ndarray, ds: Dataset) -> Ranking:
    values = np.asarray(values, dtype=np.float64)
    scores = np.full(len(values), np.inf)
    # overflow to +inf is acceptable: subnormal metric values rank first
    # like exact zeros
    with np.errstate(over="ignore"):
        np.divide(1.0, values, out=scores, where=values != 0)
    return Ranking.build(scores, ds.efforts, ds.y, tie="stable")


def rank_by_metric(ds: Dataset, m: MetricId, *, restrict: bool = True) -> Ranking:
    """Rank changes by 1/metric descending (smaller metric first).

    LA and LD are rejected unless restrict=False (they define effort, so
    ranking on them directly games the effort-capped evaluation).
    """
    if restrict and m not in RANKABLE:
        raise MetricRejectedError(
            f"metric {m.name} is not rankable; choose one of "
            f"{[x.name for x in RANKABLE]}"
        )
    return _reciprocal_ranking(ds.metric_values(m), ds)


def rank_by_churn(ds: Dataset) -> Ranking:
    """Rank changes by 1/(LA+LD): smallest total churn first."""
    return _reciprocal_ranking(ds.efforts, ds)
