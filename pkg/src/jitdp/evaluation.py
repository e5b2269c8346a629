"""Effort-capped evaluation: confusion metrics and the Popt lift-chart score.

All measures are computed after cutting the ranking at a fixed share of the
total inspection effort (default 20%). The cut is strict: the first record
that would push cumulative effort past the budget is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .rankers import Ranking

DEFAULT_FRACTION = 0.2

# The published Popt tables normalize over the whole lift curve; the capped
# variant (popt_fraction = effort fraction) is kept selectable.
DEFAULT_POPT_FRACTION = 1.0

# Relative slack absorbing float rounding when a record's cumulative effort
# lands exactly on the budget.
_BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class EvalScores:
    """Recall/Precision/F1/Popt for one ranking at one effort fraction."""

    recall: float
    precision: float
    f1: float
    popt: float
    fraction: float = DEFAULT_FRACTION

    def mean(self) -> float:
        return (self.recall + self.precision + self.f1 + self.popt) / 4.0

    def get(self, measure: str) -> float:
        return getattr(self, measure)


@dataclass(frozen=True)
class LiftCurve:
    """Cumulative (effort fraction, defect fraction) curve for one ordering."""

    x: np.ndarray
    y: np.ndarray

    @classmethod
    def from_order(cls, efforts: np.ndarray, labels: np.ndarray) -> "LiftCurve":
        efforts = np.asarray(efforts, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        total_e = float(efforts.sum())
        total_d = float(labels.sum())
        if total_e <= 0 or total_d <= 0:
            raise ValueError("lift curve needs positive total effort and defects")
        x = np.concatenate(([0.0], np.cumsum(efforts) / total_e))
        y = np.concatenate(([0.0], np.cumsum(labels) / total_d))
        return cls(x=x, y=y)

    def area(self, fraction: float = 1.0) -> float:
        x0, x1 = self.x[:-1], self.x[1:]
        y0, y1 = self.y[:-1], self.y[1:]
        xr = np.minimum(x1, fraction)
        xl = np.minimum(x0, fraction)
        w = xr - xl
        dx = x1 - x0
        safe = np.where(dx > 0.0, dx, 1.0)
        t = np.where(dx > 0.0, (xr - x0) / safe, 1.0)
        yr = y0 + (y1 - y0) * t
        return float(np.sum(w * (y0 + yr) * 0.5))


def _check_fraction(fraction: float) -> float:
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"effort fraction must be in (0, 1], got {fraction}")
    return float(fraction)


def _inspected_count(r: Ranking, fraction: float) -> int:
    total = float(r.efforts.sum())
    if total <= 0:
        return 0
    budget = fraction * total
    return kernels.prefix_within_budget(r.efforts, budget, _BUDGET_SLACK * total)


def effort_cutoff(r: Ranking, fraction: float = DEFAULT_FRACTION) -> np.ndarray:
    """Original indices of the records inspected within the effort budget.

    Walks the ranking accumulating effort and keeps every record while the
    running sum stays within fraction * total; zero total effort yields an
    empty (degenerate) set.
    """
    fraction = _check_fraction(fraction)
    return r.order[: _inspected_count(r, fraction)]


def confusion_scores(
    r: Ranking, fraction: float = DEFAULT_FRACTION
) -> tuple[float, float, float]:
    """(recall, precision, f1) of treating the inspected set as the
    predicted-defective set. Empty inspected set gives precision 0; a slice
    without defective records gives recall 0."""
    fraction = _check_fraction(fraction)
    k = _inspected_count(r, fraction)
    tp = float(r.labels[:k].sum())
    positives = float(r.labels.sum())
    recall = tp / positives if positives > 0 else 0.0
    precision = tp / k if k > 0 else 0.0
    if precision > 0.0 and recall > 0.0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return recall, precision, f1


def _density_orders(efforts: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dens = np.zeros(len(efforts))
    nonzero = efforts > 0
    dens[nonzero] = labels[nonzero].astype(np.float64) / efforts[nonzero]
    dens[(~nonzero) & labels] = np.inf
    optimal = np.argsort(-dens, kind="stable")
    worst = np.argsort(dens, kind="stable")
    return optimal, worst


def _popt_full(r: Ranking, fraction: float) -> tuple[float, str | None]:
    total_e = float(r.efforts.sum())
    total_d = float(r.labels.sum())
    if total_e <= 0:
        return 0.5, "zero total effort"
    if total_d <= 0:
        return 0.5, "no defective changes"
    labels = r.labels.astype(np.float64)
    optimal, worst = _density_orders(r.efforts, r.labels)
    s_m = kernels.lift_area(r.efforts, labels, total_e, total_d, fraction)
    s_opt = kernels.lift_area(
        r.efforts[optimal], labels[optimal], total_e, total_d, fraction
    )
    s_worst = kernels.lift_area(
        r.efforts[worst], labels[worst], total_e, total_d, fraction
    )
    denom = s_opt - s_worst
    if denom < 1e-12:
        return 0.5, "uniform defect density"
    return float(np.clip(1.0 - (s_opt - s_m) / denom, 0.0, 1.0)), None


def popt(r: Ranking, fraction: float = DEFAULT_FRACTION) -> float:
    """Normalized area score of the ranking's lift curve in [0, 1].

    1 - (S(optimal) - S(ranking)) / (S(optimal) - S(worst)), with areas
    taken up to x = fraction. The optimal curve orders records by actual
    defect density descending (zero-effort defective records first), the
    worst curve ascending. Returns 0.5 when the slice carries no ordering
    information (no defects, no effort, or all densities identical).
    """
    return _popt_full(r, _check_fraction(fraction))[0]


def evaluate_ranking(
    r: Ranking,
    fraction: float = DEFAULT_FRACTION,
    popt_fraction: float = DEFAULT_POPT_FRACTION,
) -> tuple[EvalScores, str | None]:
    """All four measures plus a degeneracy reason (None when the window is
    informative). Recall/precision/F1 are capped at `fraction` of total
    effort; the Popt areas run to `popt_fraction` (whole curve by default,
    which is what the published median tables use)."""
    fraction = _check_fraction(fraction)
    popt_fraction = _check_fraction(popt_fraction)
    if len(r) == 0:
        return EvalScores(0.0, 0.0, 0.0, 0.5, fraction), "empty slice"
    recall, precision, f1 = confusion_scores(r, fraction)
    p, reason = _popt_full(r, popt_fraction)
    return EvalScores(recall, precision, f1, p, fraction), reason
