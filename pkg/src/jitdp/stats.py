"""Nonparametric comparison of paired per-window score distributions.

Wilcoxon signed-rank (exact by enumeration up to n=25, normal approximation
with continuity and tie correction above), Benjamini-Hochberg step-up
adjustment, Cliff's delta with the conventional magnitude bands, and the
three-way better/tie/worse verdict combining both gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

EXACT_LIMIT = 25
ALPHA = 0.05
NEGLIGIBLE = 0.147
SMALL = 0.33
MEDIUM = 0.474

BETTER = "BETTER"
TIE = "TIE"
WORSE = "WORSE"


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # W+: rank sum of positive differences
    pvalue: float
    n_used: int  # differences contributing after zero handling
    exact: bool
    all_zero: bool


def _exact_two_sided(ranks: np.ndarray, w_plus: float) -> float:
    """Exact two-sided p by counting sign assignments through the rank-sum
    distribution (ranks doubled so average ranks stay integral)."""
    r2 = np.rint(2.0 * ranks).astype(np.int64)
    total = int(r2.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in r2:
        counts[r:] += counts[: total + 1 - r]
    assignments = 2.0 ** len(ranks)
    w2 = int(round(2.0 * w_plus))
    cdf = counts[: w2 + 1].sum() / assignments
    sf = counts[w2:].sum() / assignments
    return min(1.0, 2.0 * min(cdf, sf))


def wilcoxon_signed_rank(
    a: Sequence[float],
    b: Sequence[float],
    zero_method: str = "discard",
    exact_limit: int = EXACT_LIMIT,
) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    zero_method="discard" drops zero differences before ranking (the
    classical treatment); "pratt" ranks them but excludes their ranks from
    the statistic. All-zero differences give p = 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) == 0:
        raise ValueError("paired samples must be equal-length 1-D and nonempty")
    if zero_method not in ("discard", "pratt"):
        raise ValueError(f"unknown zero_method {zero_method!r}")
    d = a - b
    nonzero = d != 0
    if not nonzero.any():
        return WilcoxonResult(0.0, 1.0, 0, exact=True, all_zero=True)
    if zero_method == "discard":
        d = d[nonzero]
        ranks = rankdata(np.abs(d))
        used = ranks
        signs_pos = d > 0
        tie_vals = np.abs(d)
        n_zero = 0
    else:
        ranks = rankdata(np.abs(d))
        used = ranks[nonzero]
        signs_pos = d[nonzero] > 0
        tie_vals = np.abs(d)
        n_zero = int((~nonzero).sum())
    w_plus = float(used[signs_pos].sum())
    n_eff = len(used)
    if n_eff <= exact_limit:
        p = _exact_two_sided(used, w_plus)
        return WilcoxonResult(w_plus, p, n_eff, exact=True, all_zero=False)
    n = n_eff + n_zero
    mu = (n * (n + 1) - n_zero * (n_zero + 1)) / 4.0
    var = (n * (n + 1) * (2 * n + 1) - n_zero * (n_zero + 1) * (2 * n_zero + 1)) / 24.0
    _, tie_counts = np.unique(tie_vals[tie_vals != 0], return_counts=True)
    var -= float((tie_counts.astype(np.float64) ** 3 - tie_counts).sum()) / 48.0
    if var <= 0:
        return WilcoxonResult(w_plus, 1.0, n_eff, exact=False, all_zero=False)
    z = (abs(w_plus - mu) - 0.5) / math.sqrt(var)
    p = min(1.0, math.erfc(max(z, 0.0) / math.sqrt(2.0)))
    return WilcoxonResult(w_plus, p, n_eff, exact=False, all_zero=False)


def bh_adjust(pvals: Sequence[float]) -> np.ndarray:
    """Benjamini-Hochberg step-up adjustment, returned in input order."""
    p = np.asarray(pvals, dtype=np.float64)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("p-values must be a nonempty 1-D sequence")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    stepped = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum.accumulate(stepped[::-1])[::-1]
    adjusted = np.minimum(adjusted, 1.0)
    out = np.empty_like(adjusted)
    out[order] = adjusted
    return out


def magnitude_band(delta: float) -> str:
    ad = abs(delta)
    if ad < NEGLIGIBLE:
        return "negligible"
    if ad < SMALL:
        return "small"
    if ad < MEDIUM:
        return "medium"
    return "large"


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> tuple[float, str]:
    """Cliff's delta (#{a>b} - #{a<b}) / (|a| |b|) and its magnitude band."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be nonempty")
    bs = np.sort(b)
    greater = int(np.searchsorted(bs, a, side="left").sum())
    less = int((len(b) - np.searchsorted(bs, a, side="right")).sum())
    delta = (greater - less) / (len(a) * len(b))
    return delta, magnitude_band(delta)


@dataclass(frozen=True)
class ComparisonVerdict:
    learner: str
    baseline: str
    measure: str
    p_raw: float
    p_adj: float
    delta: float
    band: str
    color: str  # BETTER / TIE / WORSE from the learner's perspective


def verdict_color(p_adj: float, delta: float) -> str:
    """Significantly different (adjusted p < 0.05) AND non-negligible
    magnitude; the delta sign picks the direction."""
    if p_adj < ALPHA and abs(delta) >= NEGLIGIBLE:
        return BETTER if delta > 0 else WORSE
    return TIE


def verdict(
    a_scores: Sequence[float],
    b_scores: Sequence[float],
    family_pvalues: Sequence[float],
    *,
    learner: str = "A",
    baseline: str = "B",
    measure: str = "",
) -> ComparisonVerdict:
    """Verdict for one pair whose raw p sits among its family's p-values.

    The family is every comparison in the same (project, measure) group;
    the BH adjustment is taken across it.
    """
    res = wilcoxon_signed_rank(a_scores, b_scores)
    family = np.asarray(family_pvalues, dtype=np.float64)
    matches = np.flatnonzero(np.isclose(family, res.pvalue, rtol=1e-12, atol=1e-15))
    if len(matches) == 0:
        raise ValueError("family does not contain this pair's raw p-value")
    adjusted = bh_adjust(family)[matches[0]]
    delta, band = cliffs_delta(a_scores, b_scores)
    return ComparisonVerdict(
        learner=learner,
        baseline=baseline,
        measure=measure,
        p_raw=res.pvalue,
        p_adj=float(adjusted),
        delta=delta,
        band=band,
        color=verdict_color(float(adjusted), delta),
    )
