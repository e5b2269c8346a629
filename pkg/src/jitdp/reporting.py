"""Report assembly: long-format results, medians, quartiles and verdicts.

All writers format floats with repr() so re-parsing a CSV reproduces the
exact values and repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .harness import ExperimentResult, SUPERVISED_LEARNERS
from .stats import ComparisonVerdict, bh_adjust, cliffs_delta, verdict_color, wilcoxon_signed_rank

MEASURES = ("recall", "precision", "f1", "popt")

RESULT_FIELDS = (
    "project", "learner", "window",
    "recall", "precision", "f1", "popt",
    "skipped", "reason",
)
MEDIAN_FIELDS = ("project", "learner", "measure", "median", "windows", "skipped")
QUARTILE_FIELDS = (
    "project", "learner", "measure", "min", "q25", "median", "q75", "max", "windows",
)
VERDICT_FIELDS = (
    "project", "measure", "learner", "baseline",
    "p", "p_bh", "delta", "band", "color",
)

BEST_SUPERVISED = "best_supervised"


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_rows(path: str | Path, fieldnames: Sequence[str], rows: Iterable[Mapping]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fieldnames])


def result_rows(results: Sequence[ExperimentResult]) -> list[dict]:
    rows = []
    for r in results:
        row = {"project": r.project, "learner": r.learner, "window": r.window,
               "skipped": int(r.skipped), "reason": r.reason}
        for m in MEASURES:
            row[m] = getattr(r.scores, m) if r.scores is not None else ""
        rows.append(row)
    return rows


def _grouped(results: Sequence[ExperimentResult]):
    """(project, learner) -> (kept results sorted by window, skip count)."""
    kept: dict[tuple[str, str], list[ExperimentResult]] = defaultdict(list)
    skips: dict[tuple[str, str], int] = defaultdict(int)
    for r in results:
        key = (r.project, r.learner)
        if r.skipped:
            skips[key] += 1
        else:
            kept[key].append(r)
    for key in kept:
        kept[key].sort(key=lambda r: r.window)
    return kept, skips


def _ordered_keys(results: Sequence[ExperimentResult]) -> list[tuple[str, str]]:
    seen: dict[tuple[str, str], None] = {}
    for r in results:
        seen.setdefault((r.project, r.learner), None)
    return list(seen)


def median_rows(results: Sequence[ExperimentResult]) -> list[dict]:
    """Per (project, learner, measure) medians over non-skipped windows."""
    kept, skips = _grouped(results)
    rows = []
    for key in _ordered_keys(results):
        project, learner = key
        group = kept.get(key, [])
        for m in MEASURES:
            vals = [getattr(r.scores, m) for r in group]
            rows.append({
                "project": project, "learner": learner, "measure": m,
                "median": float(np.median(vals)) if vals else "",
                "windows": len(vals), "skipped": skips.get(key, 0),
            })
    return rows


def quartile_rows(results: Sequence[ExperimentResult]) -> list[dict]:
    kept, _ = _grouped(results)
    rows = []
    for key in _ordered_keys(results):
        project, learner = key
        group = kept.get(key, [])
        for m in MEASURES:
            vals = np.array([getattr(r.scores, m) for r in group], dtype=np.float64)
            if len(vals):
                lo, q25, q50, q75, hi = (
                    float(np.min(vals)),
                    float(np.percentile(vals, 25)),
                    float(np.median(vals)),
                    float(np.percentile(vals, 75)),
                    float(np.max(vals)),
                )
            else:
                lo = q25 = q50 = q75 = hi = ""
            rows.append({
                "project": project, "learner": learner, "measure": m,
                "min": lo, "q25": q25, "median": q50, "q75": q75, "max": hi,
                "windows": len(vals),
            })
    return rows


def _score_series(group: list[ExperimentResult], measure: str) -> dict[int, float]:
    return {r.window: getattr(r.scores, measure) for r in group}


def resolve_baseline(
    results: Sequence[ExperimentResult], project: str, measure: str, baseline: str
) -> str | None:
    """A fixed learner name, or the supervised learner with the best median
    for this (project, measure) when baseline="best_supervised"."""
    kept, _ = _grouped(results)
    if baseline != BEST_SUPERVISED:
        return baseline if kept.get((project, baseline)) else None
    best_name, best_median = None, -np.inf
    for name in SUPERVISED_LEARNERS:
        group = kept.get((project, name))
        if not group:
            continue
        med = float(np.median([getattr(r.scores, measure) for r in group]))
        if med > best_median:
            best_name, best_median = name, med
    return best_name


def compare_learners(
    results: Sequence[ExperimentResult],
    project: str,
    measure: str,
    baseline: str = BEST_SUPERVISED,
) -> list[ComparisonVerdict]:
    """Every learner vs the baseline within one (project, measure) group;
    the BH family is exactly this group."""
    kept, _ = _grouped(results)
    base_name = resolve_baseline(results, project, measure, baseline)
    if base_name is None:
        return []
    base = _score_series(kept[(project, base_name)], measure)
    candidates = []
    for proj, learner in _ordered_keys(results):
        if proj != project or learner == base_name:
            continue
        series = _score_series(kept.get((proj, learner), []), measure)
        common = sorted(set(series) & set(base))
        if not common:
            continue
        a = [series[w] for w in common]
        b = [base[w] for w in common]
        candidates.append((learner, a, b))
    if not candidates:
        return []
    raw = [wilcoxon_signed_rank(a, b).pvalue for _, a, b in candidates]
    adjusted = bh_adjust(raw)
    verdicts = []
    for (learner, a, b), p_raw, p_adj in zip(candidates, raw, adjusted):
        delta, band = cliffs_delta(a, b)
        verdicts.append(ComparisonVerdict(
            learner=learner, baseline=base_name, measure=measure,
            p_raw=float(p_raw), p_adj=float(p_adj),
            delta=delta, band=band, color=verdict_color(float(p_adj), delta),
        ))
    return verdicts


def verdict_rows(
    results: Sequence[ExperimentResult], baseline: str = BEST_SUPERVISED
) -> list[dict]:
    projects: dict[str, None] = {}
    for r in results:
        projects.setdefault(r.project, None)
    rows = []
    for project in projects:
        for measure in MEASURES:
            for v in compare_learners(results, project, measure, baseline):
                rows.append({
                    "project": project, "measure": measure,
                    "learner": v.learner, "baseline": v.baseline,
                    "p": v.p_raw, "p_bh": v.p_adj,
                    "delta": v.delta, "band": v.band, "color": v.color,
                })
    return rows


def check_consistency(results_path: str | Path, medians_path: str | Path) -> None:
    """Recompute every median from the written long-format CSV and require
    exact equality with the written median table."""
    per_group: dict[tuple[str, str], dict[str, list[float]]] = defaultdict(
        lambda: {m: [] for m in MEASURES}
    )
    with open(results_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["skipped"] == "1":
                continue
            key = (row["project"], row["learner"])
            for m in MEASURES:
                per_group[key][m].append(float(row[m]))
    with open(medians_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["project"], row["learner"])
            vals = per_group.get(key, {m: [] for m in MEASURES})[row["measure"]]
            if not vals:
                if row["median"] != "":
                    raise AssertionError(f"median reported for empty group {key}")
                continue
            expect = float(np.median(vals))
            got = float(row["median"])
            if got != expect:
                raise AssertionError(
                    f"median mismatch for {key}/{row['measure']}: "
                    f"table {got!r} vs recomputed {expect!r}"
                )
