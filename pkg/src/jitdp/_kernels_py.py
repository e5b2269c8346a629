"""NumPy implementations of the hot kernels.

These are the reference semantics; jitdp._native mirrors them in Cython.
All inputs are float64 arrays, C-contiguous, coerced by jitdp.kernels.
"""

from __future__ import annotations

import numpy as np


def prefix_within_budget(efforts: np.ndarray, budget: float, slack: float) -> int:
    """Length of the longest ranking prefix whose cumulative effort stays
    within budget (plus a tiny slack absorbing float noise at the boundary)."""
    c = np.cumsum(efforts)
    return int(np.searchsorted(c, budget + slack, side="right"))


def lift_area(
    efforts: np.ndarray,
    labels: np.ndarray,
    total_effort: float,
    total_defects: float,
    fraction: float,
) -> float:
    """Trapezoidal area under the cumulative lift curve up to x = fraction.

    The curve walks the records in the given order, advancing x by effort
    share and y by defect share; the final partial segment is cut at the
    fraction by linear interpolation. Zero-effort records produce vertical
    steps of zero width.
    """
    x1 = np.cumsum(efforts) / total_effort
    y1 = np.cumsum(labels) / total_defects
    x0 = np.concatenate(([0.0], x1[:-1]))
    y0 = np.concatenate(([0.0], y1[:-1]))
    xr = np.minimum(x1, fraction)
    xl = np.minimum(x0, fraction)
    w = xr - xl
    dx = x1 - x0
    safe = np.where(dx > 0.0, dx, 1.0)
    t = np.where(dx > 0.0, (xr - x0) / safe, 1.0)
    yr = y0 + (y1 - y0) * t
    return float(np.sum(w * (y0 + yr) * 0.5))


_GAIN_FLOOR = 1e-12


def _h2(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))
    return np.where((p <= 0.0) | (p >= 1.0), 0.0, t)


def best_split(values: np.ndarray, labels: np.ndarray, min_leaf: int) -> tuple[float, float]:
    """Best binary split of a sorted feature column by information gain ratio.

    `values` ascending with `labels` (0/1) aligned. Returns (gain_ratio,
    threshold); (-1.0, nan) when no split clears the minimum leaf size or
    yields positive gain. Ties pick the leftmost split.
    """
    n = len(values)
    if n < 2 * min_leaf:
        return (-1.0, float("nan"))
    n1 = float(labels.sum())
    h_total = float(_h2(np.array([n1 / n]))[0])
    c1 = np.cumsum(labels)[:-1]
    i = np.arange(1, n, dtype=np.float64)
    valid = (values[1:] > values[:-1]) & (i >= min_leaf) & (n - i >= min_leaf)
    if not valid.any():
        return (-1.0, float("nan"))
    pi = i / n
    gain = h_total - pi * _h2(c1 / i) - (1.0 - pi) * _h2((n1 - c1) / (n - i))
    split_info = -(pi * np.log2(pi) + (1.0 - pi) * np.log2(1.0 - pi))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = gain / split_info
    ratio = np.where(valid & (gain > _GAIN_FLOOR), ratio, -1.0)
    j = int(np.argmax(ratio))
    if ratio[j] <= 0.0:
        return (-1.0, float("nan"))
    return (float(ratio[j]), float((values[j] + values[j + 1]) * 0.5))


_KNN_BLOCK = 256


def knn_label_means(
    train: np.ndarray, labels: np.ndarray, test: np.ndarray, k: int
) -> np.ndarray:
    """Mean label of the k nearest training rows per test row (squared
    Euclidean distance, distance ties broken by training index)."""
    k = min(int(k), len(train))
    out = np.empty(len(test), dtype=np.float64)
    for s in range(0, len(test), _KNN_BLOCK):
        block = test[s : s + _KNN_BLOCK]
        d = ((block[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
        idx = np.argsort(d, axis=1, kind="stable")[:, :k]
        out[s : s + _KNN_BLOCK] = labels[idx].mean(axis=1)
    return out
