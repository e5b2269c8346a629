"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set JITDP_PURE_PYTHON=1 to force the NumPy backend (used by the benchmark
and the parity tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("JITDP_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def prefix_within_budget(efforts, budget: float, slack: float) -> int:
    return int(_impl.prefix_within_budget(_f64(efforts), float(budget), float(slack)))


def lift_area(efforts, labels, total_effort: float, total_defects: float, fraction: float) -> float:
    return float(
        _impl.lift_area(
            _f64(efforts), _f64(labels), float(total_effort), float(total_defects), float(fraction)
        )
    )


def best_split(values, labels, min_leaf: int) -> tuple[float, float]:
    ratio, thr = _impl.best_split(_f64(values), _f64(labels), int(min_leaf))
    return float(ratio), float(thr)


def knn_label_means(train, labels, test, k: int) -> np.ndarray:
    train = np.ascontiguousarray(train, dtype=np.float64)
    test = np.ascontiguousarray(test, dtype=np.float64)
    if train.ndim != 2 or test.ndim != 2:
        raise ValueError("train and test must be 2-D")
    return np.asarray(_impl.knn_label_means(train, _f64(labels), test, int(k)))
