"""Seeded synthetic change corpora for tests and offline acceptance runs.

The generator links defect probability to small prior size (LT), young
files (AGE) and large churn, so the single-metric rankers and OneWay have
real signal to find, and the label noise keeps windows from being trivially
separable.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .data import Dataset


def synthetic_dataset(
    project: str = "synth",
    months: int = 24,
    changes_per_month: int = 200,
    seed: int = 0,
    start: tuple[int, int] = (2005, 1),
) -> Dataset:
    rng = np.random.default_rng(seed)
    n = months * changes_per_month
    ns = 1.0 + rng.poisson(1.0, n)
    nd = 1.0 + rng.poisson(1.5, n)
    nf = 1.0 + rng.poisson(2.0, n)
    entropy = rng.uniform(0.0, 1.0, n) * np.log2(nf + 1.0)
    # latent file-size factor couples prior size with churn, as in real
    # corpora: small files receive small (cheap) changes
    size = rng.lognormal(0.0, 0.9, n)
    lt = np.floor(np.exp(5.0) * size * rng.lognormal(0.0, 0.4, n))
    la = np.floor(np.exp(2.6) * size**0.7 * rng.lognormal(0.0, 0.8, n))
    ld = np.floor(np.exp(1.9) * size**0.7 * rng.lognormal(0.0, 0.9, n))
    fix = (rng.random(n) < 0.3).astype(np.float64)
    ndev = 1.0 + rng.poisson(2.0, n)
    age = rng.exponential(120.0, n)
    nuc = 1.0 + rng.poisson(3.0, n)
    exp_ = np.floor(rng.lognormal(3.5, 1.1, n))
    rexp = np.floor(exp_ * rng.uniform(0.1, 1.0, n))
    sexp = np.floor(exp_ * rng.uniform(0.1, 1.0, n))

    logit = (
        -1.5
        - 0.65 * (np.log1p(lt) - 5.0)
        - 0.35 * (np.log1p(age) - 4.0)
        + 0.5 * fix
        + 0.25 * (np.log1p(ndev) - 1.0)
        + rng.normal(0.0, 0.8, n)
    )
    labels = rng.random(n) < 1.0 / (1.0 + np.exp(-logit))

    X = np.column_stack(
        [ns, nd, nf, entropy, la, ld, lt, fix, ndev, age, nuc, exp_, rexp, sexp]
    )
    month_index = np.repeat(np.arange(months), changes_per_month)
    day = rng.integers(1, 29, n)
    first_month = np.datetime64(dt.date(start[0], start[1], 1), "M")
    month_starts = (first_month + month_index.astype("timedelta64[M]")).astype(
        "datetime64[D]"
    )
    dates = month_starts + (day - 1).astype("timedelta64[D]")
    return Dataset(project, dates, X, labels)


def synthetic_corpus(
    n_projects: int = 5,
    months: int = 24,
    changes_per_month: int = 200,
    seed: int = 0,
) -> dict[str, Dataset]:
    return {
        f"proj{i}": synthetic_dataset(
            project=f"proj{i}",
            months=months,
            changes_per_month=changes_per_month,
            seed=seed + i,
        )
        for i in range(n_projects)
    }
