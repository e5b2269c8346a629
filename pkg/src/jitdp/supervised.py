"""Supervised baseline learners producing test-slice rankings.

EALR fits ordinary least squares to defect density (label / effort) and
ranks by the predicted density. The classifiers (KNN with K=8, a gain-ratio
decision tree, a bagged random forest) predict defect probability; their
rankings break score ties by ascending effort so cheaper changes come first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .data import METRIC_INDEX, METRICS, Dataset, MetricId
from .rankers import Ranking

KNN = "knn"
TREE = "tree"
FOREST = "forest"
CLASSIFIER_KINDS = (KNN, TREE, FOREST)

RECIPES = ("kamei", "raw")

_LA = METRIC_INDEX[MetricId.LA]
_LD = METRIC_INDEX[MetricId.LD]
_LT = METRIC_INDEX[MetricId.LT]
_NF = METRIC_INDEX[MetricId.NF]
_NUC = METRIC_INDEX[MetricId.NUC]
_FIX = METRIC_INDEX[MetricId.FIX]


class UnfitError(RuntimeError):
    """Raised when a training slice cannot support the requested model."""


def preprocess(X: np.ndarray, recipe: str) -> np.ndarray:
    """Feature recipe for regression. "raw" passes metrics through; "kamei"
    relativizes the churn and history columns (LA, LD by LT; LT, NUC by NF)
    and log-transforms every column except the boolean FIX."""
    if recipe == "raw":
        return np.array(X, dtype=np.float64, copy=True)
    if recipe != "kamei":
        raise ValueError(f"unknown preprocessing recipe {recipe!r}; known: {RECIPES}")
    F = np.array(X, dtype=np.float64, copy=True)
    lt = np.maximum(X[:, _LT], 1.0)
    nf = np.maximum(X[:, _NF], 1.0)
    F[:, _LA] = X[:, _LA] / lt
    F[:, _LD] = X[:, _LD] / lt
    F[:, _LT] = X[:, _LT] / nf
    F[:, _NUC] = X[:, _NUC] / nf
    for j in range(F.shape[1]):
        if j != _FIX:
            F[:, j] = np.log1p(F[:, j])
    return F


@dataclass(frozen=True)
class RegressionModel:
    """OLS fit over the 14 (preprocessed) metrics plus intercept."""

    coef: np.ndarray
    intercept: float
    recipe: str
    rank_deficient: bool


def fit_ealr(train: Dataset, recipe: str = "kamei") -> RegressionModel:
    """Least-squares fit of label/effort; the zero-effort guard substitutes
    the smallest positive training effort."""
    if len(train) == 0:
        raise UnfitError("cannot fit EALR on an empty slice")
    efforts = train.efforts
    positive = efforts[efforts > 0]
    if len(positive) == 0:
        raise UnfitError("cannot fit EALR: training slice has zero total effort")
    eps = float(positive.min())
    target = train.y.astype(np.float64) / np.maximum(efforts, eps)
    F = preprocess(train.X, recipe)
    design = np.column_stack([F, np.ones(len(F))])
    solution, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    return RegressionModel(
        coef=solution[:-1],
        intercept=float(solution[-1]),
        recipe=recipe,
        rank_deficient=rank < design.shape[1],
    )


def predict_ealr(model: RegressionModel, test: Dataset) -> Ranking:
    F = preprocess(test.X, model.recipe)
    scores = F @ model.coef + model.intercept
    return Ranking.build(scores, test.efforts, test.y, tie="stable")


@dataclass(frozen=True)
class ClassifierConfig:
    k: int = 8
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 2
    seed: int = 0
    rank_by_density: bool = False  # sensitivity flag: rank by score/effort

    def with_seed(self, seed: int) -> "ClassifierConfig":
        return replace(self, seed=seed)


class _Node:
    __slots__ = ("feature", "threshold", "left", "right")

    def __init__(self, feature: int, threshold: float):
        self.feature = feature
        self.threshold = threshold
        self.left: "_Node | float" = 0.0
        self.right: "_Node | float" = 0.0


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    cfg: ClassifierConfig,
    rng: np.random.Generator | None,
    n_candidates: int | None,
):
    """Iterative top-down induction; returns a _Node or a leaf rate."""
    n_features = X.shape[1]
    root: list = [0.0]
    stack = [(idx, 0, root, 0)]
    while stack:
        node_idx, depth, container, slot = stack.pop()
        labels = y[node_idx]
        n = len(node_idx)
        total = labels.sum()
        rate = float(total / n)
        grown = None
        depth_ok = cfg.max_depth is None or depth < cfg.max_depth
        if depth_ok and 0 < total < n and n >= 2 * cfg.min_leaf:
            if n_candidates is None:
                feats = range(n_features)
            else:
                feats = sorted(rng.choice(n_features, size=n_candidates, replace=False))
            best_ratio, best_feat, best_thr = 0.0, -1, 0.0
            for f in feats:
                col = X[node_idx, f]
                order = np.argsort(col, kind="stable")
                ratio, thr = kernels.best_split(col[order], labels[order], cfg.min_leaf)
                if ratio > best_ratio:
                    best_ratio, best_feat, best_thr = ratio, f, thr
            if best_feat >= 0:
                grown = _Node(best_feat, best_thr)
                mask = X[node_idx, best_feat] <= best_thr
                stack.append((node_idx[mask], depth + 1, grown, "left"))
                stack.append((node_idx[~mask], depth + 1, grown, "right"))
        value = grown if grown is not None else rate
        if isinstance(container, list):
            container[slot] = value
        else:
            setattr(container, slot, value)
    return root[0]


def _tree_scores(tree, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    stack = [(tree, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if not isinstance(node, _Node):
            out[idx] = node
            continue
        mask = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


@dataclass
class ClassifierModel:
    kind: str
    config: ClassifierConfig
    degenerate: bool = False
    prior: float = 0.0
    state: object = field(default=None, repr=False)


@dataclass
class _KnnState:
    mean: np.ndarray
    std: np.ndarray
    Xz: np.ndarray
    y: np.ndarray


def fit_classifier(
    kind: str, train: Dataset, config: ClassifierConfig | None = None
) -> ClassifierModel:
    """Fit one of the classifier baselines.

    A single-class training slice yields a degenerate model that scores
    every record with the class prior (0 or 1) and is flagged as such.
    """
    if kind not in CLASSIFIER_KINDS:
        raise ValueError(f"unknown classifier kind {kind!r}; known: {CLASSIFIER_KINDS}")
    if config is None:
        config = ClassifierConfig()
    if config.k < 1 or config.n_trees < 1 or config.min_leaf < 1:
        raise ValueError("k, n_trees and min_leaf must all be >= 1")
    if len(train) == 0:
        raise UnfitError("cannot fit a classifier on an empty slice")
    y = train.y.astype(np.float64)
    positives = y.sum()
    if positives == 0 or positives == len(y):
        return ClassifierModel(
            kind=kind, config=config, degenerate=True, prior=float(y[0])
        )
    if kind == KNN:
        mean = train.X.mean(axis=0)
        std = train.X.std(axis=0)
        std = np.where(std == 0, 1.0, std)
        state = _KnnState(mean=mean, std=std, Xz=(train.X - mean) / std, y=y)
    elif kind == TREE:
        state = _grow_tree(
            train.X, y, np.arange(len(train)), config, rng=None, n_candidates=None
        )
    else:
        n_candidates = max(1, round(np.sqrt(len(METRICS))))
        seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
        trees = []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            bag = rng.integers(0, len(train), size=len(train))
            trees.append(_grow_tree(train.X, y, bag, config, rng, n_candidates))
        state = trees
    return ClassifierModel(kind=kind, config=config, state=state)


def _classifier_scores(model: ClassifierModel, test: Dataset) -> np.ndarray:
    if model.degenerate:
        return np.full(len(test), model.prior)
    if model.kind == KNN:
        st: _KnnState = model.state
        test_z = (test.X - st.mean) / st.std
        return kernels.knn_label_means(st.Xz, st.y, test_z, model.config.k)
    if model.kind == TREE:
        return _tree_scores(model.state, test.X)
    scores = np.zeros(len(test))
    for tree in model.state:
        scores += _tree_scores(tree, test.X)
    return scores / len(model.state)


def predict_classifier(model: ClassifierModel, test: Dataset) -> Ranking:
    """Rank by predicted defect probability, cheapest-first among ties."""
    scores = _classifier_scores(model, test)
    if model.config.rank_by_density:
        efforts = test.efforts
        positive = efforts[efforts > 0]
        eps = float(positive.min()) if len(positive) else 1.0
        scores = scores / np.maximum(efforts, eps)
    return Ranking.build(scores, test.efforts, test.y, tie="effort")
