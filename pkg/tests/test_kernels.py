import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jitdp import _kernels_py
from jitdp import kernels

try:
    from jitdp import _native
except ImportError:
    _native = None

BACKENDS = [("python", _kernels_py)] + ([("native", _native)] if _native else [])
IDS = [name for name, _ in BACKENDS]
IMPLS = [impl for _, impl in BACKENDS]


def f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def test_native_backend_compiled_and_selected():
    # the build is expected to produce the extension in this environment
    assert _native is not None
    assert kernels.BACKEND in ("native", "python")


@pytest.mark.parametrize("impl", IMPLS, ids=IDS)
def test_prefix_within_budget_semantics(impl):
    efforts = f64([10, 10, 10, 10, 10])
    assert impl.prefix_within_budget(efforts, 10.0, 0.0) == 1
    assert impl.prefix_within_budget(efforts, 9.99, 0.0) == 0
    assert impl.prefix_within_budget(efforts, 50.0, 0.0) == 5
    assert impl.prefix_within_budget(f64([30, 10, 10]), 10.0, 0.0) == 0
    # zero-effort records at the boundary remain inside
    assert impl.prefix_within_budget(f64([10, 0, 0, 40]), 10.0, 0.0) == 3


@pytest.mark.parametrize("impl", IMPLS, ids=IDS)
def test_lift_area_simple_cases(impl):
    # single record: cumulative curve is the segment (0,0)-(1,1)
    assert impl.lift_area(f64([4.0]), f64([1.0]), 4.0, 1.0, 1.0) == pytest.approx(0.5)
    # fraction cut halves the triangle
    assert impl.lift_area(f64([4.0]), f64([1.0]), 4.0, 1.0, 0.5) == pytest.approx(0.125)
    # vertical jump from a zero-effort defective record
    area = impl.lift_area(f64([0.0, 2.0]), f64([1.0, 1.0]), 2.0, 2.0, 1.0)
    assert area == pytest.approx(0.75)


@pytest.mark.parametrize("impl", IMPLS, ids=IDS)
def test_best_split_simple(impl):
    values = f64([1, 2, 3, 4])
    labels = f64([0, 0, 1, 1])
    ratio, thr = impl.best_split(values, labels, 1)
    assert thr == pytest.approx(2.5)
    assert ratio == pytest.approx(1.0)  # perfect split: gain 1 bit, info 1 bit
    ratio, thr = impl.best_split(f64([1, 1, 1]), f64([0, 1, 0]), 1)
    assert ratio == -1.0 and math.isnan(thr)
    # min_leaf=2 leaves only the middle boundary as a candidate
    ratio, thr = impl.best_split(f64([1, 2, 3, 4]), f64([1, 0, 0, 0]), 2)
    assert thr == pytest.approx(2.5)
    assert ratio == pytest.approx(0.31127812445913283)
    # a split that separates nothing has zero gain and is refused
    ratio, _ = impl.best_split(f64([1, 2, 3, 4]), f64([1, 0, 1, 0]), 2)
    assert ratio == -1.0
    # not enough records for two leaves
    ratio, _ = impl.best_split(f64([1, 2, 3, 4]), f64([1, 0, 0, 0]), 3)
    assert ratio == -1.0


@given(
    data=st.lists(
        st.tuples(st.integers(0, 30), st.booleans()), min_size=1, max_size=80
    ),
    budget_scale=st.floats(min_value=0.0, max_value=1.2),
)
@settings(max_examples=150, deadline=None)
def test_prefix_parity(data, budget_scale):
    if _native is None:
        pytest.skip("extension not built")
    efforts = f64([e for e, _ in data])
    budget = float(efforts.sum()) * budget_scale
    slack = 1e-9 * max(1.0, float(efforts.sum()))
    assert _native.prefix_within_budget(efforts, budget, slack) == \
        _kernels_py.prefix_within_budget(efforts, budget, slack)


@given(
    data=st.lists(
        st.tuples(st.floats(min_value=0, max_value=50), st.booleans()),
        min_size=1,
        max_size=60,
    ),
    fraction=st.sampled_from([0.1, 0.2, 0.5, 1.0]),
)
@settings(max_examples=150, deadline=None)
def test_lift_area_parity(data, fraction):
    if _native is None:
        pytest.skip("extension not built")
    efforts = f64([e for e, _ in data])
    labels = f64([1.0 if b else 0.0 for _, b in data])
    te, td = float(efforts.sum()), float(labels.sum())
    if te <= 0 or td <= 0:
        return
    a = _native.lift_area(efforts, labels, te, td, fraction)
    b = _kernels_py.lift_area(efforts, labels, te, td, fraction)
    assert a == pytest.approx(b, abs=1e-12)


@given(
    values=st.lists(st.integers(0, 12), min_size=2, max_size=60),
    seed=st.integers(0, 10_000),
    min_leaf=st.sampled_from([1, 2, 5]),
)
@settings(max_examples=150, deadline=None)
def test_best_split_parity(values, seed, min_leaf):
    if _native is None:
        pytest.skip("extension not built")
    rng = np.random.default_rng(seed)
    v = np.sort(f64(values))
    labels = f64(rng.integers(0, 2, len(v)))
    r1, t1 = _native.best_split(v, labels, min_leaf)
    r2, t2 = _kernels_py.best_split(v, labels, min_leaf)
    assert r1 == pytest.approx(r2, abs=1e-12)
    if r1 > 0:
        assert t1 == pytest.approx(t2, abs=1e-12)


@given(seed=st.integers(0, 10_000), k=st.sampled_from([1, 3, 8]))
@settings(max_examples=60, deadline=None)
def test_knn_parity(seed, k):
    if _native is None:
        pytest.skip("extension not built")
    rng = np.random.default_rng(seed)
    n, m, f = int(rng.integers(1, 40)), int(rng.integers(1, 20)), 6
    train = rng.normal(0, 1, (n, f))
    labels = f64(rng.integers(0, 2, n))
    test = rng.normal(0, 1, (m, f))
    a = np.asarray(_native.knn_label_means(f64(train), labels, f64(test), k))
    b = _kernels_py.knn_label_means(f64(train), labels, f64(test), k)
    assert np.allclose(a, b, atol=1e-9)


def test_knn_duplicate_points_tie_by_index():
    # four identical training rows: both backends must pick the lowest
    # indices, so k=2 averages labels[0] and labels[1]
    train = f64(np.zeros((4, 3)))
    labels = f64([1.0, 0.0, 1.0, 1.0])
    test = f64(np.zeros((1, 3)))
    for impl in IMPLS:
        out = np.asarray(impl.knn_label_means(train, labels, test, 2))
        assert out[0] == pytest.approx(0.5)


def test_pure_python_env_override(monkeypatch):
    import importlib

    monkeypatch.setenv("JITDP_PURE_PYTHON", "1")
    import jitdp.kernels as kmod

    reloaded = importlib.reload(kmod)
    try:
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("JITDP_PURE_PYTHON")
        importlib.reload(kmod)
