"""Benchmark the compiled kernels against the NumPy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

The kernel rows time jitdp._native and jitdp._kernels_py directly on
identical inputs; --end-to-end additionally times a forest fit + predict
through each backend in a subprocess (backend selection happens at import,
controlled by JITDP_PURE_PYTHON).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from jitdp import _kernels_py

try:
    from jitdp import _native
except ImportError:
    _native = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(name, make_args, call, repeat):
    args = make_args()
    t_py = timeit(lambda: call(_kernels_py, *args), repeat)
    if _native is None:
        print(f"{name:<28} python {t_py*1e3:9.3f} ms   native      (not built)")
        return
    t_nat = timeit(lambda: call(_native, *args), repeat)
    speedup = t_py / t_nat if t_nat > 0 else float("inf")
    print(
        f"{name:<28} python {t_py*1e3:9.3f} ms   native {t_nat*1e3:9.3f} ms"
        f"   speedup {speedup:6.1f}x"
    )


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--end-to-end", action="store_true")
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    n = 200_000
    efforts = np.abs(rng.lognormal(3.0, 1.3, n))
    labels = (rng.random(n) < 0.2).astype(np.float64)

    bench_case(
        "prefix_within_budget 200k",
        lambda: (efforts, float(efforts.sum()) * 0.2, 1e-9 * float(efforts.sum())),
        lambda impl, e, b, s: impl.prefix_within_budget(e, b, s),
        args.repeat,
    )
    bench_case(
        "lift_area 200k",
        lambda: (efforts, labels, float(efforts.sum()), float(labels.sum())),
        lambda impl, e, l, te, td: impl.lift_area(e, l, te, td, 1.0),
        args.repeat,
    )

    values = np.sort(rng.normal(0, 1, 4000))
    split_labels = (rng.random(4000) < 0.3).astype(np.float64)
    bench_case(
        "best_split 4k sorted",
        lambda: (values, split_labels, 2),
        lambda impl, v, l, m: impl.best_split(v, l, m),
        args.repeat,
    )
    # typical tree-node size: per-call overhead dominates here
    small = np.sort(rng.normal(0, 1, 64))
    small_labels = (rng.random(64) < 0.3).astype(np.float64)
    bench_case(
        "best_split 64 x 2000 calls",
        lambda: (small, small_labels, 2),
        lambda impl, v, l, m: [impl.best_split(v, l, m) for _ in range(2000)],
        args.repeat,
    )

    train = rng.normal(0, 1, (2500, 14))
    train_labels = (rng.random(2500) < 0.3).astype(np.float64)
    test = rng.normal(0, 1, (2500, 14))
    bench_case(
        "knn_label_means 2.5k x 2.5k",
        lambda: (np.ascontiguousarray(train), train_labels, np.ascontiguousarray(test), 8),
        lambda impl, tr, la, te, k: impl.knn_label_means(tr, la, te, k),
        max(2, args.repeat // 2),
    )

    if args.end_to_end:
        script = (
            "import time, jitdp\n"
            "from jitdp.supervised import ClassifierConfig, fit_classifier, predict_classifier\n"
            "train = jitdp.synthetic_dataset(months=2, changes_per_month=1200, seed=1)\n"
            "test = jitdp.synthetic_dataset(months=2, changes_per_month=1200, seed=2)\n"
            "cfg = ClassifierConfig(n_trees=50, seed=3)\n"
            "t0 = time.perf_counter()\n"
            "predict_classifier(fit_classifier('forest', train, cfg), test)\n"
            "print(f'{jitdp.BACKEND}: forest 50 trees on 2400x14 '\n"
            "      f'{time.perf_counter()-t0:.2f}s')\n"
        )
        for pure in ("", "1"):
            env = dict(os.environ)
            if pure:
                env["JITDP_PURE_PYTHON"] = pure
            else:
                env.pop("JITDP_PURE_PYTHON", None)
            subprocess.run([sys.executable, "-c", script], env=env, check=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
