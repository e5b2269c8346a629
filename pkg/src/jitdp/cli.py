"""Command-line front end: run experiments and validate data directories.

`jitdp run` executes the time-wise cross-validation for the configured
learners and writes results.csv, medians.csv, verdicts.csv and
quartiles.csv; outputs are byte-identical across runs with the same
configuration and seed. `jitdp validate` reports per-file statistics and
checks them against the built-in expectations for the six known corpora.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .data import DataError, group_by_month, load_csv
from .evaluation import DEFAULT_FRACTION, DEFAULT_POPT_FRACTION
from .harness import (
    ALL_LEARNERS,
    SUPERVISED_LEARNERS,
    UNSUPERVISED_LEARNERS,
    WINDOW_MODES,
    WINDOW_SPAN,
    run_experiment,
)
from .oneway import GOALS
from .reporting import (
    BEST_SUPERVISED,
    MEDIAN_FIELDS,
    QUARTILE_FIELDS,
    RESULT_FIELDS,
    VERDICT_FIELDS,
    check_consistency,
    median_rows,
    quartile_rows,
    result_rows,
    verdict_rows,
    write_rows,
)
from .supervised import RECIPES, ClassifierConfig

LEARNER_GROUPS = {
    "all": list(ALL_LEARNERS),
    "unsup": list(UNSUPERVISED_LEARNERS),
    "sup": list(SUPERVISED_LEARNERS),
}

# Row count, defect rate and average churn per change of the six public
# corpora, keyed by file stem.
KNOWN_PROJECTS = {
    "bugzilla": (4620, 0.36, 37.5),
    "platform": (64250, 0.14, 72.2),
    "mozilla": (98275, 0.05, 106.5),
    "jdt": (35386, 0.14, 71.4),
    "columba": (4455, 0.31, 149.4),
    "postgres": (20431, 0.25, 101.3),
    "postgresql": (20431, 0.25, 101.3),
}

OUTPUT_FILES = ("results.csv", "medians.csv", "verdicts.csv", "quartiles.csv")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    data_dir: Path
    out_dir: Path
    projects: list[str] = field(default_factory=list)  # empty = all CSVs found
    learners: list[str] = field(default_factory=lambda: list(ALL_LEARNERS))
    effort_fraction: float = DEFAULT_FRACTION
    popt_fraction: float = DEFAULT_POPT_FRACTION
    goal: str = "mean"
    preprocess: str = "kamei"
    window_mode: str = "populated"
    seed: int | None = None
    baseline: str = BEST_SUPERVISED
    schema_profile: str = "kamei"
    knn_k: int = 8
    trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 2
    rank_by_density: bool = False

    def validate(self) -> None:
        if not self.learners:
            raise ConfigError("no learners configured")
        unknown = [l for l in self.learners if l not in ALL_LEARNERS]
        if unknown:
            raise ConfigError(
                f"unknown learners {unknown}; known: {list(ALL_LEARNERS)}"
            )
        if not 0.0 < self.effort_fraction <= 1.0:
            raise ConfigError("effort fraction must be in (0, 1]")
        if not 0.0 < self.popt_fraction <= 1.0:
            raise ConfigError("popt fraction must be in (0, 1]")
        if self.goal not in GOALS:
            raise ConfigError(f"unknown goal {self.goal!r}; known: {GOALS}")
        if self.preprocess not in RECIPES:
            raise ConfigError(
                f"unknown preprocessing recipe {self.preprocess!r}; known: {RECIPES}"
            )
        if self.window_mode not in WINDOW_MODES:
            raise ConfigError(
                f"unknown window mode {self.window_mode!r}; known: {WINDOW_MODES}"
            )
        if "forest" in self.learners and self.seed is None:
            raise ConfigError("--seed is required when the forest learner is enabled")

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(
            k=self.knn_k,
            n_trees=self.trees,
            max_depth=self.max_depth,
            min_leaf=self.min_leaf,
            seed=self.seed or 0,
            rank_by_density=self.rank_by_density,
        )


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def expand_learners(tokens: list[str]) -> list[str]:
    out: list[str] = []
    for t in tokens:
        for name in LEARNER_GROUPS.get(t, [t]):
            if name not in out:
                out.append(name)
    return out


def _resolve_projects(cfg: RunConfig) -> list[tuple[str, Path]]:
    if cfg.projects:
        pairs = [(p, cfg.data_dir / f"{p}.csv") for p in cfg.projects]
    else:
        pairs = sorted(
            (path.stem, path) for path in cfg.data_dir.glob("*.csv")
        )
    if not pairs:
        raise ConfigError(f"no datasets found under {cfg.data_dir}")
    return pairs


def cmd_run(cfg: RunConfig) -> int:
    cfg.validate()
    pairs = _resolve_projects(cfg)
    results = []
    for project, path in pairs:
        if not path.is_file():
            raise FileNotFoundError(f"dataset for project {project!r} not found: {path}")
        try:
            ds = load_csv(path, cfg.schema_profile)
            results.extend(
                run_experiment(
                    ds,
                    cfg.learners,
                    cfg.effort_fraction,
                    popt_fraction=cfg.popt_fraction,
                    goal=cfg.goal,
                    recipe=cfg.preprocess,
                    clf=cfg.classifier_config(),
                    window_mode=cfg.window_mode,
                    seed=cfg.seed or 0,
                )
            )
        except (DataError, ValueError) as e:
            raise RuntimeError(f"project {project!r}: {e}") from e

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name, fields, rows in (
            ("results.csv", RESULT_FIELDS, result_rows(results)),
            ("medians.csv", MEDIAN_FIELDS, median_rows(results)),
            ("verdicts.csv", VERDICT_FIELDS, verdict_rows(results, cfg.baseline)),
            ("quartiles.csv", QUARTILE_FIELDS, quartile_rows(results)),
        ):
            path = cfg.out_dir / name
            write_rows(path, fields, rows)
            written.append(path)
        check_consistency(cfg.out_dir / "results.csv", cfg.out_dir / "medians.csv")
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    n_skipped = sum(1 for r in results if r.skipped)
    print(f"wrote {len(written)} files to {cfg.out_dir}")
    print(f"{len(results)} learner-window results ({n_skipped} skipped)")
    return 0


def cmd_validate(data_dir: Path, projects: list[str], schema_profile: str) -> int:
    paths = (
        [data_dir / f"{p}.csv" for p in projects]
        if projects
        else sorted(data_dir.glob("*.csv"))
    )
    if not paths:
        print(f"no CSV files under {data_dir}")
        return 0
    for path in paths:
        print(f"== {path}")
        try:
            ds = load_csv(path, schema_profile)
        except (DataError, OSError) as e:
            print(f"  load failed: {e}")
            continue
        buckets = group_by_month(ds)
        windows = max(0, len(buckets) - (WINDOW_SPAN - 1))
        avg_churn = float(ds.efforts.mean())
        print(f"  rows: {len(ds)}")
        print(f"  defect rate: {ds.defect_ratio:.2%}")
        print(f"  average churn per change: {avg_churn:.1f}")
        print(f"  month buckets: {len(buckets)}")
        print(f"  time-wise windows: {windows}")
        expected = KNOWN_PROJECTS.get(path.stem.lower())
        if expected is None:
            print("  (no built-in expectations for this project name)")
            continue
        exp_rows, exp_rate, exp_churn = expected
        rows_ok = len(ds) == exp_rows
        rate_ok = abs(ds.defect_ratio - exp_rate) < 0.005
        churn_ok = abs(avg_churn - exp_churn) < 1.0
        print(f"  expected rows: {exp_rows} -> {'ok' if rows_ok else 'MISMATCH'}")
        print(
            f"  expected defect rate: {exp_rate:.0%} -> "
            f"{'ok' if rate_ok else 'MISMATCH'}"
        )
        print(
            f"  expected average churn: {exp_churn} -> "
            f"{'ok' if churn_ok else 'MISMATCH'}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jitdp",
        description="Effort-aware just-in-time defect prediction experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the time-wise cross-validation")
    run.add_argument("--data-dir", type=Path, required=True)
    run.add_argument("--out-dir", type=Path, required=True)
    run.add_argument(
        "--projects", default="", help="comma-separated project names (file stems)"
    )
    run.add_argument(
        "--learners",
        default="all",
        help="comma-separated learner names or groups (all, unsup, sup)",
    )
    run.add_argument(
        "--effort-fraction", type=float, default=DEFAULT_FRACTION,
        help="inspection budget as a share of total effort (default 0.2)",
    )
    run.add_argument(
        "--popt-fraction", type=float, default=DEFAULT_POPT_FRACTION,
        help="cutoff for the Popt areas; 1.0 (whole curve) matches the "
             "published tables",
    )
    run.add_argument("--goal", default="mean", choices=GOALS,
                     help="OneWay selection goal")
    run.add_argument("--preprocess", default="kamei", choices=RECIPES,
                     help="EALR feature recipe")
    run.add_argument("--window-mode", default="populated", choices=WINDOW_MODES)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--baseline", default=BEST_SUPERVISED,
                     help="verdict baseline learner (or best_supervised)")
    run.add_argument("--schema-profile", default="kamei")
    run.add_argument("--knn-k", type=int, default=8)
    run.add_argument("--trees", type=int, default=100)
    run.add_argument("--max-depth", type=int, default=None)
    run.add_argument("--min-leaf", type=int, default=2)
    run.add_argument(
        "--rank-by-density", action="store_true",
        help="rank classifiers by probability/effort instead of probability",
    )

    val = sub.add_parser("validate", help="report per-file dataset statistics")
    val.add_argument("--data-dir", type=Path, required=True)
    val.add_argument("--projects", default="")
    val.add_argument("--schema-profile", default="kamei")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                data_dir=args.data_dir,
                out_dir=args.out_dir,
                projects=_split_list(args.projects),
                learners=expand_learners(_split_list(args.learners)),
                effort_fraction=args.effort_fraction,
                popt_fraction=args.popt_fraction,
                goal=args.goal,
                preprocess=args.preprocess,
                window_mode=args.window_mode,
                seed=args.seed,
                baseline=args.baseline,
                schema_profile=args.schema_profile,
                knn_k=args.knn_k,
                trees=args.trees,
                max_depth=args.max_depth,
                min_leaf=args.min_leaf,
                rank_by_density=args.rank_by_density,
            )
            return cmd_run(cfg)
        return cmd_validate(
            args.data_dir, _split_list(args.projects), args.schema_profile
        )
    except (ConfigError, DataError, FileNotFoundError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
