"""Effort-aware just-in-time defect prediction experiments."""

from .data import (
    METRICS,
    RANKABLE,
    ChangeRecord,
    DataError,
    Dataset,
    EmptyDatasetError,
    MetricId,
    MonthBucket,
    RowError,
    SchemaError,
    effort,
    group_by_month,
    load_csv,
    write_csv,
)
from .evaluation import (
    DEFAULT_FRACTION,
    EvalScores,
    LiftCurve,
    confusion_scores,
    effort_cutoff,
    evaluate_ranking,
    popt,
)
from .harness import (
    ALL_LEARNERS,
    ExperimentResult,
    InsufficientHistoryError,
    WindowSpec,
    make_windows,
    run_experiment,
)
from .kernels import BACKEND
from .oneway import MetricScoreTable, OneWayModel, oneway_predict, oneway_train
from .rankers import MetricRejectedError, Ranking, rank_by_churn, rank_by_metric
from .stats import (
    ComparisonVerdict,
    WilcoxonResult,
    bh_adjust,
    cliffs_delta,
    verdict,
    wilcoxon_signed_rank,
)
from .supervised import (
    ClassifierConfig,
    ClassifierModel,
    RegressionModel,
    UnfitError,
    fit_classifier,
    fit_ealr,
    predict_classifier,
    predict_ealr,
)
from .synth import synthetic_corpus, synthetic_dataset

__version__ = "0.1.0"
