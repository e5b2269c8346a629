"""Change-record datasets: schema, CSV loading and calendar-month grouping.

A change (commit) carries 14 numeric metrics, a commit date and a boolean
defect label. Datasets are immutable after load and always sorted by date,
so slices can be shared freely across workers.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np


class MetricId(Enum):
    """The 14 per-change metrics, in canonical declaration order."""

    NS = "ns"
    ND = "nd"
    NF = "nf"
    ENTROPY = "entropy"
    LA = "la"
    LD = "ld"
    LT = "lt"
    FIX = "fix"
    NDEV = "ndev"
    AGE = "age"
    NUC = "nuc"
    EXP = "exp"
    REXP = "rexp"
    SEXP = "sexp"

    def __str__(self) -> str:
        return self.value


METRICS: tuple[MetricId, ...] = tuple(MetricId)
METRIC_INDEX: dict[MetricId, int] = {m: i for i, m in enumerate(METRICS)}

# The single-metric rankers never use the two churn components directly.
RANKABLE: tuple[MetricId, ...] = tuple(
    m for m in METRICS if m not in (MetricId.LA, MetricId.LD)
)

_LA = METRIC_INDEX[MetricId.LA]
_LD = METRIC_INDEX[MetricId.LD]
_FIX = METRIC_INDEX[MetricId.FIX]


class DataError(Exception):
    """Base class for dataset ingestion failures."""


class SchemaError(DataError):
    """A required column is missing from the CSV header."""


class RowError(DataError):
    """A data row could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyDatasetError(DataError):
    """The file contains a header but no data rows (or nothing at all)."""


@dataclass(frozen=True)
class ChangeRecord:
    """One committed change: date, the 14 metrics and the defect label."""

    timestamp: dt.date
    metrics: Mapping[MetricId, float]
    label: bool

    def validate(self) -> None:
        for m in METRICS:
            if m not in self.metrics:
                raise SchemaError(f"record is missing metric {m.name}")
            v = float(self.metrics[m])
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"metric {m.name} must be finite and >= 0, got {v}")
        fix = float(self.metrics[MetricId.FIX])
        if fix not in (0.0, 1.0):
            raise ValueError(f"metric FIX must be 0 or 1, got {fix}")


def effort(record: ChangeRecord) -> float:
    """Inspection effort of one change: lines added plus lines deleted."""
    return float(record.metrics[MetricId.LA]) + float(record.metrics[MetricId.LD])


class Dataset:
    """A project's changes, column-major, sorted ascending by commit date."""

    __slots__ = ("project", "dates", "X", "y")

    def __init__(
        self,
        project: str,
        dates: np.ndarray,
        X: np.ndarray,
        y: np.ndarray,
        *,
        presorted: bool = False,
    ):
        dates = np.asarray(dates, dtype="datetime64[D]")
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=bool)
        if X.ndim != 2 or X.shape[1] != len(METRICS):
            raise ValueError(f"metric matrix must be (n, {len(METRICS)})")
        if not (len(dates) == len(X) == len(y)):
            raise ValueError("dates, metrics and labels must have equal length")
        if not presorted and len(dates) > 1:
            order = np.argsort(dates, kind="stable")
            dates, X, y = dates[order], X[order], y[order]
        self.project = project
        self.dates = dates
        self.X = X
        self.y = y

    @classmethod
    def from_records(cls, project: str, records: Sequence[ChangeRecord]) -> "Dataset":
        if not records:
            raise EmptyDatasetError(f"no records for project {project!r}")
        for r in records:
            r.validate()
        dates = np.array([r.timestamp for r in records], dtype="datetime64[D]")
        X = np.array(
            [[float(r.metrics[m]) for m in METRICS] for r in records], dtype=np.float64
        )
        y = np.array([bool(r.label) for r in records], dtype=bool)
        return cls(project, dates, X, y)

    def __len__(self) -> int:
        return len(self.y)

    def __getitem__(self, sl: slice) -> "Dataset":
        if not isinstance(sl, slice):
            raise TypeError("datasets slice to datasets; use record() for one row")
        return Dataset(
            self.project, self.dates[sl], self.X[sl], self.y[sl], presorted=True
        )

    def take(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(
            self.project,
            self.dates[indices],
            self.X[indices],
            self.y[indices],
            presorted=True,
        )

    @staticmethod
    def concat(a: "Dataset", b: "Dataset") -> "Dataset":
        return Dataset(
            a.project,
            np.concatenate([a.dates, b.dates]),
            np.vstack([a.X, b.X]),
            np.concatenate([a.y, b.y]),
            presorted=True,
        )

    @property
    def efforts(self) -> np.ndarray:
        return self.X[:, _LA] + self.X[:, _LD]

    def metric_values(self, m: MetricId) -> np.ndarray:
        return self.X[:, METRIC_INDEX[m]]

    def record(self, i: int) -> ChangeRecord:
        row = self.X[i]
        return ChangeRecord(
            timestamp=self.dates[i].astype(dt.date),
            metrics={m: float(row[j]) for j, m in enumerate(METRICS)},
            label=bool(self.y[i]),
        )

    @property
    def records(self) -> list[ChangeRecord]:
        return [self.record(i) for i in range(len(self))]

    @property
    def defect_ratio(self) -> float:
        return float(self.y.mean()) if len(self) else 0.0


@dataclass(frozen=True)
class MonthBucket:
    """Changes committed in one calendar month, original order preserved."""

    key: tuple[int, int]  # (year, month)
    data: Dataset


def _month_key(month64: np.datetime64) -> tuple[int, int]:
    k = int(month64.astype("datetime64[M]").astype(int))
    return (1970 + k // 12, k % 12 + 1)


def group_by_month(ds: Dataset) -> list[MonthBucket]:
    """Split a date-sorted dataset into its populated calendar months.

    Months without any change are not emitted; bucket keys are strictly
    increasing and the buckets concatenated in order equal the input.
    """
    if len(ds) == 0:
        return []
    months = ds.dates.astype("datetime64[M]")
    change = np.flatnonzero(months[1:] != months[:-1]) + 1
    starts = np.concatenate(([0], change))
    stops = np.concatenate((change, [len(ds)]))
    return [
        MonthBucket(key=_month_key(months[a]), data=ds[a:b])
        for a, b in zip(starts, stops)
    ]


# --- CSV ingestion ----------------------------------------------------------

@dataclass(frozen=True)
class SchemaProfile:
    """Column-synonym table mapping a CSV dialect onto the canonical schema."""

    name: str
    timestamp: tuple[str, ...]
    label: tuple[str, ...]
    metrics: Mapping[MetricId, tuple[str, ...]]


KAMEI_PROFILE = SchemaProfile(
    name="kamei",
    timestamp=("commitdate", "commit_date", "date", "timestamp"),
    label=("bug", "contains_bug", "buggy", "label"),
    metrics={
        MetricId.NS: ("ns",),
        MetricId.ND: ("nd",),
        MetricId.NF: ("nf",),
        MetricId.ENTROPY: ("entropy", "entrophy"),
        MetricId.LA: ("la", "lines_added"),
        MetricId.LD: ("ld", "lines_deleted"),
        MetricId.LT: ("lt",),
        MetricId.FIX: ("fix",),
        MetricId.NDEV: ("ndev",),
        MetricId.AGE: ("age",),
        MetricId.NUC: ("nuc", "npt"),
        MetricId.EXP: ("exp",),
        MetricId.REXP: ("rexp",),
        MetricId.SEXP: ("sexp",),
    },
)

PROFILES: dict[str, SchemaProfile] = {"kamei": KAMEI_PROFILE}


def register_profile(profile: SchemaProfile) -> None:
    PROFILES[profile.name] = profile


_TRUE = {"1", "true", "yes", "t"}
_FALSE = {"0", "false", "no", "f"}

_DATE_FORMATS = (
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d",
    "%Y/%m/%d %H:%M:%S",
    "%Y/%m/%d",
)


def _epoch_to_date(cell: str) -> dt.date:
    return dt.datetime.fromtimestamp(float(cell), tz=dt.timezone.utc).date()


def _detect_timestamp_parser(cell: str) -> Callable[[str], dt.date]:
    try:
        float(cell)
    except ValueError:
        pass
    else:
        return _epoch_to_date
    for fmt in _DATE_FORMATS:
        try:
            dt.datetime.strptime(cell, fmt)
        except ValueError:
            continue
        return lambda c, f=fmt: dt.datetime.strptime(c, f).date()
    raise ValueError(f"unrecognized timestamp format: {cell!r}")


def _parse_number(cell: str) -> float:
    c = cell.strip().lower()
    if c in _TRUE:
        return 1.0
    if c in _FALSE:
        return 0.0
    return float(cell)


def _parse_label(cell: str, line: int) -> bool:
    v = _parse_number(cell)
    if v not in (0.0, 1.0):
        raise RowError(f"label must be 0/1 or true/false, got {cell!r}", line)
    return bool(v)


def load_csv(path: str | Path, schema_profile: str = "kamei") -> Dataset:
    """Load one project's changes from a headered CSV file.

    Column names are matched case-insensitively through the schema profile's
    synonym table; extra columns are ignored. Rows with missing, negative or
    non-finite metric values are rejected with their line number.
    """
    path = Path(path)
    try:
        profile = PROFILES[schema_profile]
    except KeyError:
        raise ValueError(
            f"unknown schema profile {schema_profile!r}; known: {sorted(PROFILES)}"
        ) from None

    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyDatasetError(f"{path}: file is empty")
        names = [h.strip().lower() for h in header]

        def find(synonyms: tuple[str, ...], what: str) -> int:
            for s in synonyms:
                if s in names:
                    return names.index(s)
            raise SchemaError(
                f"{path}: missing column for {what}; expected one of {synonyms}"
            )

        ts_col = find(profile.timestamp, "timestamp")
        label_col = find(profile.label, "label")
        metric_cols = {
            m: find(profile.metrics[m], f"metric {m.name}") for m in METRICS
        }

        dates: list[dt.date] = []
        rows: list[list[float]] = []
        labels: list[bool] = []
        parse_ts: Callable[[str], dt.date] | None = None
        for line, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(names):
                raise RowError(
                    f"expected {len(names)} cells, got {len(cells)}", line
                )
            if parse_ts is None:
                try:
                    parse_ts = _detect_timestamp_parser(cells[ts_col].strip())
                except ValueError as e:
                    raise RowError(str(e), line) from None
            try:
                dates.append(parse_ts(cells[ts_col].strip()))
            except (ValueError, OverflowError, OSError):
                raise RowError(
                    f"unparsable timestamp {cells[ts_col]!r}", line
                ) from None
            row = []
            for m in METRICS:
                cell = cells[metric_cols[m]]
                try:
                    v = _parse_number(cell)
                except ValueError:
                    raise RowError(
                        f"unparsable value {cell!r} for metric {m.name}", line
                    ) from None
                if not np.isfinite(v) or v < 0:
                    raise RowError(
                        f"metric {m.name} must be finite and >= 0, got {cell!r}", line
                    )
                row.append(v)
            if row[_FIX] not in (0.0, 1.0):
                raise RowError(f"metric FIX must be 0 or 1, got {row[_FIX]}", line)
            rows.append(row)
            labels.append(_parse_label(cells[label_col], line))

    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    return Dataset(path.stem, np.array(dates, dtype="datetime64[D]"), rows, labels)


CANONICAL_HEADER = (
    "commitdate,ns,nd,nf,entrophy,la,ld,lt,fix,ndev,age,nuc,exp,rexp,sexp,bug"
)


def write_csv(ds: Dataset, path: str | Path) -> None:
    """Write a dataset in the canonical column order; reloads losslessly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(CANONICAL_HEADER + "\n")
        writer = csv.writer(fh)
        for i in range(len(ds)):
            date = ds.dates[i].astype(dt.date).isoformat()
            cells = [repr(float(v)) for v in ds.X[i]]
            writer.writerow([date, *cells, int(ds.y[i])])
