"""
Datasets and design matrices.

This module covers:
1. CSV / DataFrame ingestion with the complete-case rule
2. Design construction with an intercept, pairwise interactions and a full
   set of interactions with one binary column
3. Numerical rank checks and per-column diagnostics

Everything built here is immutable: arrays are copied and marked read-only.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from ramplab.config import get_settings
from ramplab.exceptions import (
    DataError,
    DimensionMismatch,
    EmptyAfterCompleteCase,
    MalformedValue,
    MissingColumn,
    NonBinaryOutcome,
    NotBinary,
    RankDeficient,
    UnknownColumn,
)

logger = logging.getLogger(__name__)

INTERCEPT = "const"


class ColumnKind(str, Enum):
    INTERCEPT = "intercept"
    CONTINUOUS = "continuous"
    BINARY = "binary"
    INTERACTION = "interaction"


@dataclass(frozen=True)
class Column:
    """Name and role of one design column."""

    name: str
    kind: ColumnKind
    parents: tuple[str, str] | None = None


def _frozen(values: Iterable[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


def is_binary(values: np.ndarray) -> bool:
    """True when every element is exactly 0 or 1."""
    return bool(np.all((values == 0.0) | (values == 1.0)))


# =========
# DATASETS
# =========


@dataclass(frozen=True, eq=False)
class Dataset:
    """Binary outcome plus named regressor columns, complete cases only."""

    y: np.ndarray
    columns: Mapping[str, np.ndarray]
    outcome: str = "y"
    n_dropped: int = 0

    def __post_init__(self) -> None:
        y = _frozen(self.y)
        if y.ndim != 1:
            raise DimensionMismatch("outcome must be a vector")
        if not is_binary(y):
            raise NonBinaryOutcome(f"outcome '{self.outcome}' takes values outside {{0, 1}}")
        n = y.shape[0]
        if n < 2:
            raise DataError(f"need at least 2 observations, got {n}")

        columns: dict[str, np.ndarray] = {}
        for name, values in self.columns.items():
            arr = _frozen(values)
            if arr.shape != (n,):
                raise DimensionMismatch(
                    f"column '{name}' has shape {arr.shape}, expected ({n},)"
                )
            if not np.all(np.isfinite(arr)):
                raise MalformedValue(f"column '{name}' contains non-finite values")
            columns[name] = arr

        object.__setattr__(self, "y", y)
        object.__setattr__(self, "columns", columns)

    @property
    def n_obs(self) -> int:
        return int(self.y.shape[0])

    def take(self, indices: np.ndarray) -> Dataset:
        """Rows at ``indices`` (repeats allowed), e.g. a bootstrap resample."""
        return Dataset(
            y=self.y[indices],
            columns={name: values[indices] for name, values in self.columns.items()},
            outcome=self.outcome,
        )


def load_frame(frame: pd.DataFrame, outcome: str, regressors: Sequence[str]) -> Dataset:
    """
    Build a Dataset from a DataFrame, keeping complete cases only.

    Args:
        frame: Raw table; empty cells must already be NaN
        outcome: Name of the 0/1 outcome column
        regressors: Regressor column names (duplicates are kept once)

    Returns:
        Dataset whose rows are the complete cases in their original order
    """
    wanted = list(dict.fromkeys([outcome, *regressors]))
    missing = [name for name in wanted if name not in frame.columns]
    if missing:
        raise MissingColumn(f"columns not found: {', '.join(missing)}")

    try:
        table = frame.loc[:, wanted].apply(pd.to_numeric)
    except (TypeError, ValueError) as exc:
        raise MalformedValue(f"non-numeric value: {exc}") from exc

    complete = table.dropna()
    n_dropped = len(table) - len(complete)
    if complete.empty:
        raise EmptyAfterCompleteCase("no complete cases remain")
    if n_dropped:
        logger.info("Dropped %d incomplete rows of %d", n_dropped, len(table))

    y = complete[outcome].to_numpy(dtype=float)
    if not is_binary(y):
        bad = sorted(set(np.unique(y)) - {0.0, 1.0})
        raise NonBinaryOutcome(f"outcome '{outcome}' has non-binary values {bad[:5]}")

    return Dataset(
        y=y,
        columns={name: complete[name].to_numpy(dtype=float) for name in wanted[1:]},
        outcome=outcome,
        n_dropped=n_dropped,
    )


def load_csv(path: str | Path, outcome: str, regressors: Sequence[str]) -> Dataset:
    """Read a UTF-8 CSV with a header row; empty fields are missing."""
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            na_values=[""],
            keep_default_na=False,
            encoding="utf-8",
        )
    except FileNotFoundError as exc:
        raise DataError(f"file not found: {path}") from exc
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc

    return load_frame(frame, outcome, regressors)


# ===============
# DESIGN MATRICES
# ===============


@dataclass(frozen=True)
class DesignSpec:
    """Which regressors enter the design and how they interact."""

    regressors: tuple[str, ...]
    interactions: tuple[tuple[str, str], ...] = ()
    full_interactions_with: str | None = None


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    columns: tuple[Column, ...]

    def __post_init__(self) -> None:
        X = _frozen(self.X)
        y = _frozen(self.y)
        if X.ndim != 2 or X.shape[1] != len(self.columns) or X.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"X is {X.shape}, y has {y.shape[0]} rows, {len(self.columns)} column tags"
            )
        n, k = X.shape
        if k < 2:
            raise DataError("design needs an intercept and at least one regressor")
        if n <= k:
            raise DataError(f"need more observations ({n}) than columns ({k})")
        if self.columns[0].kind is not ColumnKind.INTERCEPT or not np.all(X[:, 0] == 1.0):
            raise DataError("first design column must be the intercept")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

        for j, col in enumerate(self.columns):
            if col.kind is ColumnKind.INTERACTION:
                a, b = col.parents
                if not np.array_equal(X[:, j], X[:, self.index_of(a)] * X[:, self.index_of(b)]):
                    raise DataError(f"interaction '{col.name}' is not the product of its parents")

    @property
    def n_obs(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_params(self) -> int:
        return int(self.X.shape[1])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.columns)

    @property
    def kinds(self) -> tuple[ColumnKind, ...]:
        return tuple(col.kind for col in self.columns)

    def index_of(self, name: str) -> int:
        for j, col in enumerate(self.columns):
            if col.name == name:
                return j
        raise UnknownColumn(f"'{name}' is not a design column")

    def interactions_of(self, name: str) -> list[int]:
        """Indices of interaction columns that have ``name`` as a parent."""
        return [
            j
            for j, col in enumerate(self.columns)
            if col.kind is ColumnKind.INTERACTION and name in col.parents
        ]


def _first_dependent_column(X: np.ndarray, tol: float) -> int | None:
    for k in range(2, X.shape[1] + 1):
        s = np.linalg.svd(X[:, :k], compute_uv=False)
        if s[-1] <= tol * s[0]:
            return k - 1
    return None


def check_rank(X: np.ndarray, names: Sequence[str], tol: float | None = None) -> None:
    """Raise RankDeficient when sigma_min / sigma_max <= tol."""
    tol = get_settings().rank_tol if tol is None else tol
    s = np.linalg.svd(X, compute_uv=False)
    if s[0] > 0 and s[-1] > tol * s[0]:
        return
    j = _first_dependent_column(X, tol)
    name = names[j] if j is not None else None
    raise RankDeficient(
        f"design is rank deficient (sigma ratio {s[-1] / s[0] if s[0] else 0.0:.3g}); "
        f"column '{name}' is linearly dependent on earlier columns",
        column=name,
    )


def build_design(data: Dataset, spec: DesignSpec) -> DesignMatrix:
    """
    Construct the design matrix [1, regressors..., interactions...].

    With ``full_interactions_with = w`` the column order is [1, z, w, w*z]
    where z are the remaining regressors; explicit interaction pairs are
    appended after that.
    """
    referenced = [*spec.regressors, *(p for pair in spec.interactions for p in pair)]
    if spec.full_interactions_with is not None:
        referenced.append(spec.full_interactions_with)
    unknown = [name for name in referenced if name not in data.columns]
    if unknown:
        raise UnknownColumn(f"unknown columns: {', '.join(dict.fromkeys(unknown))}")

    columns = [Column(INTERCEPT, ColumnKind.INTERCEPT)]
    arrays = [np.ones(data.n_obs)]

    def add_base(name: str) -> None:
        values = data.columns[name]
        kind = ColumnKind.BINARY if is_binary(values) else ColumnKind.CONTINUOUS
        columns.append(Column(name, kind))
        arrays.append(values)

    def add_interaction(a: str, b: str) -> None:
        columns.append(Column(f"{a}:{b}", ColumnKind.INTERACTION, (a, b)))
        arrays.append(data.columns[a] * data.columns[b])

    w = spec.full_interactions_with
    if w is None:
        for name in spec.regressors:
            add_base(name)
    else:
        if not is_binary(data.columns[w]):
            raise NotBinary(f"full-interaction target '{w}' must be a 0/1 column")
        z = [name for name in spec.regressors if name != w]
        for name in z:
            add_base(name)
        add_base(w)
        for name in z:
            add_interaction(w, name)

    base_names = {col.name for col in columns if col.kind is not ColumnKind.INTERACTION}
    for a, b in spec.interactions:
        for parent in (a, b):
            if parent not in base_names:
                raise UnknownColumn(f"interaction parent '{parent}' is not a regressor")
        add_interaction(a, b)

    X = np.column_stack(arrays)
    names = [col.name for col in columns]
    check_rank(X, names)
    return DesignMatrix(X=X, y=data.y, columns=tuple(columns))


def design_from_arrays(
    y: np.ndarray,
    columns: Mapping[str, np.ndarray],
    interactions: Sequence[tuple[str, str]] = (),
) -> DesignMatrix:
    """Shortcut for simulated data: every column is a regressor."""
    data = Dataset(y=y, columns=columns)
    return build_design(data, DesignSpec(tuple(columns), tuple(interactions)))


def counterfactual(design: DesignMatrix, variable: str, value: float) -> np.ndarray:
    """X with a binary column fixed at ``value`` and its interactions recomputed."""
    k = design.index_of(variable)
    if design.columns[k].kind is not ColumnKind.BINARY:
        raise NotBinary(f"'{variable}' is not a binary column")
    X = design.X.copy()
    X[:, k] = value
    for j in design.interactions_of(variable):
        a, b = design.columns[j].parents
        X[:, j] = X[:, design.index_of(a)] * X[:, design.index_of(b)]
    return X


# ===========
# DIAGNOSTICS
# ===========


@dataclass(frozen=True)
class ColumnSummary:
    """Moments of one column; higher moments are None for constant columns."""

    name: str
    kind: str
    mean: float
    sd: float
    skewness: float | None
    kurtosis: float | None
    jarque_bera: float | None
    jarque_bera_pvalue: float | None


@dataclass(frozen=True)
class DesignDiagnostics:
    summaries: tuple[ColumnSummary, ...]
    rank: int
    singular_value_ratio: float
    full_rank: bool

    def summary(self, name: str) -> ColumnSummary:
        for row in self.summaries:
            if row.name == name:
                return row
        raise UnknownColumn(f"no summary for '{name}'")


def summarize_column(name: str, values: np.ndarray, kind: str) -> ColumnSummary:
    """Mean, sd (n-1), and the standardized third and fourth moment ratios."""
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    if np.ptp(values) == 0.0:
        return ColumnSummary(name, kind, mean, 0.0, None, None, None, None)

    jb = stats.jarque_bera(values)
    return ColumnSummary(
        name=name,
        kind=kind,
        mean=mean,
        sd=sd,
        skewness=float(stats.skew(values, bias=True)),
        kurtosis=float(stats.kurtosis(values, fisher=False, bias=True)),
        jarque_bera=float(jb.statistic),
        jarque_bera_pvalue=float(jb.pvalue),
    )


def validate(design: DesignMatrix, outcome: str = "y") -> DesignDiagnostics:
    """Per-column moments (outcome first) and the singular-value rank check."""
    tol = get_settings().rank_tol
    summaries = [summarize_column(outcome, design.y, "outcome")]
    for j, col in enumerate(design.columns):
        summaries.append(summarize_column(col.name, design.X[:, j], col.kind.value))

    s = np.linalg.svd(design.X, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    return DesignDiagnostics(
        summaries=tuple(summaries),
        rank=int(np.sum(s > tol * s[0])),
        singular_value_ratio=ratio,
        full_rank=ratio > tol,
    )
