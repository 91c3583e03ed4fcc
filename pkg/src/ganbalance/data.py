"""CSV ingestion, deduplication, stratified splitting, and feature scaling.

The preprocessing order is fixed: load -> dedup -> stratified split -> fit
standard scaler on train and apply to both sides -> fit min-max scaler on the
standardized train and apply to both sides.  After that every feature value
lies in [0, 1] (test rows are clamped), which matches the sigmoid output range
of the sample generator downstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ganbalance.errors import CapacityError, CsvParseError, SchemaError


@dataclass
class RawTable:
    """Parsed CSV: named feature columns plus a binary label column."""

    feature_names: list
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64 in {0, 1}

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


@dataclass
class Dataset:
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64 in {0, 1}

    @property
    def positive_count(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def negative_count(self) -> int:
        return int(np.sum(self.labels == 0))

    def copy(self) -> Dataset:
        return Dataset(self.features.copy(), self.labels.copy())


@dataclass(frozen=True)
class SplitSpec:
    """Exact per-class row counts for the train/test partition."""

    train_size: int = 10000
    test_size: int = 5000
    train_positives: int = 315
    test_positives: int = 158

    def __post_init__(self):
        if self.train_positives > self.train_size:
            raise ValueError("train_positives exceeds train_size")
        if self.test_positives > self.test_size:
            raise ValueError("test_positives exceeds test_size")
        if min(self.train_size, self.test_size, self.train_positives, self.test_positives) < 0:
            raise ValueError("split counts must be non-negative")


@dataclass
class StandardScalerParams:
    mean: np.ndarray
    std: np.ndarray  # population (biased) standard deviation


@dataclass
class MinMaxParams:
    min: np.ndarray
    max: np.ndarray


DEGENERATE_EPS = 1e-12


def load_csv(path, label_column: str = "Class") -> RawTable:
    """Parse a headered CSV of numeric features plus a 0/1 label column.

    Raises CsvParseError with 1-based file row/column positions for malformed
    cells, SchemaError for a missing label column or non-binary labels.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, expected a header row") from None
        header = [name.strip() for name in header]
        if label_column not in header:
            raise SchemaError(
                f"{path}: no {label_column!r} column among {header}"
            )
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]

        feature_rows = []
        labels = []
        for row_pos, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise CsvParseError(
                    f"expected {len(header)} cells, found {len(row)}",
                    row=row_pos,
                    column=min(len(row) + 1, len(header)),
                )
            parsed = np.empty(len(header) - 1)
            j = 0
            for col_pos, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise CsvParseError(
                        f"non-numeric cell {cell!r}",
                        row=row_pos,
                        column=col_pos + 1,
                    ) from None
                if col_pos == label_idx:
                    if value not in (0.0, 1.0):
                        raise SchemaError(
                            f"label must be 0 or 1, found {cell!r} "
                            f"(row {row_pos}, column {col_pos + 1})"
                        )
                    labels.append(int(value))
                else:
                    parsed[j] = value
                    j += 1
            feature_rows.append(parsed)

    n = len(feature_rows)
    features = (
        np.vstack(feature_rows) if n else np.empty((0, len(feature_names)))
    )
    return RawTable(feature_names, features, np.asarray(labels, dtype=np.int64))


def dedup(table: RawTable) -> RawTable:
    """Drop rows identical across all features and the label, keeping the
    first occurrence and the survivors' relative order."""
    if table.n_rows == 0:
        return RawTable(list(table.feature_names), table.features.copy(), table.labels.copy())
    combined = np.column_stack([table.features, table.labels.astype(np.float64)])
    _, first_idx = np.unique(combined, axis=0, return_index=True)
    keep = np.sort(first_idx)
    return RawTable(list(table.feature_names), table.features[keep], table.labels[keep])


def stratified_split(
    table: RawTable, spec: SplitSpec, rng: np.random.Generator
) -> tuple[Dataset, Dataset]:
    """Partition into train/test with exact per-class counts.

    Positives are assigned to the two sides uniformly at random without
    replacement; negatives fill the remaining slots the same way.  Rows left
    over (when the table is larger than the requested sizes) are dropped.
    """
    pos_idx = np.flatnonzero(table.labels == 1)
    neg_idx = np.flatnonzero(table.labels == 0)
    need_pos = spec.train_positives + spec.test_positives
    need_neg = (spec.train_size - spec.train_positives) + (
        spec.test_size - spec.test_positives
    )
    if len(pos_idx) < need_pos:
        raise CapacityError(
            f"need {need_pos} positive rows, only {len(pos_idx)} available"
        )
    if len(neg_idx) < need_neg:
        raise CapacityError(
            f"need {need_neg} negative rows, only {len(neg_idx)} available"
        )

    pos_perm = rng.permutation(pos_idx)
    neg_perm = rng.permutation(neg_idx)
    train_rows = np.concatenate(
        [
            pos_perm[: spec.train_positives],
            neg_perm[: spec.train_size - spec.train_positives],
        ]
    )
    test_rows = np.concatenate(
        [
            pos_perm[spec.train_positives : need_pos],
            neg_perm[
                spec.train_size
                - spec.train_positives : spec.train_size
                - spec.train_positives
                + spec.test_size
                - spec.test_positives
            ],
        ]
    )
    # keep the original file order inside each side
    train_rows = np.sort(train_rows)
    test_rows = np.sort(test_rows)
    train = Dataset(table.features[train_rows].copy(), table.labels[train_rows].copy())
    test = Dataset(table.features[test_rows].copy(), table.labels[test_rows].copy())
    return train, test


def fit_standard(train: Dataset) -> StandardScalerParams:
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)  # ddof=0, population convention
    return StandardScalerParams(mean, std)


def apply_standard(params: StandardScalerParams, data: Dataset) -> Dataset:
    divisor = np.where(params.std < DEGENERATE_EPS, 1.0, params.std)
    scaled = (data.features - params.mean) / divisor
    return Dataset(scaled, data.labels.copy())


def fit_minmax(train: Dataset) -> MinMaxParams:
    return MinMaxParams(train.features.min(axis=0), train.features.max(axis=0))


def apply_minmax(params: MinMaxParams, data: Dataset) -> Dataset:
    span = params.max - params.min
    degenerate = span < DEGENERATE_EPS
    divisor = np.where(degenerate, 1.0, span)
    scaled = (data.features - params.min) / divisor
    scaled[:, degenerate] = 0.0
    scaled = np.clip(scaled, 0.0, 1.0)
    return Dataset(scaled, data.labels.copy())


def scale_train_test(train: Dataset, test: Dataset):
    """Fit both scalers on train, apply to both sides.

    Returns (train_scaled, test_scaled, standard_params, minmax_params).
    """
    std_params = fit_standard(train)
    train_std = apply_standard(std_params, train)
    test_std = apply_standard(std_params, test)
    mm_params = fit_minmax(train_std)
    return (
        apply_minmax(mm_params, train_std),
        apply_minmax(mm_params, test_std),
        std_params,
        mm_params,
    )
