"""Reading and writing UCR ``.ts`` files, resampling and subsampling.

Class labels are kept as opaque strings and mapped to dense integer ids.
The id order comes from the ``@classLabel`` header when present, otherwise
from the sorted label set (numerically if every label parses as a number).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    EmptyDatasetError,
    MissingValuesError,
    StratificationImpossibleError,
    UnequalLengthError,
)

__all__ = [
    "Dataset",
    "parse_ts_file",
    "load_ts",
    "write_ts",
    "write_csv",
    "align_classes",
    "stratified_resample",
    "subsample_indices",
    "subsample_train",
    "load_ucr_split",
]

_MISSING_TOKENS = {"?", "nan", "NaN", "NAN", ""}


@dataclass(frozen=True, eq=False)
class Dataset:
    """n labelled series of equal length m.

    Parameters
    ----------
    X : ndarray of shape (n, m)
    y : ndarray of shape (n,), integer class ids indexing ``classes``
    classes : tuple of str
    name : str
    """

    X: np.ndarray
    y: np.ndarray
    classes: tuple
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise UnequalLengthError("series must form an (n, m) array")
        if X.shape[0] == 0 or X.shape[1] == 0:
            raise EmptyDatasetError("dataset has no cases")
        if y.shape != (X.shape[0],):
            raise ValueError("labels must align with series")
        if np.isnan(X).any():
            raise MissingValuesError("series contain missing values")
        if y.min() < 0 or y.max() >= len(self.classes):
            raise ValueError("class id out of range")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "classes", tuple(str(c) for c in self.classes))

    @property
    def n_cases(self) -> int:
        return self.X.shape[0]

    @property
    def series_length(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def labels(self) -> list[str]:
        return [self.classes[i] for i in self.y]

    def take(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[indices], self.y[indices], self.classes, self.name)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.classes == other.classes
            and self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def __repr__(self):
        return (
            f"Dataset(name={self.name!r}, n={self.n_cases}, "
            f"m={self.series_length}, classes={list(self.classes)})"
        )


def _sort_labels(labels):
    try:
        return sorted(labels, key=float)
    except ValueError:
        return sorted(labels)


def parse_ts_file(text: str, name: str = "") -> Dataset:
    """Parse the contents of a univariate UCR ``.ts`` file.

    Header lines start with ``@``, comments with ``#``. Every data line is
    a comma separated series followed by ``:label``.
    """
    header_classes = None
    rows = []
    labels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            tokens = line.split()
            key = tokens[0].lower()
            if key == "@problemname" and len(tokens) > 1 and not name:
                name = tokens[1]
            elif key == "@classlabel" and len(tokens) > 2 and tokens[1].lower() == "true":
                header_classes = tokens[2:]
            continue
        values, sep, label = line.rpartition(":")
        if not sep:
            raise ValueError(f"line {lineno}: no class label")
        if ":" in values:
            raise ValueError(f"line {lineno}: multivariate series are not supported")
        fields = values.split(",")
        if any(f.strip() in _MISSING_TOKENS for f in fields):
            raise MissingValuesError(f"line {lineno}: missing value")
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if any(math.isnan(v) for v in row):
            raise MissingValuesError(f"line {lineno}: missing value")
        if rows and len(row) != len(rows[0]):
            raise UnequalLengthError(
                f"line {lineno}: length {len(row)} differs from {len(rows[0])}"
            )
        rows.append(row)
        labels.append(label.strip())

    if not rows:
        raise EmptyDatasetError("no data lines")

    if header_classes is not None:
        classes = list(header_classes)
        for lab in _sort_labels(set(labels) - set(classes)):
            classes.append(lab)
    else:
        classes = _sort_labels(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[lab] for lab in labels], dtype=np.int64)
    return Dataset(np.array(rows, dtype=np.float64), y, tuple(classes), name)


def load_ts(path) -> Dataset:
    path = Path(path)
    ds = parse_ts_file(path.read_text())
    if not ds.name:
        ds = Dataset(ds.X, ds.y, ds.classes, path.stem)
    return ds


def write_ts(dataset: Dataset) -> str:
    """Serialise to ``.ts`` text; floats use ``repr`` so parsing round-trips."""
    out = io.StringIO()
    if dataset.name:
        out.write(f"@problemName {dataset.name}\n")
    out.write("@timeStamps false\n@missing false\n@univariate true\n")
    out.write("@equalLength true\n")
    out.write(f"@seriesLength {dataset.series_length}\n")
    out.write("@classLabel true " + " ".join(dataset.classes) + "\n")
    out.write("@data\n")
    for row, label in zip(dataset.X, dataset.labels):
        out.write(",".join(repr(float(v)) for v in row) + ":" + label + "\n")
    return out.getvalue()


def write_csv(dataset: Dataset) -> str:
    """One case per row, label in the final column."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"t{j}" for j in range(dataset.series_length)] + ["label"])
    for row, label in zip(dataset.X, dataset.labels):
        writer.writerow([repr(float(v)) for v in row] + [label])
    return out.getvalue()


def align_classes(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    """Re-map both splits onto a shared class id space (train order first)."""
    if train.classes == test.classes:
        return train, test
    classes = list(train.classes)
    classes += [c for c in test.classes if c not in train.classes]
    index = {c: i for i, c in enumerate(classes)}

    def remap(ds):
        y = np.array([index[c] for c in ds.labels], dtype=np.int64)
        return Dataset(ds.X, y, tuple(classes), ds.name)

    return remap(train), remap(test)


def load_ucr_split(directory, name) -> tuple[Dataset, Dataset]:
    """Load ``NAME_TRAIN.ts``/``NAME_TEST.ts`` from ``directory`` or ``directory/NAME``."""
    directory = Path(directory)
    for base in (directory, directory / name):
        train_path = base / f"{name}_TRAIN.ts"
        test_path = base / f"{name}_TEST.ts"
        if train_path.exists() and test_path.exists():
            return align_classes(load_ts(train_path), load_ts(test_path))
    raise FileNotFoundError(f"{directory / (name + '_TRAIN.ts')}")


def stratified_resample(train: Dataset, test: Dataset, resample_id: int, seed: int = 0):
    """Redraw a train/test split preserving per-class train and test counts.

    ``resample_id == 0`` returns the original split. Otherwise the pooled
    cases of each class are shuffled with a generator seeded from
    ``(seed, resample_id)`` and the first ``count(c, train)`` go to train.
    """
    if resample_id == 0:
        return train, test
    if train.series_length != test.series_length:
        raise ValueError("train and test series lengths differ")
    train, test = align_classes(train, test)

    X = np.vstack([train.X, test.X])
    y = np.concatenate([train.y, test.y])
    train_counts = train.class_counts()
    rng = np.random.default_rng([seed, resample_id])

    train_idx, test_idx = [], []
    for c in range(train.n_classes):
        members = np.flatnonzero(y == c)
        if len(members) < train_counts[c]:
            raise StratificationImpossibleError(
                f"class {train.classes[c]!r} has {len(members)} cases, "
                f"needs {train_counts[c]}"
            )
        members = rng.permutation(members)
        train_idx.append(members[: train_counts[c]])
        test_idx.append(members[train_counts[c]:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return (
        Dataset(X[train_idx], y[train_idx], train.classes, train.name),
        Dataset(X[test_idx], y[test_idx], train.classes, test.name),
    )


def subsample_indices(n: int, proportion: float, rng) -> np.ndarray:
    """ceil(proportion * n) distinct indices drawn without replacement."""
    if not 0 < proportion <= 1:
        raise ValueError("proportion must lie in (0, 1]")
    # round first so 0.7 * 10 is 7, not 7.000000000000001
    size = max(1, math.ceil(round(proportion * n, 9)))
    return rng.choice(n, size=size, replace=False)


def subsample_train(train: Dataset, proportion: float, seed: int) -> Dataset:
    idx = subsample_indices(train.n_cases, proportion, np.random.default_rng(seed))
    return train.take(idx)
