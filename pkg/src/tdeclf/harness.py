"""Seeded multi-resample experiments and result files.

Each (dataset, classifier, resample) cell trains on the resampled train
split and predicts the test split; resample ``r`` and its classifier are
seeded with ``base_seed + r``. Results are written as CSV with a fixed
column order, sorted by key so reruns produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset_io import Dataset, align_classes, stratified_resample
from .ensembles import VARIANTS, DictionaryClassifier
from .exceptions import IncompleteMatrixError
from .metrics import compute_metrics

__all__ = [
    "CSV_COLUMNS",
    "ClassifierSpec",
    "EuclideanNN",
    "ExperimentResult",
    "make_classifier",
    "run_cell",
    "run_experiment",
    "write_results",
    "read_results",
    "score_matrix",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("dataset", "classifier", "resample", "seed", "train_seconds",
               "accuracy", "balanced_accuracy", "f1", "auroc")
METRICS = ("accuracy", "balanced_accuracy", "f1", "auroc")


class EuclideanNN:
    """1-NN with Euclidean distance; baseline for the dictionary classifiers."""

    def fit(self, train: Dataset):
        self.X_ = train.X
        self.y_ = train.y
        self.n_classes_ = train.n_classes
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        d = (X ** 2).sum(1)[:, None] - 2 * X @ self.X_.T + (self.X_ ** 2).sum(1)[None, :]
        return self.y_[np.argmin(d, axis=1)]

    def predict_proba(self, X):
        pred = self.predict(X)
        out = np.zeros((len(pred), self.n_classes_))
        out[np.arange(len(pred)), pred] = 1.0
        return out


@dataclass(frozen=True)
class ClassifierSpec:
    """Picklable recipe for a classifier: a variant name plus build options."""

    name: str
    variant: str
    options: tuple = ()

    @classmethod
    def of(cls, name, variant=None, **options):
        return cls(name, variant or name, tuple(sorted(options.items())))


def make_classifier(spec: ClassifierSpec, seed: int):
    variant = spec.variant.lower()
    if variant in ("ed", "1nn", "ed1nn", "euclidean"):
        return EuclideanNN()
    if variant.replace("-", "") not in VARIANTS:
        raise ValueError(f"unknown classifier variant {spec.variant!r}")
    return DictionaryClassifier(variant, seed=seed, **dict(spec.options))


@dataclass
class ExperimentResult:
    dataset: str
    classifier: str
    resample: int
    seed: int
    train_seconds: Optional[float]
    accuracy: Optional[float]
    balanced_accuracy: Optional[float]
    f1: Optional[float]
    auroc: Optional[float]
    distributions: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    truth: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    error: Optional[str] = field(default=None, compare=False)

    @property
    def key(self):
        return (self.dataset, self.classifier, self.resample)

    @property
    def failed(self) -> bool:
        return self.accuracy is None


def run_cell(train: Dataset, test: Dataset, spec: ClassifierSpec, resample: int,
             base_seed: int = 0) -> ExperimentResult:
    seed = base_seed + resample
    name = train.name or "dataset"
    try:
        tr, te = stratified_resample(train, test, resample, seed)
        clf = make_classifier(spec, seed)
        started = time.perf_counter()
        clf.fit(tr)
        seconds = time.perf_counter() - started
        dist = clf.predict_proba(te.X)
        m = compute_metrics(te.y, dist)
    except Exception as exc:  # a failed cell must not stop the run
        log.error("%s/%s/%d failed: %s", name, spec.name, resample, exc)
        return ExperimentResult(name, spec.name, resample, seed, None, None, None, None,
                                None, error=f"{type(exc).__name__}: {exc}")
    return ExperimentResult(name, spec.name, resample, seed, seconds, m.accuracy,
                            m.balanced_accuracy, m.f1, m.auroc, dist, te.y)


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(datasets, classifiers, n_resamples: int = 1, base_seed: int = 0,
                   n_jobs: int = 1) -> list:
    """Evaluate every classifier on every dataset and resample.

    Parameters
    ----------
    datasets : iterable of (train, test) Dataset pairs
    classifiers : iterable of ClassifierSpec
    n_resamples : resample 0 is the original split
    n_jobs : worker processes; results do not depend on it

    Returns
    -------
    list of ExperimentResult sorted by (dataset, classifier, resample)
    """
    if n_resamples < 1:
        raise ValueError("n_resamples must be at least 1")
    cells = []
    for train, test in datasets:
        train, test = align_classes(train, test)
        for spec in classifiers:
            for r in range(n_resamples):
                cells.append((train, test, spec, r, base_seed))
    if n_jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_run_cell_args, cells))
    else:
        results = [run_cell(*c) for c in cells]
    return sorted(results, key=lambda r: r.key)


def _fmt(value):
    return "" if value is None else repr(float(value))


def write_results(results, fh=None, include_times: bool = False) -> str:
    """Write results as CSV (to ``fh`` if given) and return the text.

    ``train_seconds`` is left blank unless ``include_times``, so that reruns
    are byte-identical.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(results, key=lambda r: r.key):
        writer.writerow([
            r.dataset, r.classifier, r.resample, r.seed,
            _fmt(r.train_seconds) if include_times else "",
            _fmt(r.accuracy), _fmt(r.balanced_accuracy), _fmt(r.f1), _fmt(r.auroc),
        ])
    text = out.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def _parse(value):
    return None if value == "" else float(value)


def read_results(fh_or_text) -> list:
    text = fh_or_text if isinstance(fh_or_text, str) else fh_or_text.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected results header: {header}")
    results = []
    for row in reader:
        if not row:
            continue
        ds, clf, res, seed, secs, acc, bal, f1, auc = row
        results.append(ExperimentResult(ds, clf, int(res), int(seed), _parse(secs),
                                        _parse(acc), _parse(bal), _parse(f1), _parse(auc)))
    return results


def score_matrix(results, metric: str = "accuracy"):
    """Mean score over resamples per (dataset, classifier).

    Returns ``(datasets, classifiers, matrix)``. Raises IncompleteMatrixError
    when a cell has no successful result.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    datasets = sorted({r.dataset for r in results})
    classifiers = sorted({r.classifier for r in results})
    sums = {}
    for r in results:
        value = getattr(r, metric)
        if value is None or np.isnan(value):
            continue
        sums.setdefault((r.dataset, r.classifier), []).append(value)
    missing = [(d, c) for d in datasets for c in classifiers if (d, c) not in sums]
    if missing:
        raise IncompleteMatrixError(missing)
    matrix = np.array([[np.mean(sums[(d, c)]) for c in classifiers] for d in datasets])
    return datasets, classifiers, matrix
