"""Classification metrics computed from predicted class distributions."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

__all__ = ["Metrics", "compute_metrics", "roc_auc_binary"]

log = logging.getLogger(__name__)


class Metrics(NamedTuple):
    accuracy: float
    balanced_accuracy: float
    f1: float
    auroc: float


def roc_auc_binary(positive, scores) -> float:
    """Area under the ROC curve by the trapezoid rule; tied scores share one step."""
    positive = np.asarray(positive, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = positive.sum()
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(-scores, kind="stable")
    s, p = scores[order], positive[order]
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(p)[last_of_group]
    fp = np.cumsum(~p)[last_of_group]
    tpr = np.r_[0.0, tp / n_pos]
    fpr = np.r_[0.0, fp / n_neg]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def compute_metrics(truth, distributions) -> Metrics:
    """Accuracy, balanced accuracy, macro F1 and one-vs-rest macro AUROC.

    Predictions are the argmax of each distribution row (lowest class id on
    ties). Per-class terms are averaged over the classes present in
    ``truth``; other columns of ``distributions`` are skipped with a warning.
    """
    truth = np.asarray(truth, dtype=np.int64)
    dist = np.atleast_2d(np.asarray(distributions, dtype=np.float64))
    if len(truth) != dist.shape[0]:
        raise ValueError("truth and distributions differ in length")
    pred = np.argmax(dist, axis=1)

    present = np.unique(truth)
    absent = sorted(set(range(dist.shape[1])) - set(present.tolist()))
    if absent:
        log.warning("classes %s absent from truth; skipped in per-class metrics", absent)

    recalls, f1s, aucs = [], [], []
    for c in present:
        actual = truth == c
        predicted = pred == c
        tp = np.sum(actual & predicted)
        recall = tp / actual.sum()
        precision = tp / predicted.sum() if predicted.any() else 0.0
        recalls.append(recall)
        f1s.append(0.0 if tp == 0 else 2 * precision * recall / (precision + recall))
        if c < dist.shape[1]:
            auc = roc_auc_binary(actual, dist[:, c])
            if not np.isnan(auc):
                aucs.append(auc)
    return Metrics(
        accuracy=float(np.mean(pred == truth)),
        balanced_accuracy=float(np.mean(recalls)),
        f1=float(np.mean(f1s)),
        auroc=float(np.mean(aucs)) if aucs else float("nan"),
    )
