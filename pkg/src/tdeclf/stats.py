"""Comparing classifiers over many datasets.

Pairwise Wilcoxon signed-rank tests, Holm's step-down correction, average
ranks and cliques of classifiers with no detected pairwise difference.
"""

from __future__ import annotations

import itertools
import logging
from typing import NamedTuple

import networkx as nx
import numpy as np
from scipy import stats

from .exceptions import IncompleteMatrixError

__all__ = [
    "wilcoxon_signed_rank",
    "holm_adjust",
    "rank_rows",
    "mean_ranks_and_cliques",
    "RankReport",
    "format_report",
    "parse_report",
]

log = logging.getLogger(__name__)

EXACT_MAX_N = 20
MIN_PAIRS = 5
ZERO_TOLERANCE = 1e-12


def _exact_upper_tail(doubled_ranks, statistic):
    """P(T >= t) and P(T <= t) for T = sum of randomly signed (doubled) ranks."""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled_ranks.astype(np.int64):
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r] if r else counts
        counts = counts + shifted
    counts /= 2.0 ** len(doubled_ranks)
    upper = counts[statistic:].sum()
    lower = counts[:statistic + 1].sum()
    return upper, lower


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided p-value of the Wilcoxon signed-rank test on paired scores.

    Zero differences are dropped and tied absolute differences get average
    ranks. The exact null distribution is used for up to 20 non-zero pairs,
    a tie-corrected normal approximation above that.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-d and of equal length")
    if len(a) < MIN_PAIRS:
        raise ValueError(f"need at least {MIN_PAIRS} paired scores")
    d = a - b
    d = d[np.abs(d) > ZERO_TOLERANCE]
    n = len(d)
    if n == 0:
        return 1.0
    ranks = stats.rankdata(np.abs(d))
    t_plus = ranks[d > 0].sum()
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        upper, lower = _exact_upper_tail(doubled, int(round(2 * t_plus)))
        return float(min(1.0, 2.0 * min(upper, lower)))
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts ** 3 - tie_counts) / 48.0
    if var <= 0:
        return 1.0
    z = (t_plus - mean) / np.sqrt(var)
    return float(min(1.0, 2.0 * stats.norm.sf(abs(z))))


def holm_adjust(pvalues) -> np.ndarray:
    """Holm step-down adjusted p-values, in the input order."""
    p = np.asarray(pvalues, dtype=np.float64)
    k = len(p)
    if k == 0:
        return p.copy()
    order = np.argsort(p, kind="stable")
    scaled = (k - np.arange(k)) * p[order]
    adjusted_sorted = np.minimum(1.0, np.maximum.accumulate(scaled))
    out = np.empty(k)
    out[order] = adjusted_sorted
    return out


def rank_rows(scores) -> np.ndarray:
    """Per-row ranks, 1 = highest score, ties share the average rank."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.vstack([stats.rankdata(-row, method="average") for row in scores])


class RankReport(NamedTuple):
    names: list
    mean_ranks: dict
    pvalues: dict  # (name_a, name_b) -> raw p
    adjusted: dict  # (name_a, name_b) -> Holm-adjusted p
    cliques: list  # lists of names, best rank first
    alpha: float


def mean_ranks_and_cliques(scores, names, alpha: float = 0.05, datasets=None) -> RankReport:
    """Average ranks plus cliques from Holm-corrected pairwise Wilcoxon tests.

    Parameters
    ----------
    scores : array (n_datasets, n_classifiers), higher is better
    names : classifier names, one per column
    alpha : family-wise significance level
    datasets : optional row names, used to report missing cells
    """
    scores = np.asarray(scores, dtype=np.float64)
    names = list(names)
    if scores.ndim != 2 or scores.shape[1] != len(names):
        raise ValueError("score matrix must have one column per classifier")
    if np.isnan(scores).any():
        rows = datasets or [str(i) for i in range(scores.shape[0])]
        missing = [(rows[i], names[j]) for i, j in zip(*np.nonzero(np.isnan(scores)))]
        raise IncompleteMatrixError(missing)

    ranks = rank_rows(scores).mean(axis=0)
    mean_ranks = {n: float(r) for n, r in zip(names, ranks)}

    pairs = list(itertools.combinations(range(len(names)), 2))
    raw = []
    for i, j in pairs:
        if scores.shape[0] < MIN_PAIRS:
            raw.append(1.0)
        else:
            raw.append(wilcoxon_signed_rank(scores[:, i], scores[:, j]))
    if scores.shape[0] < MIN_PAIRS and pairs:
        log.warning("fewer than %d datasets: no pairwise test can be significant", MIN_PAIRS)
    adjusted = holm_adjust(raw)

    graph = nx.Graph()
    graph.add_nodes_from(range(len(names)))
    for (i, j), p in zip(pairs, adjusted):
        if p >= alpha:
            graph.add_edge(i, j)
    cliques = []
    for clique in nx.find_cliques(graph):
        members = sorted(clique, key=lambda c: (ranks[c], names[c]))
        cliques.append([names[c] for c in members])
    cliques.sort(key=lambda c: (mean_ranks[c[0]], c))

    key = lambda i, j: (names[i], names[j])
    return RankReport(
        names=names,
        mean_ranks=mean_ranks,
        pvalues={key(i, j): float(p) for (i, j), p in zip(pairs, raw)},
        adjusted={key(i, j): float(p) for (i, j), p in zip(pairs, adjusted)},
        cliques=cliques,
        alpha=alpha,
    )


def format_report(report: RankReport, metric: str = "accuracy") -> str:
    """Tab-separated text: ``mean_rank`` lines, then one ``clique`` line per clique."""
    lines = [f"# metric={metric} alpha={report.alpha}"]
    for name in sorted(report.names, key=lambda n: (report.mean_ranks[n], n)):
        lines.append(f"mean_rank\t{name}\t{report.mean_ranks[name]:.6f}")
    for (a, b), p in sorted(report.adjusted.items()):
        lines.append(f"pair\t{a}\t{b}\t{report.pvalues[(a, b)]:.6g}\t{p:.6g}")
    for clique in report.cliques:
        lines.append("clique\t" + ",".join(clique))
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> tuple[dict, list]:
    """Inverse of :func:`format_report` for the rank and clique lines."""
    ranks, cliques = {}, []
    for line in text.splitlines():
        fields = line.split("\t")
        if fields[0] == "mean_rank":
            ranks[fields[1]] = float(fields[2])
        elif fields[0] == "clique":
            cliques.append(fields[1].split(","))
    return ranks, cliques
