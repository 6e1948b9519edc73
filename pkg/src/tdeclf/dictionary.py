"""One parameterised dictionary classifier: SFA bags + 1-NN.

Bags are exposed as plain ``dict`` objects mapping integer word keys (see
:mod:`tdeclf.sfa`) to counts. Internally each classifier stores its
training bags as a sparse matrix over a fixed vocabulary and evaluates
distances with dense array operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .exceptions import SeriesLengthMismatchError, SeriesTooShortError
from .sfa import (
    SfaParameters,
    WORD_BITS,
    bigram_key,
    fit_breakpoints,
    region_code,
    unigram_key,
    window_words,
)

__all__ = [
    "BOSS_DISTANCE",
    "HISTOGRAM_INTERSECTION",
    "MemberParams",
    "IndividualBoss",
    "boss_distance",
    "histogram_intersection",
    "pyramid_bags",
    "build_individual",
    "predict_1nn",
    "loocv_accuracy",
]

BOSS_DISTANCE = "boss"
HISTOGRAM_INTERSECTION = "intersection"

# elements per dense block when comparing bags
_BLOCK = 1 << 23


class MemberParams(NamedTuple):
    """Full parameter tuple [l, alpha, w, p, h, b] of one ensemble member."""

    word_length: int
    alphabet_size: int
    window_length: int
    normalise: bool
    levels: int
    binning: str

    @property
    def sfa(self) -> SfaParameters:
        return SfaParameters(self.word_length, self.window_length, self.normalise,
                             self.alphabet_size, self.binning)


def boss_distance(test_bag: dict, train_bag: dict) -> float:
    """Squared difference over the words present in ``test_bag`` only."""
    total = 0
    for word, count in test_bag.items():
        if count > 0:
            diff = count - train_bag.get(word, 0)
            total += diff * diff
    return total


def histogram_intersection(a: dict, b: dict) -> int:
    """Similarity ``sum(min(a[u], b[u]))``; larger means closer."""
    if len(b) < len(a):
        a, b = b, a
    return sum(min(count, b.get(word, 0)) for word, count in a.items())


def pyramid_bags(words, m: int, h: int, numerosity_reduction: bool = True) -> dict:
    """Concatenated spatial pyramid bag of one series' window words.

    ``words[s]`` is the word of the window starting at ``s``. Level ``lvl``
    cuts ``[0, m)`` into ``2**(lvl-1)`` equal regions; a window belongs to
    the region holding its start index. Counts at level ``lvl`` are scaled
    by ``2**(lvl-1)``. Repeats are dropped within each region.
    """
    if not 1 <= h <= 3:
        raise ValueError("pyramid height must be 1, 2 or 3")
    words = [int(x) for x in words]
    bag: dict = {}
    for level in range(1, h + 1):
        n_regions = 1 << (level - 1)
        weight = n_regions
        previous = None
        previous_region = None
        for start, word in enumerate(words):
            region = start * n_regions // m
            if numerosity_reduction and word == previous and region == previous_region:
                continue
            key = unigram_key(word, region_code(level, region))
            bag[key] = bag.get(key, 0) + weight
            previous, previous_region = word, region
    return bag


def _count_pairs(rows, keys, weights=None):
    """Aggregate (row, key) occurrences; returns unique rows, keys and summed weights."""
    if len(rows) == 0:
        return rows, keys, np.zeros(0, dtype=np.int64)
    order = np.lexsort((keys, rows))
    rows, keys = rows[order], keys[order]
    w = np.ones(len(rows), dtype=np.int64) if weights is None else weights[order]
    boundary = np.ones(len(rows), dtype=bool)
    boundary[1:] = (rows[1:] != rows[:-1]) | (keys[1:] != keys[:-1])
    starts = np.flatnonzero(boundary)
    return rows[starts], keys[starts], np.add.reduceat(w, starts)


def _bag_entries(W, m, w, levels, use_bigrams):
    """Sparse bag entries for a batch of word matrices.

    Returns ``(rows, unigram keys, counts)`` and ``(rows, bigram keys, counts)``
    where unigram keys are int64 and bigram keys ``prev << 32 | word`` uint64.
    """
    n, n_win = W.shape
    row_ids = np.broadcast_to(np.arange(n)[:, None], W.shape)
    starts = np.arange(n_win)
    rows, keys, weights = [], [], []
    for level in range(1, levels + 1):
        n_regions = 1 << (level - 1)
        region = starts * n_regions // m
        codes = (n_regions - 1 + region).astype(np.int64)
        keep = np.ones(W.shape, dtype=bool)
        keep[:, 1:] = (W[:, 1:] != W[:, :-1]) | (region[1:] != region[:-1])[None, :]
        level_keys = W | (codes << WORD_BITS)[None, :]
        rows.append(row_ids[keep])
        keys.append(level_keys[keep])
        weights.append(np.full(int(keep.sum()), n_regions, dtype=np.int64))
    uni = _count_pairs(np.concatenate(rows), np.concatenate(keys), np.concatenate(weights))

    if use_bigrams and n_win > w:
        prev = W[:, :-w].astype(np.uint64)
        cur = W[:, w:].astype(np.uint64)
        bkeys = (prev << np.uint64(WORD_BITS)) | cur
        bi = _count_pairs(row_ids[:, w:].ravel(), bkeys.ravel())
    else:
        bi = (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.uint64),
              np.zeros(0, dtype=np.int64))
    return uni, bi


def _lookup(vocab, keys):
    if len(vocab) == 0:
        return np.zeros(len(keys), dtype=np.int64), np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(vocab, keys)
    pos = np.minimum(pos, len(vocab) - 1)
    return pos, vocab[pos] == keys


@dataclass(eq=False)
class IndividualBoss:
    """A fitted transform plus its training bags and 1-NN rule."""

    params: MemberParams
    use_bigrams: bool
    distance: str
    breakpoints: np.ndarray
    series_length: int
    unigram_vocab: np.ndarray
    bigram_vocab: np.ndarray
    train_counts: sparse.csr_matrix
    train_labels: np.ndarray
    train_accuracy: float = 0.0
    train_index: np.ndarray = field(default=None)

    @property
    def n_train(self) -> int:
        return len(self.train_labels)

    @property
    def vocabulary(self) -> list:
        """Public bag keys of every matrix column, in column order."""
        return ([int(k) for k in self.unigram_vocab]
                + [bigram_key(int(k) >> WORD_BITS, int(k) & 0xFFFFFFFF)
                   for k in self.bigram_vocab])

    @property
    def train_bags(self) -> list:
        vocab = self.vocabulary
        bags = []
        for i in range(self.n_train):
            row = self.train_counts.getrow(i)
            bags.append({vocab[j]: int(c) for j, c in zip(row.indices, row.data)})
        return bags

    def transform(self, X):
        """Bags of ``X`` over this member's vocabulary.

        Returns ``(counts, oov_square_sum)``: a CSR matrix of in-vocabulary
        counts and, per row, the summed squared counts of unseen words.
        """
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.series_length:
            raise SeriesLengthMismatchError(
                f"expected series of length {self.series_length}, got {X.shape[1]}"
            )
        return _encode(X, self.params, self.breakpoints, self.use_bigrams,
                       self.unigram_vocab, self.bigram_vocab)

    def scores(self, counts, oov_sq=None, exclude_self=False):
        """Distance (BOSS) or negated similarity (intersection) to each training bag.

        Lower is always closer.
        """
        A = counts
        B = self.train_counts
        if self.distance == BOSS_DISTANCE:
            Ad = A.astype(np.float64)
            Bd = B.astype(np.float64)
            sq = np.asarray(Ad.multiply(Ad).sum(axis=1)).ravel()
            if oov_sq is not None:
                sq = sq + oov_sq
            cross = (Ad @ Bd.T).toarray()
            present = Ad.copy()
            present.data[:] = 1.0
            btail = (present @ Bd.multiply(Bd).T).toarray()
            out = sq[:, None] - 2.0 * cross + btail
        else:
            out = -_intersections(A, B).astype(np.float64)
        if exclude_self:
            np.fill_diagonal(out, np.inf)
        return out

    def nearest(self, X) -> np.ndarray:
        counts, oov = self.transform(X)
        return np.argmin(self.scores(counts, oov), axis=1)

    def predict(self, X) -> np.ndarray:
        return self.train_labels[self.nearest(X)]


def _intersections(A, B):
    """Pairwise histogram intersections between CSR rows of A and B."""
    nA, nB = A.shape[0], B.shape[0]
    out = np.zeros((nA, nB), dtype=np.int64)
    if nA == 0 or nB == 0 or A.nnz == 0 or B.nnz == 0:
        return out
    B = B.tocsc()
    step = 64
    for s in range(0, nA, step):
        block = A[s:s + step]
        cols = np.unique(block.indices)
        if len(cols) == 0:
            continue
        a = block[:, cols].toarray()
        b = B[:, cols].toarray()
        sub = max(1, _BLOCK // max(1, nB * len(cols)))
        for t in range(0, a.shape[0], sub):
            part = np.minimum(a[t:t + sub, None, :], b[None, :, :]).sum(-1)
            out[s + t:s + t + len(part)] = part
    return out


def _encode(X, params, breakpoints, use_bigrams, uni_vocab, bi_vocab):
    m = X.shape[1]
    W = window_words(X, params.sfa, breakpoints)
    (ur, uk, uc), (br, bk, bc) = _bag_entries(W, m, params.window_length,
                                              params.levels, use_bigrams)
    upos, uin = _lookup(uni_vocab, uk)
    bpos, bin_ = _lookup(bi_vocab, bk)
    n = X.shape[0]
    rows = np.concatenate([ur[uin], br[bin_]])
    cols = np.concatenate([upos[uin], len(uni_vocab) + bpos[bin_]])
    data = np.concatenate([uc[uin], bc[bin_]])
    V = len(uni_vocab) + len(bi_vocab)
    counts = sparse.csr_matrix((data, (rows, cols)), shape=(n, V), dtype=np.int64)
    oov = np.zeros(n)
    np.add.at(oov, ur[~uin], uc[~uin].astype(np.float64) ** 2)
    np.add.at(oov, br[~bin_], bc[~bin_].astype(np.float64) ** 2)
    return counts, oov


def build_individual(train, params: MemberParams, use_bigrams: bool = False,
                     distance: str = BOSS_DISTANCE, train_index=None) -> IndividualBoss:
    """Fit breakpoints and bags on ``train`` and score the member by LOOCV.

    Parameters
    ----------
    train : Dataset
    params : MemberParams
    use_bigrams : bool
    distance : {"boss", "intersection"}
    train_index : array, optional
        Indices of ``train`` rows within the full training set, kept for reference.
    """
    if distance not in (BOSS_DISTANCE, HISTOGRAM_INTERSECTION):
        raise ValueError(f"unknown distance {distance!r}")
    if not 1 <= params.levels <= 3:
        raise ValueError("pyramid height must be 1, 2 or 3")
    X, y = train.X, train.y
    m = X.shape[1]
    if m < params.window_length:
        raise SeriesTooShortError(f"series length {m} < window {params.window_length}")
    sfa = params.sfa
    breakpoints = fit_breakpoints(X, y, sfa)
    W = window_words(X, sfa, breakpoints)
    (ur, uk, uc), (br, bk, bc) = _bag_entries(W, m, params.window_length,
                                              params.levels, use_bigrams)
    uni_vocab = np.unique(uk)
    bi_vocab = np.unique(bk)
    rows = np.concatenate([ur, br])
    cols = np.concatenate([np.searchsorted(uni_vocab, uk),
                           len(uni_vocab) + np.searchsorted(bi_vocab, bk)])
    counts = sparse.csr_matrix(
        (np.concatenate([uc, bc]), (rows, cols)),
        shape=(X.shape[0], len(uni_vocab) + len(bi_vocab)), dtype=np.int64,
    )
    member = IndividualBoss(
        params=params,
        use_bigrams=use_bigrams,
        distance=distance,
        breakpoints=breakpoints,
        series_length=m,
        unigram_vocab=uni_vocab,
        bigram_vocab=bi_vocab,
        train_counts=counts,
        train_labels=np.asarray(y, dtype=np.int64).copy(),
        train_index=None if train_index is None else np.asarray(train_index),
    )
    member.train_accuracy = loocv_accuracy(member)
    return member


def predict_1nn(cls: IndividualBoss, series) -> int:
    """Label of the closest training bag; ties go to the lowest training index."""
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1:
        raise ValueError("expected a single series")
    return int(cls.predict(series[None, :])[0])


def loocv_accuracy(cls: IndividualBoss) -> float:
    """Leave-one-out 1-NN accuracy over the training bags (0 when n == 1)."""
    n = cls.n_train
    if n < 2:
        return 0.0
    scores = cls.scores(cls.train_counts, exclude_self=True)
    nearest = np.argmin(scores, axis=1)
    return float(np.mean(cls.train_labels[nearest] == cls.train_labels))
