"""Symbolic Fourier approximation of sliding windows.

Each window of length ``w`` is reduced to ``l`` real values (``l/2`` complex
DFT coefficients, interleaved real/imaginary), and every value is mapped to
one of ``alpha`` letters through a per-position breakpoint table. Words are
packed into integers, two bits per letter for ``alpha = 4``.

Word keys used in bags
----------------------
* unigram: ``word | region_code << 32`` where ``region_code`` is 0 for the
  global (un-partitioned) bag;
* bigram: ``BIGRAM_FLAG | previous_word << 32 | word``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import InsufficientWindowError, SeriesTooShortError

__all__ = [
    "MCB",
    "IGB",
    "WORD_BITS",
    "BIGRAM_FLAG",
    "SfaParameters",
    "SfaWord",
    "n_coefficients_required",
    "window_dft",
    "naive_dft",
    "sliding_dft",
    "mcb_fit",
    "igb_fit",
    "fit_breakpoints",
    "discretise",
    "pack_letters",
    "unpack_key",
    "window_words",
    "series_to_bag",
    "unigram_key",
    "bigram_key",
]

MCB = "MCB"
IGB = "IGB"
WORD_BITS = 32
BIGRAM_FLAG = 1 << 64

# windows with smaller standard deviation are treated as constant
_STD_EPS = 1e-8


@dataclass(frozen=True)
class SfaParameters:
    word_length: int
    window_length: int
    normalise: bool
    alphabet_size: int = 4
    binning: str = MCB

    def __post_init__(self):
        if self.word_length < 2 or self.word_length % 2:
            raise ValueError("word_length must be a positive even integer")
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be at least 2")
        if self.binning not in (MCB, IGB):
            raise ValueError(f"unknown binning {self.binning!r}")
        if self.word_length * letter_bits(self.alphabet_size) > WORD_BITS:
            raise ValueError("word does not fit in 32 bits")
        if self.window_length < n_coefficients_required(self.word_length, self.normalise):
            raise InsufficientWindowError(
                f"window {self.window_length} too short for word length "
                f"{self.word_length} (normalise={self.normalise})"
            )


class SfaWord(NamedTuple):
    """Decoded form of a bag key."""

    letters: tuple
    previous: Optional[tuple] = None  # set for bigrams
    region: Optional[tuple] = None  # (level, index), 1-based level


def letter_bits(alphabet_size: int) -> int:
    return max(1, (alphabet_size - 1).bit_length())


def n_coefficients_required(word_length: int, normalise: bool) -> int:
    """Number of DFT bins touched: bins 0..l/2-1, or 1..l/2 when normalising."""
    return word_length // 2 + int(normalise)


def _bins(word_length, normalise):
    start = 1 if normalise else 0
    return np.arange(start, start + word_length // 2)


def naive_dft(window) -> np.ndarray:
    """Full complex DFT by the O(w^2) definition. Reference only."""
    x = np.asarray(window, dtype=np.float64)
    w = len(x)
    j = np.arange(w)
    return np.array([np.sum(x * np.exp(-2j * np.pi * k * j / w)) for k in range(w)])


def _znorm_scale(windows):
    std = windows.std(axis=-1)
    constant = std <= _STD_EPS
    return np.where(constant, 0.0, 1.0 / np.where(constant, 1.0, std))


def window_dft(window, word_length: int, normalise: bool) -> np.ndarray:
    """Truncated DFT of one window, interleaved as (re, im, re, im, ...).

    With ``normalise`` the window is z-normalised and the DC term dropped,
    so bins ``1..l/2`` are kept; otherwise bins ``0..l/2-1``.
    """
    x = np.asarray(window, dtype=np.float64)
    return sliding_dft(x[None, :], len(x), word_length, normalise)[0, 0]


def sliding_dft(X, window_length: int, word_length: int, normalise: bool,
                method: str = "direct") -> np.ndarray:
    """Truncated DFT of every sliding window of every series.

    Parameters
    ----------
    X : array of shape (n, m)
    method : {"direct", "mft"}
        ``direct`` evaluates the needed bins per window as a matrix product.
        ``mft`` updates them incrementally as the window slides.

    Returns
    -------
    ndarray of shape (n, m - w + 1, word_length)
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, m = X.shape
    w = window_length
    if w > m:
        raise SeriesTooShortError(f"series length {m} < window {w}")
    if w < n_coefficients_required(word_length, normalise):
        raise InsufficientWindowError(
            f"window {w} cannot supply {word_length // 2} coefficients"
        )
    bins = _bins(word_length, normalise)
    windows = sliding_window_view(X, w, axis=1)
    if method == "direct":
        angle = 2.0 * np.pi * np.outer(np.arange(w), bins) / w
        re = windows @ np.cos(angle)
        im = windows @ -np.sin(angle)
    elif method == "mft":
        re, im = _mft(X, w, bins)
    else:
        raise ValueError(f"unknown method {method!r}")

    out = np.empty(re.shape[:-1] + (word_length,))
    out[..., 0::2] = re
    out[..., 1::2] = im
    if normalise:
        out *= _znorm_scale(windows)[..., None]
    return out


def _mft(X, w, bins):
    n, m = X.shape
    n_win = m - w + 1
    j = np.arange(w)
    angle = 2.0 * np.pi * np.outer(j, bins) / w
    first = X[:, :w] @ np.exp(-1j * angle)
    rot = np.exp(2j * np.pi * bins / w)
    coeffs = np.empty((n, n_win, len(bins)), dtype=np.complex128)
    coeffs[:, 0] = first
    for t in range(1, n_win):
        delta = (X[:, t + w - 1] - X[:, t - 1])[:, None]
        coeffs[:, t] = (coeffs[:, t - 1] + delta) * rot
    return coeffs.real, coeffs.imag


def mcb_fit(coefficients, alphabet_size: int = 4) -> np.ndarray:
    """Equal-frequency breakpoints per coefficient position.

    Breakpoint ``j`` of a column with sorted values ``v`` is the midpoint of
    ``v[i - 1]`` and ``v[i]`` with ``i = (N * j) // alphabet_size``, so bins
    hold ``N / alphabet_size`` values give or take one.

    Returns
    -------
    ndarray of shape (l, alphabet_size - 1)
    """
    C = np.asarray(coefficients, dtype=np.float64)
    N = C.shape[0]
    if N < alphabet_size:
        raise ValueError("need at least alphabet_size windows")
    ordered = np.sort(C, axis=0)
    idx = (N * np.arange(1, alphabet_size)) // alphabet_size
    idx = np.clip(idx, 1, N - 1)
    return ((ordered[idx - 1] + ordered[idx]) / 2.0).T.copy()


def _entropy(counts):
    total = counts.sum(axis=-1, keepdims=True)
    p = counts / np.where(total > 0, total, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1)), 0.0)
    return -(p * logs).sum(axis=-1)


def _best_split(values, cum, lo, hi):
    """Highest-gain cut inside sorted segment [lo, hi); gain is scaled by segment size."""
    if hi - lo < 2:
        return 0.0, None
    cuts = np.arange(lo + 1, hi)
    cuts = cuts[values[cuts - 1] < values[cuts]]
    if len(cuts) == 0:
        return 0.0, None
    seg = cum[hi] - cum[lo]
    left = cum[cuts] - cum[lo]
    right = cum[hi] - cum[cuts]
    n_left = (cuts - lo)[:, None]
    n_right = (hi - cuts)[:, None]
    parent = (hi - lo) * _entropy(seg)
    children = n_left[:, 0] * _entropy(left) + n_right[:, 0] * _entropy(right)
    gains = parent - children
    best = int(np.argmax(gains))
    return float(gains[best]), int(cuts[best])


def _igb_column(values, labels, n_classes, alphabet_size):
    order = np.argsort(values, kind="stable")
    v = values[order]
    onehot = np.zeros((len(v) + 1, n_classes))
    onehot[np.arange(1, len(v) + 1), labels[order]] = 1.0
    cum = np.cumsum(onehot, axis=0)

    segments = [(0, len(v))]
    cuts = []
    while len(cuts) < alphabet_size - 1:
        best_gain, best_seg, best_cut = 0.0, None, None
        for s, (lo, hi) in enumerate(segments):
            gain, cut = _best_split(v, cum, lo, hi)
            if cut is not None and gain > best_gain + 1e-12:
                best_gain, best_seg, best_cut = gain, s, cut
        if best_cut is None:
            # no informative cut left: halve the largest segment
            best_seg = max(range(len(segments)),
                           key=lambda s: (segments[s][1] - segments[s][0], -segments[s][0]))
            lo, hi = segments[best_seg]
            best_cut = lo + (hi - lo) // 2
        lo, hi = segments.pop(best_seg)
        segments[best_seg:best_seg] = [(lo, best_cut), (best_cut, hi)]
        cuts.append(best_cut)
    cuts = np.sort(np.array(cuts))
    return (v[cuts - 1] + v[cuts]) / 2.0


def igb_fit(coefficients, labels, alphabet_size: int = 4) -> np.ndarray:
    """Supervised breakpoints by greedy best-first information-gain splitting.

    Every position starts as one bin; the cut (midpoint between adjacent
    distinct sorted values) giving the largest drop in size-weighted class
    entropy is applied, repeatedly, until ``alphabet_size`` bins exist. When
    no cut has positive gain the largest bin is split at its median instead.
    """
    C = np.asarray(coefficients, dtype=np.float64)
    labels = np.asarray(labels)
    if C.shape[0] < alphabet_size:
        raise ValueError("need at least alphabet_size windows")
    _, labels = np.unique(labels, return_inverse=True)
    n_classes = int(labels.max()) + 1
    return np.vstack([
        _igb_column(C[:, i], labels, n_classes, alphabet_size)
        for i in range(C.shape[1])
    ])


def fit_breakpoints(X, y, params: SfaParameters, method: str = "direct") -> np.ndarray:
    """Fit MCB or IGB breakpoints on all windows of the training series."""
    coeffs = sliding_dft(X, params.window_length, params.word_length,
                         params.normalise, method)
    n_win = coeffs.shape[1]
    flat = coeffs.reshape(-1, params.word_length)
    if params.binning == MCB:
        return mcb_fit(flat, params.alphabet_size)
    return igb_fit(flat, np.repeat(np.asarray(y), n_win), params.alphabet_size)


def discretise(coeffs, breakpoints) -> np.ndarray:
    """Letters for one or many coefficient vectors.

    Letter ``i`` is the number of breakpoints in row ``i`` strictly below
    ``coeffs[..., i]``; a value equal to a breakpoint takes the lower bin.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    B = np.asarray(breakpoints)
    if coeffs.shape[-1] != B.shape[0]:
        raise ValueError("coefficient count does not match breakpoint rows")
    # count of thresholds < value
    return (B < coeffs[..., None]).sum(axis=-1).astype(np.int64)


def pack_letters(letters, alphabet_size: int = 4) -> np.ndarray:
    """Pack letters along the last axis into integers, first letter most significant."""
    letters = np.asarray(letters, dtype=np.int64)
    bits = letter_bits(alphabet_size)
    l = letters.shape[-1]
    shifts = bits * np.arange(l - 1, -1, -1, dtype=np.int64)
    return (letters << shifts).sum(axis=-1)


def _unpack_word(word, l, bits):
    mask = (1 << bits) - 1
    return tuple((word >> (bits * (l - 1 - i))) & mask for i in range(l))


def unigram_key(word: int, region_code: int = 0) -> int:
    return int(word) | (int(region_code) << WORD_BITS)


def bigram_key(previous: int, word: int) -> int:
    return BIGRAM_FLAG | (int(previous) << WORD_BITS) | int(word)


def region_code(level: int, index: int) -> int:
    """Heap-style number of region ``index`` at 1-based pyramid ``level``."""
    return (1 << (level - 1)) - 1 + index


def unpack_key(key: int, word_length: int, alphabet_size: int = 4) -> SfaWord:
    bits = letter_bits(alphabet_size)
    word_mask = (1 << WORD_BITS) - 1
    if key & BIGRAM_FLAG:
        prev = (key >> WORD_BITS) & word_mask
        return SfaWord(_unpack_word(key & word_mask, word_length, bits),
                       _unpack_word(prev, word_length, bits))
    code = key >> WORD_BITS
    level = (code + 1).bit_length()
    index = code - ((1 << (level - 1)) - 1)
    return SfaWord(_unpack_word(key & word_mask, word_length, bits),
                   region=(level, index))


def window_words(X, params: SfaParameters, breakpoints, method: str = "direct") -> np.ndarray:
    """Packed word of every window, shape (n, m - w + 1); column = window start."""
    coeffs = sliding_dft(X, params.window_length, params.word_length,
                         params.normalise, method)
    return pack_letters(discretise(coeffs, breakpoints), params.alphabet_size)


def series_to_bag(series, params: SfaParameters, breakpoints, use_bigrams: bool = False,
                  numerosity_reduction: bool = True) -> dict:
    """Sparse word histogram of one series.

    Consecutive repeats of a unigram count once. Bigrams pair the word at
    window ``j`` with the word at ``j - w`` and are never reduced.
    """
    series = np.asarray(series, dtype=np.float64)
    w = params.window_length
    if len(series) < w:
        raise SeriesTooShortError(f"series length {len(series)} < window {w}")
    words = window_words(series[None, :], params, breakpoints)[0]
    bag: dict = {}
    previous = None
    for word in words.tolist():
        if not numerosity_reduction or word != previous:
            bag[word] = bag.get(word, 0) + 1
        previous = word
    if use_bigrams:
        for prev, word in zip(words[:-w].tolist(), words[w:].tolist()):
            key = bigram_key(prev, word)
            bag[key] = bag.get(key, 0) + 1
    return bag
