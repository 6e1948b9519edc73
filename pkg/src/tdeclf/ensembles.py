"""BOSS, cBOSS, S-BOSS, cS-BOSS and TDE ensembles.

The three contractable variants share one build loop: draw a parameter
tuple from the remaining space (uniformly, or by GP posterior mean for TDE
after a warm-up), fit a member on a 70% subsample, and keep the ``s`` most
accurate members seen so far. Members vote with weight ``accuracy ** 4``.

BOSS and S-BOSS evaluate a grid on the full training set instead and keep
every member within 92% of the best train accuracy, with uniform weights.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .dataset_io import Dataset, subsample_indices
from .dictionary import (
    BOSS_DISTANCE,
    HISTOGRAM_INTERSECTION,
    MemberParams,
    build_individual,
)
from .exceptions import NoLegalParametersError
from .gp import WARMUP, WORD_LENGTH_RANGE, choose_index, encode_many
from .sfa import IGB, MCB, n_coefficients_required

__all__ = [
    "VARIANTS",
    "EnsembleConfig",
    "Ensemble",
    "CandidateRecord",
    "parameter_space",
    "window_grid",
    "build_tde",
    "build_cboss",
    "build_csboss",
    "build_boss_ensemble",
    "build_sboss",
    "build_ensemble",
    "DictionaryClassifier",
]

log = logging.getLogger(__name__)

VARIANTS = ("boss", "cboss", "sboss", "csboss", "tde")
WORD_LENGTHS = (16, 14, 12, 10, 8)
ALPHABET_SIZE = 4
MIN_WINDOW = 10
RETAIN_FRACTION = 0.92

_DEFAULTS = {
    # variant: (levels, binnings, distance, bigrams, gp)
    "boss": ((1,), (MCB,), BOSS_DISTANCE, False, False),
    "cboss": ((1,), (MCB,), BOSS_DISTANCE, False, False),
    "sboss": ((1, 2, 3), (MCB,), HISTOGRAM_INTERSECTION, False, False),
    "csboss": ((1, 2, 3), (MCB,), HISTOGRAM_INTERSECTION, False, False),
    "tde": ((1, 2, 3), (MCB, IGB), HISTOGRAM_INTERSECTION, True, True),
}


@dataclass
class EnsembleConfig:
    """Build settings. ``None`` fields take the variant's default.

    When ``time_contract`` (seconds) is set it replaces ``k`` as the loop
    bound of the contractable variants.
    """

    variant: str = "tde"
    k: int = 250
    s: int = 50
    time_contract: Optional[float] = None
    seed: int = 0
    subsample: float = 0.7
    word_lengths: tuple = WORD_LENGTHS
    levels: Optional[tuple] = None
    binnings: Optional[tuple] = None
    distance: Optional[str] = None
    use_bigrams: Optional[bool] = None
    use_gp: Optional[bool] = None
    warmup: int = WARMUP
    gp_options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.variant = self.variant.lower().replace("-", "")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.s < 1 or (self.time_contract is None and self.s > self.k):
            raise ValueError("require 1 <= s <= k")
        levels, binnings, distance, bigrams, gp = _DEFAULTS[self.variant]
        if self.levels is None:
            self.levels = levels
        if self.binnings is None:
            self.binnings = binnings
        if self.distance is None:
            self.distance = distance
        if self.use_bigrams is None:
            self.use_bigrams = bigrams
        if self.use_gp is None:
            self.use_gp = gp
        if self.use_gp and not all(WORD_LENGTH_RANGE[0] <= l <= WORD_LENGTH_RANGE[1]
                                   for l in self.word_lengths):
            raise ValueError(f"GP search needs word lengths in {list(WORD_LENGTH_RANGE)}")
        self.levels = tuple(self.levels)
        self.binnings = tuple(self.binnings)
        self.word_lengths = tuple(self.word_lengths)


class CandidateRecord(NamedTuple):
    iteration: int
    params: MemberParams
    accuracy: float
    seconds: float = 0.0  # wall time to choose and build this candidate


@dataclass(eq=False)
class Ensemble:
    members: list
    weights: np.ndarray
    classes: tuple
    config: EnsembleConfig
    candidates: list = field(default_factory=list)
    build_seconds: float = 0.0

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def series_length(self) -> int:
        return self.members[0].series_length

    @property
    def train_accuracy_estimate(self) -> float:
        """Weight-averaged LOOCV accuracy of the members."""
        acc = np.array([m.train_accuracy for m in self.members])
        w = self._vote_weights()
        return float(np.dot(acc, w) / w.sum())

    def _vote_weights(self):
        w = np.asarray(self.weights, dtype=np.float64)
        # every member scored 0: fall back to plain majority voting
        return w if w.sum() > 0 else np.ones_like(w)

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if not self.members:
            raise ValueError("empty ensemble")
        votes = np.zeros((X.shape[0], self.n_classes))
        rows = np.arange(X.shape[0])
        for member, weight in zip(self.members, self._vote_weights()):
            np.add.at(votes, (rows, member.predict(X)), weight)
        return votes / votes.sum(axis=1, keepdims=True)

    def predict_ids(self, X) -> np.ndarray:
        # argmax returns the lowest class id among ties
        return np.argmax(self.predict_proba(X), axis=1)

    def predict(self, series):
        """Class id and class distribution for one series."""
        dist = self.predict_proba(np.asarray(series, dtype=np.float64)[None, :])[0]
        return int(np.argmax(dist)), dist


def window_grid(m: int, min_window: int = MIN_WINDOW) -> list:
    """``m // 4`` evenly spaced window lengths from ``min_window`` to ``m``."""
    if m <= min_window:
        return [m]
    count = max(2, m // 4)
    return sorted({int(round(v)) for v in np.linspace(min_window, m, count)})


def _legal(l, w, p):
    return w >= n_coefficients_required(l, p)


def parameter_space(m: int, word_lengths=WORD_LENGTHS, levels=(1,), binnings=(MCB,),
                    windows=None) -> list:
    """All legal [l, alpha, w, p, h, b] tuples in a fixed order (h and b vary fastest)."""
    if windows is None:
        windows = [m] if m <= MIN_WINDOW else range(MIN_WINDOW, m + 1)
    space = [
        MemberParams(l, ALPHABET_SIZE, w, p, h, b)
        for l in word_lengths
        for w in windows
        for p in (True, False)
        for h in levels
        for b in binnings
        if _legal(l, w, p)
    ]
    if not space:
        raise NoLegalParametersError(f"no legal parameters for series length {m}")
    return space


def _worst_slot(accuracies, arrivals):
    # lowest accuracy; among equals evict the latest arrival
    return min(range(len(accuracies)), key=lambda j: (accuracies[j], -arrivals[j]))


def _build_contracted(train: Dataset, config: EnsembleConfig) -> Ensemble:
    started = time.perf_counter()
    m = train.series_length
    remaining = parameter_space(m, config.word_lengths, config.levels, config.binnings)
    encoded = encode_many(remaining, m) if config.use_gp else None
    rng = np.random.default_rng(config.seed)

    members, accuracies, arrivals = [], [], []
    history_X, history_y, candidates = [], [], []
    i = 0
    while remaining:
        if config.time_contract is not None:
            # always build one member so the ensemble can predict
            if i > 0 and time.perf_counter() - started >= config.time_contract:
                break
        elif i >= config.k:
            break

        step_started = time.perf_counter()
        if config.use_gp:
            idx = choose_index(encoded, np.array(history_X), np.array(history_y), i, rng,
                               config.warmup, **config.gp_options)
            encoded = np.delete(encoded, idx, axis=0)
        else:
            idx = int(rng.integers(len(remaining)))
        params = remaining.pop(idx)

        sub = subsample_indices(train.n_cases, config.subsample,
                                np.random.default_rng([config.seed, i]))
        member = build_individual(train.take(sub), params, config.use_bigrams,
                                  config.distance, train_index=sub)
        acc = member.train_accuracy

        if len(members) < config.s:
            members.append(member)
            accuracies.append(acc)
            arrivals.append(i)
        else:
            slot = _worst_slot(accuracies, arrivals)
            if acc > accuracies[slot]:
                members[slot], accuracies[slot], arrivals[slot] = member, acc, i

        candidates.append(CandidateRecord(i, params, acc, time.perf_counter() - step_started))
        if config.use_gp:
            history_X.append(encode_many([params], m)[0])
            history_y.append(acc)
        i += 1

    log.debug("%s built %d candidates, kept %d", config.variant, i, len(members))
    weights = np.array(accuracies, dtype=np.float64) ** 4
    return Ensemble(members, weights, train.classes, config, candidates,
                    time.perf_counter() - started)


def build_tde(train: Dataset, config: Optional[EnsembleConfig] = None) -> Ensemble:
    config = config or EnsembleConfig("tde")
    if config.variant != "tde":
        raise ValueError("config.variant must be 'tde'")
    return _build_contracted(train, config)


def build_cboss(train: Dataset, config: Optional[EnsembleConfig] = None) -> Ensemble:
    config = config or EnsembleConfig("cboss")
    if config.variant != "cboss":
        raise ValueError("config.variant must be 'cboss'")
    return _build_contracted(train, config)


def build_csboss(train: Dataset, config: Optional[EnsembleConfig] = None) -> Ensemble:
    config = config or EnsembleConfig("csboss")
    if config.variant != "csboss":
        raise ValueError("config.variant must be 'csboss'")
    return _build_contracted(train, config)


def _keep_within_best(members, fraction=RETAIN_FRACTION):
    best = max(m.train_accuracy for m in members)
    return [m for m in members if m.train_accuracy >= fraction * best]


def build_boss_ensemble(train: Dataset, config: Optional[EnsembleConfig] = None) -> Ensemble:
    """Full grid over window, word length and normalisation; keep within 92% of best."""
    config = config or EnsembleConfig("boss")
    started = time.perf_counter()
    m = train.series_length
    candidates, members = [], []
    for w in window_grid(m):
        for l in config.word_lengths:
            for p in (True, False):
                if not _legal(l, w, p):
                    continue
                params = MemberParams(l, ALPHABET_SIZE, w, p, 1, MCB)
                step_started = time.perf_counter()
                member = build_individual(train, params, False, config.distance)
                candidates.append(CandidateRecord(len(candidates), params,
                                                  member.train_accuracy,
                                                  time.perf_counter() - step_started))
                members.append(member)
    if not members:
        raise NoLegalParametersError(f"no legal parameters for series length {m}")
    kept = _keep_within_best(members)
    return Ensemble(kept, np.ones(len(kept)), train.classes, config, candidates,
                    time.perf_counter() - started)


def build_sboss(train: Dataset, config: Optional[EnsembleConfig] = None) -> Ensemble:
    """Per word length: best flat member by grid, then the best pyramid height."""
    config = config or EnsembleConfig("sboss")
    started = time.perf_counter()
    m = train.series_length
    max_height = max(config.levels)
    candidates, winners = [], []

    def evaluate(params):
        step_started = time.perf_counter()
        member = build_individual(train, params, False, config.distance)
        candidates.append(CandidateRecord(len(candidates), params, member.train_accuracy,
                                          time.perf_counter() - step_started))
        return member

    for l in config.word_lengths:
        best = None
        for w in window_grid(m):
            for p in (True, False):
                if not _legal(l, w, p):
                    continue
                member = evaluate(MemberParams(l, ALPHABET_SIZE, w, p, 1, MCB))
                if best is None or member.train_accuracy > best.train_accuracy:
                    best = member
        if best is None:
            continue
        base = best.params
        for h in range(2, max_height + 1):
            member = evaluate(base._replace(levels=h))
            if member.train_accuracy > best.train_accuracy:
                best = member
        winners.append(best)
    if not winners:
        raise NoLegalParametersError(f"no legal parameters for series length {m}")
    kept = _keep_within_best(winners)
    return Ensemble(kept, np.ones(len(kept)), train.classes, config, candidates,
                    time.perf_counter() - started)


_BUILDERS = {
    "boss": build_boss_ensemble,
    "cboss": build_cboss,
    "sboss": build_sboss,
    "csboss": build_csboss,
    "tde": build_tde,
}


def build_ensemble(train: Dataset, config: EnsembleConfig) -> Ensemble:
    return _BUILDERS[config.variant](train, config)


class DictionaryClassifier:
    """Estimator-style wrapper: ``fit(dataset)`` then ``predict_proba(X)``."""

    def __init__(self, variant="tde", **options):
        self.config = EnsembleConfig(variant, **options)
        self.ensemble_ = None

    def with_seed(self, seed):
        clone = DictionaryClassifier.__new__(DictionaryClassifier)
        clone.config = replace(self.config, seed=seed)
        clone.ensemble_ = None
        return clone

    def fit(self, train: Dataset):
        self.ensemble_ = build_ensemble(train, self.config)
        return self

    def predict_proba(self, X):
        return self.ensemble_.predict_proba(X)

    def predict(self, X):
        return self.ensemble_.predict_ids(X)
