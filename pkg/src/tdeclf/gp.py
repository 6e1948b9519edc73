"""Gaussian process regression over encoded member parameters.

Used to pick the next ensemble member once enough (parameters, accuracy)
pairs have been observed: every remaining candidate is scored by the
posterior mean and the best one is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import linalg, optimize

from .dictionary import MemberParams
from .exceptions import EncodingError, SingularKernelError
from .sfa import IGB, MCB

__all__ = [
    "ParamRecord",
    "GpModel",
    "squared_exponential",
    "encode_params",
    "encode_many",
    "gp_fit",
    "gp_predict",
    "gp_predict_many",
    "choose_parameters",
    "choose_index",
    "best_predicted_index",
]

LENGTH_SCALE = 0.5
SIGNAL_VARIANCE = 1.0
NOISE_VARIANCE = 0.05
WARMUP = 50
JITTER = 1e-10
TIE_TOLERANCE = 1e-12

WORD_LENGTH_RANGE = (8, 16)
LEVEL_RANGE = (1, 3)
MIN_WINDOW = 10


class ParamRecord(NamedTuple):
    params: MemberParams
    accuracy: float


def _scale(value, lo, hi, name):
    if not lo <= value <= hi:
        raise EncodingError(f"{name}={value} outside [{lo}, {hi}]")
    return 0.0 if hi == lo else (value - lo) / (hi - lo)


def encode_params(params: MemberParams, series_length: int) -> np.ndarray:
    """Map [l, alpha, w, p, h, b] to the unit cube.

    ``l`` is scaled over [8, 16], ``w`` over [10, m] and ``h`` over [1, 3];
    ``p`` and ``b`` (IGB = 1) are already 0/1. The alphabet size is fixed
    at 4 and always encodes to 0.
    """
    if params.alphabet_size != 4:
        raise EncodingError("alphabet size must be 4")
    if params.binning not in (MCB, IGB):
        raise EncodingError(f"unknown binning {params.binning!r}")
    w_lo = min(MIN_WINDOW, series_length)
    return np.array([
        _scale(params.word_length, *WORD_LENGTH_RANGE, "word_length"),
        0.0,
        _scale(params.window_length, w_lo, series_length, "window_length"),
        float(bool(params.normalise)),
        _scale(params.levels, *LEVEL_RANGE, "levels"),
        1.0 if params.binning == IGB else 0.0,
    ])


def encode_many(params: Sequence[MemberParams], series_length: int) -> np.ndarray:
    if len(params) == 0:
        return np.zeros((0, 6))
    return np.vstack([encode_params(p, series_length) for p in params])


def squared_exponential(A, B, length_scale=LENGTH_SCALE, signal_variance=SIGNAL_VARIANCE):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    d2 = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=-1)
    return signal_variance * np.exp(-d2 / (2.0 * length_scale ** 2))


@dataclass(frozen=True)
class GpModel:
    X: np.ndarray
    y: np.ndarray
    gamma: float
    length_scale: float
    signal_variance: float
    noise_variance: float
    factor: tuple
    weights: np.ndarray  # (K + noise I)^-1 (y - gamma)

    def kernel(self, A, B):
        return squared_exponential(A, B, self.length_scale, self.signal_variance)


def _factorise(K):
    try:
        return linalg.cho_factor(K, lower=True)
    except linalg.LinAlgError:
        pass
    try:
        return linalg.cho_factor(K + JITTER * np.eye(len(K)), lower=True)
    except linalg.LinAlgError as exc:
        raise SingularKernelError("covariance matrix is not positive definite") from exc


def _neg_log_marginal(log_theta, X, r):
    ell, sf2, sn2 = np.exp(log_theta)
    K = squared_exponential(X, X, ell, sf2) + (sn2 + JITTER) * np.eye(len(X))
    try:
        c, low = linalg.cho_factor(K, lower=True)
    except linalg.LinAlgError:
        return 1e25
    alpha = linalg.cho_solve((c, low), r)
    return 0.5 * r @ alpha + np.log(np.diag(c)).sum() + 0.5 * len(X) * np.log(2 * np.pi)


def gp_fit(X, y, length_scale=LENGTH_SCALE, signal_variance=SIGNAL_VARIANCE,
           noise_variance=NOISE_VARIANCE, optimise=False) -> GpModel:
    """Condition a constant-mean GP on (X, y).

    The constant mean is the average target. With ``optimise`` the three
    hyperparameters are first tuned by maximising the log marginal likelihood,
    starting from the given values.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(X) == 0 or len(X) != len(y):
        raise ValueError("need at least one (x, y) pair with matching lengths")
    # exact constant so a flat history gives exactly flat predictions
    gamma = float(y[0]) if np.all(y == y[0]) else float(y.mean())
    r = y - gamma

    if optimise and len(X) > 1:
        start = np.log([length_scale, signal_variance, max(noise_variance, 1e-6)])
        res = optimize.minimize(_neg_log_marginal, start, args=(X, r), method="L-BFGS-B",
                                bounds=[(-5, 3), (-8, 3), (-12, 1)])
        length_scale, signal_variance, noise_variance = (float(v) for v in np.exp(res.x))

    if noise_variance == 0 and len(np.unique(X, axis=0)) < len(X):
        raise SingularKernelError("duplicate inputs with zero noise variance")
    K = squared_exponential(X, X, length_scale, signal_variance)
    K[np.diag_indices_from(K)] += noise_variance
    factor = _factorise(K)
    weights = linalg.cho_solve(factor, r)
    return GpModel(X, y, gamma, length_scale, signal_variance, noise_variance,
                   factor, weights)


def gp_predict_many(model: GpModel, Xs):
    """Posterior mean and variance (clamped at 0) at each row of ``Xs``."""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=np.float64))
    ks = model.kernel(Xs, model.X)
    mean = model.gamma + ks @ model.weights
    v = linalg.cho_solve(model.factor, ks.T)
    var = model.signal_variance - np.einsum("ij,ji->i", ks, v)
    return mean, np.maximum(var, 0.0)


def gp_predict(model: GpModel, x):
    mean, var = gp_predict_many(model, np.asarray(x, dtype=np.float64)[None, :])
    return float(mean[0]), float(var[0])


def best_predicted_index(means, encoded) -> int:
    """Argmax of ``means``; near-ties (1e-12) go to the lexicographically smallest encoding."""
    means = np.asarray(means)
    tied = np.flatnonzero(means >= means.max() - TIE_TOLERANCE)
    if len(tied) == 1:
        return int(tied[0])
    sub = np.asarray(encoded)[tied]
    order = np.lexsort(sub.T[::-1])
    return int(tied[order[0]])


def choose_index(encoded_remaining, history_X, history_y, iteration, rng,
                 warmup=WARMUP, **gp_options) -> int:
    """Index of the next candidate: uniform while ``iteration < warmup``, else GP argmax."""
    n = len(encoded_remaining)
    if n == 0:
        raise ValueError("no remaining parameters")
    if iteration < warmup or len(history_y) == 0:
        return int(rng.integers(n))
    model = gp_fit(history_X, history_y, **gp_options)
    means, _ = gp_predict_many(model, encoded_remaining)
    return best_predicted_index(means, encoded_remaining)


def choose_parameters(remaining: Sequence[MemberParams], history: Sequence[ParamRecord],
                      iteration: int, rng, series_length: int, warmup=WARMUP,
                      **gp_options) -> MemberParams:
    """Pick the next parameter tuple from ``remaining``; the caller removes it."""
    enc = encode_many(remaining, series_length)
    hx = encode_many([g.params for g in history], series_length)
    hy = np.array([g.accuracy for g in history], dtype=np.float64)
    idx = choose_index(enc, hx, hy, iteration, rng, warmup, **gp_options)
    return remaining[idx]
