"""Small generated datasets for tests and demonstrations."""

from __future__ import annotations

import numpy as np

from .dataset_io import Dataset

__all__ = ["location_dataset", "shape_dataset"]


def location_dataset(n: int, m: int = 100, burst: int = 20, seed: int = 0,
                     background: bool = True) -> Dataset:
    """Two classes that differ only in where a sine burst sits.

    Every series carries a random low-frequency background plus noise and one
    three-cycle burst of length ``burst``: somewhere in the first half for
    class ``first``, in the second half for class ``second``. The burst shape
    and the distribution of its offset within the half are the same for both
    classes, so a bag that ignores position cannot tell them apart.
    With ``background=False`` only the noise and the burst remain.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(m)
    half = m // 2
    y = np.arange(n) % 2
    shape = 2.0 * np.sin(2 * np.pi * 3 * np.arange(burst) / burst)
    X = np.empty((n, m))
    for i in range(n):
        trend = 0.0 if not background else sum(
            rng.uniform(1, 3) * np.sin(2 * np.pi * rng.uniform(0.3, 2.0) * t / m
                                       + rng.uniform(0, 2 * np.pi))
            for _ in range(2)
        )
        x = trend + rng.normal(0, 0.3, m)
        start = rng.integers(0, half - burst + 1) + (half if y[i] else 0)
        x[start:start + burst] += shape
        X[i] = x
    return Dataset(X, y, ("first", "second"), "Location")


def shape_dataset(n: int, m: int = 60, n_classes: int = 2, noise: float = 0.2,
                  seed: int = 0) -> Dataset:
    """Easy classes: class ``c`` is a sine with ``c + 1`` cycles at a random phase."""
    rng = np.random.default_rng(seed)
    t = np.arange(m) / m
    y = np.arange(n) % n_classes
    phase = rng.uniform(0, 2 * np.pi, n)
    X = np.sin(2 * np.pi * (y[:, None] + 1) * t[None, :] + phase[:, None])
    X += rng.normal(0, noise, (n, m))
    return Dataset(X, y, tuple(f"c{c}" for c in range(n_classes)), "Shapes")
