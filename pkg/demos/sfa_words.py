"""From a series to SFA words and a bag of words."""

import numpy as np

from tdeclf.sfa import (
    SfaParameters,
    fit_breakpoints,
    series_to_bag,
    sliding_dft,
    unpack_key,
    window_dft,
    window_words,
)

rng = np.random.default_rng(0)
t = np.linspace(0, 4 * np.pi, 64)
X = np.sin(t)[None, :] + 0.1 * rng.normal(size=(8, 64))
y = np.arange(8) % 2

# truncated DFT of one window: interleaved real and imaginary parts
print("first window, 4 coefficients:", np.round(window_dft(X[0, :16], 4, True), 3))

# every window at once, directly or by the incremental update
direct = sliding_dft(X, 16, 4, True)
mft = sliding_dft(X, 16, 4, True, method="mft")
print("windows per series:", direct.shape[1], "max |direct - mft|:", np.abs(direct - mft).max())

params = SfaParameters(word_length=4, window_length=16, normalise=True)
B = fit_breakpoints(X, y, params)
print("breakpoints (one row per coefficient):\n", np.round(B, 3))

words = window_words(X[:1], params, B)[0]
print("first ten packed words:", words[:10].tolist())

bag = series_to_bag(X[0], params, B, use_bigrams=True)
for key, count in sorted(bag.items(), key=lambda kv: -kv[1])[:5]:
    print(unpack_key(key, 4), count)
