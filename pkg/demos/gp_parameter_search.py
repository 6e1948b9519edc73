"""A Gaussian process surrogate over encoded parameter tuples."""

import numpy as np

from tdeclf.ensembles import parameter_space
from tdeclf.gp import ParamRecord, choose_parameters, encode_many, gp_fit, gp_predict_many

m = 60
space = parameter_space(m, levels=(1, 2, 3), binnings=("MCB", "IGB"))
print("parameter tuples:", len(space))
print("encoding of the first tuple:", encode_many(space[:1], m)[0])

# pretend accuracy peaks for short windows and normalised series
rng = np.random.default_rng(1)
enc = encode_many(space, m)
truth = 0.9 - 0.4 * enc[:, 2] + 0.05 * enc[:, 3]
seen = rng.choice(len(space), 60, replace=False)
history = [ParamRecord(space[i], float(truth[i] + rng.normal(0, 0.02))) for i in seen]
remaining = [p for i, p in enumerate(space) if i not in set(seen.tolist())]

model = gp_fit(encode_many([h.params for h in history], m), [h.accuracy for h in history])
mean, var = gp_predict_many(model, encode_many(remaining[:3], m))
print("predicted mean / variance of three unseen tuples:", np.round(mean, 3), np.round(var, 4))

print("random pick during warm-up:", choose_parameters(remaining, history, 10, rng, m))
print("GP pick after warm-up:     ", choose_parameters(remaining, history, 60, rng, m))
