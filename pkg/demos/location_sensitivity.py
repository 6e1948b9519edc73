"""Why pyramids matter: classes that differ only in where a pattern occurs."""

import numpy as np

from tdeclf import EnsembleConfig, build_ensemble
from tdeclf.synthetic import location_dataset

train = location_dataset(40, m=100, burst=20, seed=0)
test = location_dataset(200, m=100, burst=20, seed=1000)

for variant in ("cboss", "csboss", "tde"):
    ens = build_ensemble(train, EnsembleConfig(variant, k=100, s=25, seed=0))
    acc = np.mean(ens.predict_ids(test.X) == test.y)
    heights = sorted({m.params.levels for m in ens.members})
    print(f"{variant:7s} test accuracy {acc:.3f}, pyramid heights used {heights}")
