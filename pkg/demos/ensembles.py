"""Building, timing and saving the five ensemble variants on GunPoint."""

import tempfile
from pathlib import Path

import numpy as np

from tdeclf import EnsembleConfig, build_ensemble, load_model, load_ucr_split, save_model

data = Path(__file__).resolve().parent.parent / "data"
train, test = load_ucr_split(data, "GunPoint")

for variant, options in [("boss", {}), ("sboss", {}), ("cboss", {"k": 50, "s": 20}),
                         ("csboss", {"k": 50, "s": 20}), ("tde", {"k": 60, "s": 20})]:
    ens = build_ensemble(train, EnsembleConfig(variant, seed=0, **options))
    acc = np.mean(ens.predict_ids(test.X) == test.y)
    print(f"{variant:7s} members {len(ens.members):3d}  candidates {len(ens.candidates):4d}  "
          f"test accuracy {acc:.3f}  build {ens.build_seconds:.1f}s")

# a time contract replaces the candidate budget
ens = build_ensemble(train, EnsembleConfig("tde", time_contract=3.0))
print(f"3s contract: {len(ens.candidates)} candidates in {ens.build_seconds:.2f}s")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "tde.npz"
    save_model(ens, path)
    again = load_model(path)
    same = np.array_equal(ens.predict_proba(test.X), again.predict_proba(test.X))
    print("reloaded model predicts identically:", same)
