"""Dictionary-based time series classifiers: BOSS, cBOSS, S-BOSS, cS-BOSS and TDE."""

from .dataset_io import Dataset, load_ts, load_ucr_split, parse_ts_file, write_ts
from .dictionary import MemberParams, build_individual
from .ensembles import (
    DictionaryClassifier,
    Ensemble,
    EnsembleConfig,
    build_boss_ensemble,
    build_cboss,
    build_csboss,
    build_ensemble,
    build_sboss,
    build_tde,
)
from .persistence import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DictionaryClassifier",
    "Ensemble",
    "EnsembleConfig",
    "MemberParams",
    "build_boss_ensemble",
    "build_cboss",
    "build_csboss",
    "build_ensemble",
    "build_individual",
    "build_sboss",
    "build_tde",
    "load_model",
    "load_ts",
    "load_ucr_split",
    "parse_ts_file",
    "save_model",
    "write_ts",
]
