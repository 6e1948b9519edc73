"""Save and load fitted ensembles.

A model file is an uncompressed ``.npz`` archive: a JSON document under
``meta`` describes the ensemble, and each member ``i`` contributes arrays
prefixed ``m{i}_``. Nothing is pickled.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np
from scipy import sparse

from .dictionary import IndividualBoss, MemberParams
from .ensembles import CandidateRecord, Ensemble, EnsembleConfig

__all__ = ["save_model", "load_model", "FORMAT_VERSION"]

FORMAT_VERSION = 1


def _member_arrays(i, member: IndividualBoss):
    c = member.train_counts.tocsr()
    arrays = {
        f"m{i}_breakpoints": member.breakpoints,
        f"m{i}_unigram_vocab": member.unigram_vocab.astype(np.int64),
        f"m{i}_bigram_vocab": member.bigram_vocab.astype(np.uint64),
        f"m{i}_data": c.data.astype(np.int64),
        f"m{i}_indices": c.indices.astype(np.int64),
        f"m{i}_indptr": c.indptr.astype(np.int64),
        f"m{i}_labels": member.train_labels.astype(np.int64),
    }
    if member.train_index is not None:
        arrays[f"m{i}_train_index"] = np.asarray(member.train_index, dtype=np.int64)
    return arrays


def save_model(ensemble: Ensemble, path) -> None:
    members = []
    arrays = {}
    for i, member in enumerate(ensemble.members):
        members.append({
            "params": list(member.params),
            "use_bigrams": member.use_bigrams,
            "distance": member.distance,
            "series_length": member.series_length,
            "train_accuracy": member.train_accuracy,
            "shape": list(member.train_counts.shape),
        })
        arrays.update(_member_arrays(i, member))
    meta = {
        "format": "tdeclf-ensemble",
        "version": FORMAT_VERSION,
        "config": asdict(ensemble.config),
        "classes": list(ensemble.classes),
        "weights": [float(w) for w in ensemble.weights],
        "build_seconds": ensemble.build_seconds,
        "candidates": [[c.iteration, list(c.params), c.accuracy, c.seconds]
                       for c in ensemble.candidates],
        "members": members,
    }
    arrays["meta"] = np.array(json.dumps(meta))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def _params(values):
    l, a, w, p, h, b = values
    return MemberParams(int(l), int(a), int(w), bool(p), int(h), str(b))


def load_model(path) -> Ensemble:
    with np.load(path, allow_pickle=False) as archive:
        meta = json.loads(str(archive["meta"]))
        if meta.get("format") != "tdeclf-ensemble":
            raise ValueError(f"{path}: not a model file")
        if meta["version"] > FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {meta['version']}")
        members = []
        for i, info in enumerate(meta["members"]):
            counts = sparse.csr_matrix(
                (archive[f"m{i}_data"], archive[f"m{i}_indices"], archive[f"m{i}_indptr"]),
                shape=tuple(info["shape"]),
            )
            key = f"m{i}_train_index"
            members.append(IndividualBoss(
                params=_params(info["params"]),
                use_bigrams=info["use_bigrams"],
                distance=info["distance"],
                breakpoints=archive[f"m{i}_breakpoints"],
                series_length=info["series_length"],
                unigram_vocab=archive[f"m{i}_unigram_vocab"],
                bigram_vocab=archive[f"m{i}_bigram_vocab"],
                train_counts=counts,
                train_labels=archive[f"m{i}_labels"],
                train_accuracy=info["train_accuracy"],
                train_index=archive[key] if key in archive.files else None,
            ))
    config = EnsembleConfig(**meta["config"])
    candidates = [CandidateRecord(i, _params(p), acc, secs)
                  for i, p, acc, secs in meta["candidates"]]
    return Ensemble(members, np.array(meta["weights"]), tuple(meta["classes"]), config,
                    candidates, meta["build_seconds"])
