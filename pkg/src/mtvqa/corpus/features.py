"""Image feature storage: id -> flat float vector, one dimension per store."""

from __future__ import annotations

import zipfile
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError

_MAGIC = "mtvqa-feat v1"


@dataclass
class FeatureStore:
    vectors: dict
    feature_dim: int

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, image_id):
        return image_id in self.vectors

    def get(self, image_id):
        return self.vectors[image_id]

    def require(self, image_ids):
        missing = [i for i in image_ids if i not in self.vectors]
        if missing:
            raise FormatError(f"feature store is missing image ids: {missing[:5]}"
                              + (" ..." if len(missing) > 5 else ""))


def save_features(path, store, binary=False):
    """Write the text format, or the packed .npz variant when `binary`."""
    if binary:
        ids = list(store.vectors.keys())
        mat = np.stack([store.vectors[i] for i in ids]) if ids else np.zeros((0, store.feature_dim))
        with open(path, "wb") as fh:
            np.savez(fh, magic=np.array(_MAGIC), dim=np.array(store.feature_dim),
                     ids=np.array(ids), matrix=mat)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_MAGIC} {store.feature_dim}\n")
        for image_id, vec in store.vectors.items():
            fh.write(image_id + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def load_features(path):
    """Read either variant back into a FeatureStore."""
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"PK":
        return _load_binary(path)
    return _load_text(path)


def _load_binary(path):
    if not zipfile.is_zipfile(path):
        raise FormatError(f"{path}: not a feature archive")
    with np.load(path) as z:
        if str(z["magic"]) != _MAGIC:
            raise FormatError(f"{path}: missing feature header")
        dim = int(z["dim"])
        ids = [str(i) for i in z["ids"]]
        mat = z["matrix"]
        if mat.shape != (len(ids), dim):
            raise FormatError(f"{path}: matrix shape {mat.shape} inconsistent with header")
        return FeatureStore(vectors={i: mat[k].astype(np.float64) for k, i in enumerate(ids)},
                            feature_dim=dim)


def _load_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(_MAGIC):
        raise FormatError(f"{path}: missing feature header (empty or foreign file)")
    try:
        dim = int(lines[0][len(_MAGIC):].strip())
    except ValueError as exc:
        raise FormatError(f"{path}: bad feature header") from exc
    vectors = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        image_id, vals = parts[0], parts[1:]
        if len(vals) != dim:
            raise FormatError(
                f"{path}:{lineno}: record {image_id!r} has {len(vals)} values, expected {dim}")
        vectors[image_id] = np.array([float(v) for v in vals], dtype=np.float64)
    return FeatureStore(vectors=vectors, feature_dim=dim)
