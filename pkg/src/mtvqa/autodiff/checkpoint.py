"""Parameter checkpoints: named arrays plus an optional config echo.

Two on-disk variants share the same logical content:

* text: a `mtvqa-ckpt v1 text <n>` header, a `config <json>` line, then one
  line per parameter: name, tab, space-joined dims, tab, space-joined
  values written with repr (repr round-trips doubles exactly in Python).
* binary: a numpy .npz archive (`meta` json member + one array member per
  parameter).  Round-trips are bit-exact.
"""

from __future__ import annotations

import json
import zipfile

import numpy as np

from ..errors import FormatError

_TEXT_MAGIC = "mtvqa-ckpt v1 text"


def save_checkpoint(path, params, config=None, binary=True):
    """Write `params` (mapping name -> ndarray) to `path`."""
    names = list(params.keys())
    if binary:
        meta = json.dumps({"version": 1, "names": names, "config": config})
        arrays = {f"arr_{i}": np.asarray(params[n], dtype=np.float64) for i, n in enumerate(names)}
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(meta), **arrays)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_TEXT_MAGIC} {len(names)}\n")
        fh.write("config " + json.dumps(config) + "\n")
        for n in names:
            arr = np.asarray(params[n], dtype=np.float64)
            dims = " ".join(str(d) for d in arr.shape) or "-"
            vals = " ".join(repr(float(v)) for v in arr.reshape(-1))
            fh.write(f"{n}\t{dims}\t{vals}\n")


def load_checkpoint(path):
    """Read a checkpoint in either variant. Returns (params dict, config)."""
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"PK":
        return _load_binary(path)
    return _load_text(path)


def _load_binary(path):
    if not zipfile.is_zipfile(path):
        raise FormatError(f"{path}: not a checkpoint archive")
    with np.load(path) as z:
        meta = json.loads(str(z["meta"]))
        if meta.get("version") != 1:
            raise FormatError(f"{path}: unsupported checkpoint version {meta.get('version')}")
        params = {n: z[f"arr_{i}"] for i, n in enumerate(meta["names"])}
        return params, meta.get("config")


def _load_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(_TEXT_MAGIC):
        raise FormatError(f"{path}: missing checkpoint header")
    try:
        count = int(lines[0][len(_TEXT_MAGIC):].strip())
    except ValueError as exc:
        raise FormatError(f"{path}: bad checkpoint header") from exc
    if len(lines) < 2 or not lines[1].startswith("config "):
        raise FormatError(f"{path}: missing config line")
    config = json.loads(lines[1][len("config "):])
    params = {}
    for ln in lines[2:2 + count]:
        try:
            name, dims, vals = ln.split("\t")
        except ValueError as exc:
            raise FormatError(f"{path}: malformed parameter line") from exc
        shape = () if dims == "-" else tuple(int(d) for d in dims.split())
        flat = np.array([float(v) for v in vals.split()], dtype=np.float64) if vals else np.array([])
        params[name] = flat.reshape(shape)
    if len(params) != count:
        raise FormatError(f"{path}: expected {count} parameters, found {len(params)}")
    return params, config
