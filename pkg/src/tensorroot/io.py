"""Tensor files, run manifests and atomic file writes.

Tensor file format: a JSON object ``{"dims": [n, m, p], "data": [...]}``
with the ``n*m*p`` entries listed slice by slice, each slice row by row.
Floats are written with the shortest round-trip representation.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import TensorRootError


class TensorFileError(TensorRootError):
    pass


def atomic_write_bytes(path, data):
    """Write ``data`` to ``path`` through a temporary file and an atomic rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def tensor_to_dict(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 2:
        a = a[:, :, np.newaxis]
    if a.ndim != 3:
        raise TensorFileError(f"expected a 3-D tensor; got shape {a.shape}")
    return {"dims": list(a.shape), "data": [float(x) for x in a.transpose(2, 0, 1).ravel()]}


def tensor_from_dict(obj, source="tensor"):
    if not isinstance(obj, dict) or "dims" not in obj or "data" not in obj:
        raise TensorFileError(f"{source}: expected an object with 'dims' and 'data'")
    dims = obj["dims"]
    if not (isinstance(dims, list) and len(dims) == 3 and all(isinstance(d, int) and d >= 1 for d in dims)):
        raise TensorFileError(f"{source}: 'dims' must be three positive integers; got {dims!r}")
    n, m, p = dims
    data = obj["data"]
    if not isinstance(data, list) or len(data) != n * m * p:
        raise TensorFileError(f"{source}: 'data' must hold {n * m * p} numbers")
    try:
        flat = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise TensorFileError(f"{source}: non-numeric entry in 'data'") from exc
    if flat.ndim != 1 or not np.all(np.isfinite(flat)):
        raise TensorFileError(f"{source}: 'data' must be a flat list of finite numbers")
    return np.ascontiguousarray(flat.reshape(p, n, m).transpose(1, 2, 0))


def dumps_tensor(a):
    return json.dumps(tensor_to_dict(a))


def loads_tensor(text, source="tensor"):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"{source}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return tensor_from_dict(obj, source)


def read_tensor(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise TensorFileError(f"cannot read {os.fspath(path)!r}: {exc}") from exc
    return loads_tensor(text, source=os.fspath(path))


def write_tensor(path, a):
    atomic_write_text(path, dumps_tensor(a) + "\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, Path):
        return os.fspath(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class RunManifest:
    """Record of one command invocation: inputs, parameters, outputs, version."""

    command: str
    inputs: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    versions: str = ""

    def to_json(self):
        return json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(**obj)

    def write(self, path):
        atomic_write_text(path, self.to_json() + "\n")


def write_json(path, obj):
    atomic_write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
