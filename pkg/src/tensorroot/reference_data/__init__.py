"""Published worked examples and convergence tables embedded as JSON.

Each file carries a ``source`` field describing where its numbers come
from.  Tensors use the tensor-file layout of :mod:`tensorroot.io`.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import numpy as np

from ..io import tensor_from_dict

NAMES = (
    "newton_example",
    "stability_example",
    "kappa_sweep",
    "tbw_example",
    "grayscale_example",
    "image_covariance_table",
    "timing",
)


@lru_cache(maxsize=None)
def _load_text(name):
    if name not in NAMES:
        raise KeyError(f"unknown reference data set {name!r}; available: {NAMES}")
    return resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8")


def load(name):
    """Parsed JSON document ``name`` (a fresh copy on every call)."""
    return json.loads(_load_text(name))


def tensor(name, key="tensor"):
    """Tensor stored under ``key`` (dotted path allowed) in data set ``name``."""
    obj = load(name)
    for part in key.split("."):
        obj = obj[part]
    return tensor_from_dict(obj, source=f"{name}:{key}")


def newton_example_tensor():
    return tensor("newton_example")


def stability_example_tensor():
    return tensor("stability_example")


def tbw_pair():
    return tensor("tbw_example", "a"), tensor("tbw_example", "b")


def grayscale_image():
    return tensor("grayscale_example", "image")


def image_covariance():
    return np.array(load("image_covariance_table")["covariance"], dtype=float)
