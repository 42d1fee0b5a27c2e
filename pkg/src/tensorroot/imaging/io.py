"""Reading and writing 8-bit images (PNG, binary PPM/PGM).

Images are normalized to [0, 1] floats on load; quantization to 8 bits
happens only on save.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import TensorRootError
from ..io import atomic_write_bytes

_FORMATS = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}


class ImageFormatError(TensorRootError):
    pass


def load_image(path):
    """Load an RGB (or grayscale) image as floats in [0, 1].

    Returns shape ``(n, m, 3)`` for color input and ``(n, m, 1)`` for
    grayscale input.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "I", "I;16", "F"):
                arr = np.asarray(im.convert("L"), dtype=float)[:, :, np.newaxis]
            else:
                arr = np.asarray(im.convert("RGB"), dtype=float)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageFormatError(f"cannot decode image {os.fspath(path)!r}: {exc}") from exc
    return arr / 255.0


def quantize(img):
    """Round [0, 1] floats to 8-bit integers (values outside are clipped)."""
    return np.clip(np.rint(np.asarray(img, dtype=float) * 255.0), 0, 255).astype(np.uint8)


def save_image(path, img):
    """Write an ``(n, m, 3)``, ``(n, m, 1)`` or ``(n, m)`` image atomically.

    The format follows the extension: ``.png``, ``.ppm`` (color) or
    ``.pgm`` (grayscale).
    """
    path = Path(path)
    fmt = _FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageFormatError(f"unsupported image extension {path.suffix!r}; use .png, .ppm or .pgm")
    arr = np.asarray(img)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise ImageFormatError(f"can only save 1 or 3 channels; got {arr.shape[2]}")
    if path.suffix.lower() == ".pgm" and arr.ndim != 2:
        raise ImageFormatError("PGM output needs a grayscale image")
    if path.suffix.lower() == ".ppm" and arr.ndim != 3:
        arr = np.repeat(arr[:, :, np.newaxis], 3, axis=2)
    im = Image.fromarray(quantize(arr))
    buf = io.BytesIO()
    im.save(buf, format=fmt)
    atomic_write_bytes(path, buf.getvalue())
