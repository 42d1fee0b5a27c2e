"""Image quality metrics: SSIM, EME, decorrelation index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import DimensionMismatchError
from .covariance import channel_covariance, check_image, pearson_channel_correlations

SSIM_WINDOW = 8
SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
EME_EPS = 1e-4


def _as_gray(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-D grayscale image; got shape {a.shape}")
    if a.size == 0:
        raise DimensionMismatchError(f"{name} is empty")
    return a


def ssim(a, b, window=SSIM_WINDOW):
    """Mean structural similarity over all ``window x window`` sliding windows.

    Uniform (unweighted) windows at every valid offset, population
    statistics inside each window and stabilizers ``C1 = 0.01**2``,
    ``C2 = 0.03**2`` for unit dynamic range.  The window shrinks to the
    image size for images smaller than ``window``.

    Raises
    ------
    DimensionMismatchError
        If ``a`` and ``b`` differ in shape.
    """
    a = _as_gray(a, "a")
    b = _as_gray(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"images differ in shape: {a.shape} vs {b.shape}")
    shape = (min(window, a.shape[0]), min(window, a.shape[1]))
    wa = sliding_window_view(a, shape)
    wb = sliding_window_view(b, shape)
    axes = (-2, -1)
    mu_a = wa.mean(axis=axes)
    mu_b = wb.mean(axis=axes)
    var_a = ((wa - mu_a[..., None, None]) ** 2).mean(axis=axes)
    var_b = ((wb - mu_b[..., None, None]) ** 2).mean(axis=axes)
    cov = ((wa - mu_a[..., None, None]) * (wb - mu_b[..., None, None])).mean(axis=axes)
    num = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    den = (mu_a**2 + mu_b**2 + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(num / den))


def eme(img, block=8, eps=EME_EPS):
    """Edge measure of enhancement.

    ``(1/K) sum_tiles 20 log10((max + eps) / (min + eps))`` over
    non-overlapping ``block x block`` tiles, partial edge tiles included.
    """
    img = _as_gray(img, "img")
    if block < 1:
        raise ValueError("block must be >= 1")
    n, m = img.shape
    values = []
    for i in range(0, n, block):
        for j in range(0, m, block):
            tile = img[i : i + block, j : j + block]
            values.append(20.0 * np.log10((tile.max() + eps) / (tile.min() + eps)))
    return float(np.mean(values))


def decorrelation_index(img):
    """``||C - I||_F`` for the channel covariance ``C`` of the image as given."""
    cov = channel_covariance(check_image(img))
    return float(np.linalg.norm(cov - np.eye(cov.shape[0])))


@dataclass
class QualityMetrics:
    """Metric report; ``ssim``/``eme`` are ``None`` for multi-channel outputs."""

    ssim: float | None
    eme: float | None
    di: float | None
    channel_correlations: np.ndarray | None

    def to_dict(self):
        corr = None if self.channel_correlations is None else np.asarray(self.channel_correlations).tolist()
        return {"ssim": self.ssim, "eme": self.eme, "di": self.di, "correlations": corr}


def grayscale_metrics(gray, reference, source_image=None):
    """SSIM against ``reference``, EME of ``gray``; DI/correlations of ``source_image`` if given."""
    di = corr = None
    if source_image is not None:
        di = decorrelation_index(source_image)
        corr = pearson_channel_correlations(source_image)
    return QualityMetrics(ssim=ssim(gray, reference), eme=eme(gray), di=di, channel_correlations=corr)


def color_metrics(img):
    """DI and channel correlations of a multi-channel image."""
    return QualityMetrics(
        ssim=None, eme=None, di=decorrelation_index(img), channel_correlations=pearson_channel_correlations(img)
    )
