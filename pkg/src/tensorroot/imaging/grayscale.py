"""Grayscale conversion: decorrelated (TDG), luminance and PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import t_product_spectral
from ..exceptions import SingularCovarianceError, WrongChannelCountError
from ..fourier import dft_mode3, idft_mode3
from ._roots import check_method, matrix_roots, spectral_roots
from .covariance import (
    center_channels,
    center_lateral,
    channel_covariance,
    check_image,
    pixel_matrix,
    tensor_covariance_spectral,
)

LUMINANCE_WEIGHTS = np.array([0.2989, 0.5870, 0.1140])
MODES = ("matrix", "tensor")


@dataclass(frozen=True)
class GrayscaleResult:
    """Signed grayscale values and their display-normalized version in [0, 1]."""

    raw: np.ndarray
    display: np.ndarray


def normalize_display(g):
    """Affine map of ``min -> 0`` and ``max -> 1``; a constant image maps to zeros."""
    g = np.asarray(g, dtype=float)
    lo, hi = float(g.min()), float(g.max())
    if hi - lo <= 1e-15 * max(1.0, abs(hi)):
        return np.zeros_like(g)
    return (g - lo) / (hi - lo)


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def decorrelate_pixels(img, method="db"):
    """Channel-centered pixels times ``C^{-1/2}`` (matrix mode), shape ``(n, m, p)``.

    Also returns the channel covariance and its inverse square root.
    """
    img = check_image(img, min_channels=2)
    centered, _ = center_channels(img)
    cov = channel_covariance(img)
    _, inv_sqrt = matrix_roots(cov, method=method)
    decor = pixel_matrix(centered) @ inv_sqrt
    return decor.reshape(img.shape), cov, inv_sqrt


def decorrelate_tensor(img, method="db"):
    """``C^{-1/2} * X`` with ``C = (1/m) X * X^T`` of the lateral-centered tensor."""
    img = check_image(img, min_channels=2)
    centered, _ = center_lateral(img)
    ch = tensor_covariance_spectral(centered)
    _, inv_sqrt = spectral_roots(ch, method=method)
    return idft_mode3(t_product_spectral(inv_sqrt, dft_mode3(centered)))


def tdg_grayscale(img, mode="matrix", method="db"):
    """Tensor decorrelated grayscale.

    Centers the data, decorrelates with the inverse square root of the
    covariance and averages the decorrelated channels.

    Parameters
    ----------
    img : array_like, shape (n, m, p), p >= 2
    mode : {"matrix", "tensor"}
        ``"matrix"`` whitens with the ``p x p`` channel covariance (pixels as
        rows); ``"tensor"`` uses the ``n x n x p`` tensor covariance and the
        T-product.
    method : {"db", "newton", "direct"}
        Inverse square root solver.

    Returns
    -------
    GrayscaleResult

    Raises
    ------
    SingularCovarianceError
        If the covariance has ``lam_min <= 1e-10 * lam_max``.
    """
    check_mode(mode)
    check_method(method)
    if mode == "matrix":
        decor, _, _ = decorrelate_pixels(img, method)
    else:
        decor = decorrelate_tensor(img, method)
    raw = decor.mean(axis=2)
    return GrayscaleResult(raw=raw, display=normalize_display(raw))


def luminance_grayscale(img):
    """Fixed-weight ``0.2989 R + 0.5870 G + 0.1140 B``."""
    img = check_image(img)
    if img.shape[2] != 3:
        raise WrongChannelCountError(f"luminance needs 3 channels; got {img.shape[2]}")
    return img @ LUMINANCE_WEIGHTS


def pca_weights(cov):
    """Leading eigenvector of ``cov``, signed so its largest-magnitude entry is positive."""
    w, v = np.linalg.eigh(cov)
    if not (w[-1] > 0 and w[0] > -1e-12 * w[-1]):
        raise SingularCovarianceError(detail=f"eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}]")
    lead = v[:, -1]
    if lead[np.argmax(np.abs(lead))] < 0:
        lead = -lead
    return lead


def pca_grayscale(img):
    """Projection of the centered channels onto the principal channel direction.

    Raises :class:`SingularCovarianceError` when the channel covariance is
    zero (no principal direction).
    """
    img = check_image(img, min_channels=2)
    centered, _ = center_channels(img)
    raw = centered @ pca_weights(channel_covariance(img))
    return GrayscaleResult(raw=raw, display=normalize_display(raw))
