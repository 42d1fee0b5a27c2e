"""Whitening: T-product (tensor), pixel-matrix ZCA and per-channel standardization."""

from __future__ import annotations

import numpy as np

from ..algebra import t_product_spectral
from ..fourier import check_tensor3, dft_mode3, idft_mode3
from ._roots import check_method, matrix_roots, spectral_roots
from .covariance import (
    center_channels,
    center_lateral,
    channel_covariance,
    channel_stds,
    check_image,
    pixel_matrix,
    tensor_covariance_spectral,
)
from .grayscale import check_mode


def t_whiten(x, method="db"):
    """Tensor whitening ``C^{-1/2} * X`` with ``C = (1/m) X * X^T``.

    Parameters
    ----------
    x : array_like, shape (n, m, p)
        Centered tensor (every channel mean below 1e-10).
    method : {"db", "newton", "direct"}

    Returns
    -------
    ndarray, shape (n, m, p)
        ``(1/m) X_w * X_w^T`` is the identity tensor.

    Raises
    ------
    NotCenteredError
    SingularCovarianceError
        If a Fourier slice of ``C`` is singular (e.g. ``m < n``).
    """
    check_method(method)
    x = check_tensor3(x)
    ch = tensor_covariance_spectral(x)
    _, inv_sqrt = spectral_roots(ch, method=method)
    return idft_mode3(t_product_spectral(inv_sqrt, dft_mode3(x)))


def zca_matrix(img, method="db"):
    """Channel mean and ``C^{-1/2}`` of the pixel matrix, via the square-root solvers."""
    img = check_image(img)
    _, means = center_channels(img)
    _, inv_sqrt = matrix_roots(channel_covariance(img), method=method)
    return means, inv_sqrt


def whiten_image(img, mode="matrix", method="db"):
    """Center an image and whiten it.

    ``mode="matrix"`` applies ``C^{-1/2}`` of the ``p x p`` channel
    covariance (computed by ``method``) to every pixel, so the output's
    channel covariance is the identity.  ``mode="tensor"`` subtracts the
    mean lateral slice and applies :func:`t_whiten`, which whitens the
    ``n x n x p`` tensor covariance instead; the output stays
    lateral-centered because the T-product preserves that property.
    """
    check_mode(mode)
    img = check_image(img)
    if mode == "tensor":
        centered, _ = center_lateral(img)
        return t_whiten(centered, method=method)
    means, inv_sqrt = zca_matrix(img, method=method)
    return ((pixel_matrix(img) - means) @ inv_sqrt).reshape(img.shape)


def matrix_whiten(img):
    """Classical ZCA on the flattened pixel matrix: ``X C^{-1/2}`` by eigendecomposition."""
    img = check_image(img)
    centered, _ = center_channels(img)
    _, inv_sqrt = matrix_roots(channel_covariance(img), method="direct")
    return (pixel_matrix(centered) @ inv_sqrt).reshape(img.shape)


def channelwise_pca_whiten(img):
    """Center and scale each channel to unit variance independently.

    No cross-channel rotation: correlations between channels survive.
    """
    img = check_image(img)
    stds = channel_stds(img)
    centered, _ = center_channels(img)
    return centered / stds


def whitened_for_display(white, img):
    """Map whitened values back to image range: ``mu + s * white``, clipped to [0, 1].

    ``mu`` are the input channel means and ``s = sqrt(tr C / p)`` the RMS
    channel standard deviation, so an input with covariance ``s^2 I`` is
    returned unchanged.
    """
    img = check_image(img)
    _, means = center_channels(img)
    scale = float(np.sqrt(np.trace(channel_covariance(img)) / img.shape[2]))
    return np.clip(means + scale * np.asarray(white), 0.0, 1.0)
