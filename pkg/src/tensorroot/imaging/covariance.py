"""Centering, covariances and channel correlations of image tensors.

Images are ``(n, m, p)`` float arrays (height, width, channels).  Two
covariance operands are used throughout the imaging package:

* the *channel covariance*, a ``p x p`` matrix with pixels as rows, and
* the *tensor covariance* ``(1/m) X * X^T``, an ``n x n x p`` tensor.
"""

from __future__ import annotations

import numpy as np

from ..algebra import t_product_spectral, spectral_conj_transpose
from ..exceptions import DimensionMismatchError, NotCenteredError, ZeroVarianceChannelError
from ..fourier import check_tensor3, dft_mode3, idft_mode3

CENTER_ATOL = 1e-10


def check_image(img, name="image", min_channels=1):
    """Return ``img`` as a finite float array of shape ``(n, m, p)``.

    2-D input is treated as a single-channel image.
    """
    arr = check_tensor3(img, name)
    if arr.shape[2] < min_channels:
        raise DimensionMismatchError(f"{name} needs at least {min_channels} channels; got {arr.shape[2]}")
    return arr


def pixel_matrix(img):
    """Pixels as rows: ``(n, m, p) -> (n*m, p)`` in row-major pixel order."""
    img = check_image(img)
    return img.reshape(-1, img.shape[2])


def center_channels(img):
    """Subtract each channel's mean.

    Returns
    -------
    centered : ndarray, shape (n, m, p)
    means : ndarray, shape (p,)
    """
    img = check_image(img)
    means = img.mean(axis=(0, 1))
    return img - means, means


def center_lateral(x):
    """Subtract the mean lateral slice ``mean_j x[:, j, :]``.

    Every tube ``x[i, :, k]`` then sums to zero, which also zeroes every
    channel mean.  Returns the centered tensor and the ``(n, 1, p)`` mean.
    """
    x = check_tensor3(x)
    mean = x.mean(axis=1, keepdims=True)
    return x - mean, mean


def require_centered(x, atol=CENTER_ATOL):
    means = np.asarray(x).mean(axis=(0, 1))
    worst = float(np.max(np.abs(means)))
    if worst > atol:
        raise NotCenteredError(f"channel means up to {worst:.3e} exceed {atol:g}; center the input first")


def tensor_covariance_spectral(x, check_centered=True):
    """Fourier slices of ``(1/m) X * X^T``; each is Hermitian PSD."""
    x = check_tensor3(x)
    if check_centered:
        require_centered(x)
    xh = dft_mode3(x)
    return t_product_spectral(xh, spectral_conj_transpose(xh)) / x.shape[1]


def tensor_covariance(x, check_centered=True):
    """Tensor covariance ``(1/m) X * X^T`` of a centered ``(n, m, p)`` tensor.

    With ``check_centered=False`` the second moment is returned for any
    input, e.g. to verify a whitened tensor.

    Raises
    ------
    NotCenteredError
        If some channel mean exceeds 1e-10 in magnitude.
    """
    return idft_mode3(tensor_covariance_spectral(x, check_centered))


def channel_covariance(img):
    """``(1/N) X^T X`` with ``X`` the channel-centered pixel matrix, ``N = n*m``."""
    centered, _ = center_channels(img)
    xm = pixel_matrix(centered)
    return (xm.T @ xm) / xm.shape[0]


def channel_stds(img):
    """Population standard deviation of every channel.

    A channel whose spread is below rounding level (``1e-12`` relative to
    its mean, absolute below 1) raises :class:`ZeroVarianceChannelError`.
    """
    img = check_image(img)
    means = img.mean(axis=(0, 1))
    stds = img.std(axis=(0, 1))
    for k in range(img.shape[2]):
        if not stds[k] > 1e-12 * max(1.0, abs(means[k])):
            raise ZeroVarianceChannelError(k)
    return stds


def pearson_channel_correlations(img):
    """Pearson correlation matrix of the channels (symmetric, unit diagonal)."""
    channel_stds(img)
    cov = channel_covariance(img)
    s = np.sqrt(np.diag(cov))
    corr = cov / np.outer(s, s)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr
