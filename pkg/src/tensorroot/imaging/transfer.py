"""Color transfer: Gaussian optimal transport (Monge) map and a per-channel baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import t_product_spectral
from ..exceptions import DimensionMismatchError
from ..fourier import dft_mode3, hermitian_part, idft_mode3
from ._roots import check_method, require_nonsingular_spectral, spectral_roots
from .covariance import center_channels, center_lateral, channel_covariance, channel_stds, check_image, pixel_matrix
from .covariance import tensor_covariance_spectral
from .grayscale import check_mode


@dataclass(frozen=True)
class TransferResult:
    """Transferred image before (``raw``) and after (``display``) clipping to [0, 1]."""

    raw: np.ndarray
    display: np.ndarray


def monge_map_spectral(cs, ct, method="db"):
    """Slice-wise ``T = Cs^{-1/2} (Cs^{1/2} Ct Cs^{1/2})^{1/2} Cs^{-1/2}``.

    ``cs`` and ``ct`` are spectral covariances (Hermitian PD slices).
    """
    s_half, s_inv_half = spectral_roots(cs, method=method, which="source")
    require_nonsingular_spectral(ct, which="target")
    middle = t_product_spectral(s_half, ct, s_half)
    for i in range(middle.shape[2]):
        middle[:, :, i] = hermitian_part(middle[:, :, i])
    m_half, _ = spectral_roots(middle, method=method, which="target")
    tmap = t_product_spectral(s_inv_half, m_half, s_inv_half)
    for i in range(tmap.shape[2]):
        tmap[:, :, i] = hermitian_part(tmap[:, :, i])
    return tmap


def monge_map_matrix(cs, ct, method="db"):
    """Real symmetric Gaussian transport matrix from ``cs`` to ``ct``."""
    cs = np.asarray(cs, dtype=float)
    ct = np.asarray(ct, dtype=float)
    return monge_map_spectral(cs[:, :, np.newaxis], ct[:, :, np.newaxis], method)[:, :, 0].real


def transport_tensor(source, target, method="db"):
    """Monge map tensor between the tensor covariances of two images.

    Both images are centered by their mean lateral slice first; the
    heights ``n`` and channel counts ``p`` must agree.
    """
    src = check_image(source, "source")
    tgt = check_image(target, "target")
    _check_conformable(src, tgt, tensor=True)
    xs, _ = center_lateral(src)
    xt, _ = center_lateral(tgt)
    tmap = monge_map_spectral(tensor_covariance_spectral(xs), tensor_covariance_spectral(xt), method)
    return idft_mode3(tmap)


def _check_conformable(src, tgt, tensor):
    if src.shape[2] != tgt.shape[2]:
        raise DimensionMismatchError(f"channel counts differ: {src.shape[2]} vs {tgt.shape[2]}")
    if tensor and src.shape[0] != tgt.shape[0]:
        raise DimensionMismatchError(f"tensor mode needs equal heights: {src.shape[0]} vs {tgt.shape[0]}")


def color_transfer(source, target, mode="matrix", method="db"):
    """Move the color statistics of ``source`` onto those of ``target``.

    ``mode="matrix"`` maps every pixel by the Gaussian optimal transport
    matrix between the ``p x p`` channel covariances and adds the target
    channel means.  ``mode="tensor"`` computes ``T * X_s + mu_t`` with
    tensor covariances, lateral-slice centering and the T-product; the
    output's tensor covariance equals the target's.

    Raises
    ------
    SingularCovarianceError
        ``exc.which`` is ``"source"`` or ``"target"``.
    """
    check_mode(mode)
    check_method(method)
    src = check_image(source, "source")
    tgt = check_image(target, "target")
    _check_conformable(src, tgt, tensor=(mode == "tensor"))
    if mode == "matrix":
        _, mu_s = center_channels(src)
        _, mu_t = center_channels(tgt)
        tmap = monge_map_matrix(channel_covariance(src), channel_covariance(tgt), method)
        raw = ((pixel_matrix(src) - mu_s) @ tmap + mu_t).reshape(src.shape)
    else:
        xs, _ = center_lateral(src)
        xt, mu_t = center_lateral(tgt)
        tmap = monge_map_spectral(tensor_covariance_spectral(xs), tensor_covariance_spectral(xt), method)
        raw = idft_mode3(t_product_spectral(tmap, dft_mode3(xs))) + mu_t
    return TransferResult(raw=raw, display=np.clip(raw, 0.0, 1.0))


def reinhard_channelwise_transfer(source, target):
    """Per-channel moment matching ``(x - mu_s) * sigma_t / sigma_s + mu_t`` in RGB."""
    src = check_image(source, "source")
    tgt = check_image(target, "target")
    _check_conformable(src, tgt, tensor=False)
    s_std = channel_stds(src)
    t_std = channel_stds(tgt)
    _, mu_s = center_channels(src)
    _, mu_t = center_channels(tgt)
    raw = (src - mu_s) * (t_std / s_std) + mu_t
    return TransferResult(raw=raw, display=np.clip(raw, 0.0, 1.0))
