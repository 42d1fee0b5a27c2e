"""Estimator-style wrappers (``fit`` / ``transform`` / ``get_params``).

Inputs are single tensors or images rather than sample matrices, so these
classes follow the scikit-learn parameter and fitted-attribute conventions
without claiming to be drop-in pipeline steps.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import t_product_spectral
from .exceptions import DimensionMismatchError
from .fourier import check_tensor3, dft_mode3, idft_mode3
from .imaging._roots import check_method, matrix_roots, spectral_roots
from .imaging.covariance import (
    center_channels,
    center_lateral,
    channel_covariance,
    channel_stds,
    check_image,
    pixel_matrix,
    tensor_covariance_spectral,
)
from .imaging.grayscale import check_mode, luminance_grayscale, normalize_display, pca_weights, tdg_grayscale
from .imaging.transfer import monge_map_matrix, monge_map_spectral
from .solvers import IterationConfig, tsqrt


class TSqrt(BaseEstimator):
    """Principal T-square root of a T-positive definite tensor.

    Parameters
    ----------
    method : {"db", "newton", "direct"}
    tol : float
        Residual tolerance.
    max_iter : int
    early_stop : bool
        Stop at the first iterate below ``tol``.
    symmetrize : bool
        Replace iterates by their Hermitian part (Hermitian inputs only).

    Attributes
    ----------
    sqrt_ : ndarray
    inv_sqrt_ : ndarray or None
        Set by ``"db"`` and ``"direct"``.
    trace_ : ConvergenceTrace
    converged_ : bool
    """

    def __init__(self, method="db", tol=1e-12, max_iter=50, early_stop=True, symmetrize=False):
        self.method = method
        self.tol = tol
        self.max_iter = max_iter
        self.early_stop = early_stop
        self.symmetrize = symmetrize

    def fit(self, a, y=None):
        cfg = IterationConfig(
            max_iterations=self.max_iter, tolerance=self.tol, early_stop=self.early_stop, symmetrize=self.symmetrize
        )
        sol = tsqrt(a, method=self.method, cfg=cfg)
        self.sqrt_ = sol.sqrt
        self.inv_sqrt_ = sol.inv_sqrt
        self.trace_ = sol.trace
        self.converged_ = sol.trace.converged
        return self


class TensorWhitener(TransformerMixin, BaseEstimator):
    """Whitening learned from one image and applicable to others.

    ``mode="matrix"`` learns the channel means and ``C^{-1/2}`` of the
    ``p x p`` channel covariance; ``mode="tensor"`` learns the mean lateral
    slice and the T-inverse square root of the ``n x n x p`` tensor
    covariance (images to transform must then have the same ``n`` and ``p``).
    """

    def __init__(self, mode="matrix", method="db"):
        self.mode = mode
        self.method = method

    def fit(self, x, y=None):
        check_mode(self.mode)
        check_method(self.method)
        x = check_image(x)
        if self.mode == "matrix":
            _, self.mean_ = center_channels(x)
            self.covariance_ = channel_covariance(x)
            _, self.inv_sqrt_ = matrix_roots(self.covariance_, method=self.method)
        else:
            centered, self.mean_ = center_lateral(x)
            ch = tensor_covariance_spectral(centered)
            _, inv_h = spectral_roots(ch, method=self.method)
            self.covariance_ = idft_mode3(ch)
            self.inv_sqrt_ = idft_mode3(inv_h)
        self.n_channels_ = x.shape[2]
        return self

    def transform(self, x):
        check_is_fitted(self, "inv_sqrt_")
        x = check_image(x)
        if x.shape[2] != self.n_channels_:
            raise DimensionMismatchError(f"fitted on {self.n_channels_} channels; got {x.shape[2]}")
        if self.mode == "matrix":
            return ((pixel_matrix(x) - self.mean_) @ self.inv_sqrt_).reshape(x.shape)
        if x.shape[0] != self.inv_sqrt_.shape[0]:
            raise DimensionMismatchError(f"fitted on height {self.inv_sqrt_.shape[0]}; got {x.shape[0]}")
        centered = x - self.mean_
        return idft_mode3(t_product_spectral(dft_mode3(self.inv_sqrt_), dft_mode3(centered)))


class DecorrelatedGrayscale(TransformerMixin, BaseEstimator):
    """Tensor decorrelated grayscale; ``transform`` returns the raw signed values.

    With ``display=True`` the output is affinely mapped onto [0, 1].
    """

    def __init__(self, mode="matrix", method="db", display=False):
        self.mode = mode
        self.method = method
        self.display = display

    def fit(self, x, y=None):
        check_mode(self.mode)
        check_method(self.method)
        self.n_channels_ = check_image(x, min_channels=2).shape[2]
        return self

    def transform(self, x):
        check_is_fitted(self, "n_channels_")
        res = tdg_grayscale(x, mode=self.mode, method=self.method)
        return res.display if self.display else res.raw


class LuminanceGrayscale(TransformerMixin, BaseEstimator):
    """Fixed-weight luminance baseline (stateless)."""

    def fit(self, x, y=None):
        self.n_channels_ = check_image(x).shape[2]
        return self

    def transform(self, x):
        check_is_fitted(self, "n_channels_")
        return luminance_grayscale(x)


class PCAGrayscale(TransformerMixin, BaseEstimator):
    """Projection onto the principal channel direction learned in ``fit``.

    ``transform`` returns the display-normalized projection, or the raw
    projection when ``display=False``.
    """

    def __init__(self, display=True):
        self.display = display

    def fit(self, x, y=None):
        x = check_image(x, min_channels=2)
        _, self.mean_ = center_channels(x)
        self.weights_ = pca_weights(channel_covariance(x))
        return self

    def transform(self, x):
        check_is_fitted(self, "weights_")
        x = check_image(x, min_channels=2)
        raw = (x - self.mean_) @ self.weights_
        if not self.display:
            return raw
        return normalize_display(raw)


class TensorColorTransfer(TransformerMixin, BaseEstimator):
    """Gaussian optimal-transport color transfer.

    ``fit(source, target)`` learns the Monge map from the source color
    statistics to the target's; ``transform(x)`` applies it to ``x``
    (normally the source image).  Returns raw values; clip for display.
    """

    def __init__(self, mode="matrix", method="db"):
        self.mode = mode
        self.method = method

    def fit(self, source, target):
        check_mode(self.mode)
        check_method(self.method)
        src = check_image(source, "source")
        tgt = check_image(target, "target")
        if src.shape[2] != tgt.shape[2]:
            raise DimensionMismatchError(f"channel counts differ: {src.shape[2]} vs {tgt.shape[2]}")
        if self.mode == "matrix":
            _, self.source_mean_ = center_channels(src)
            _, self.target_mean_ = center_channels(tgt)
            self.map_ = monge_map_matrix(channel_covariance(src), channel_covariance(tgt), self.method)
        else:
            if src.shape[0] != tgt.shape[0]:
                raise DimensionMismatchError(f"tensor mode needs equal heights: {src.shape[0]} vs {tgt.shape[0]}")
            xs, self.source_mean_ = center_lateral(src)
            xt, self.target_mean_ = center_lateral(tgt)
            tmap = monge_map_spectral(tensor_covariance_spectral(xs), tensor_covariance_spectral(xt), self.method)
            self.map_ = idft_mode3(tmap)
        return self

    def transform(self, x):
        check_is_fitted(self, "map_")
        x = check_image(x)
        if self.mode == "matrix":
            return ((pixel_matrix(x) - self.source_mean_) @ self.map_ + self.target_mean_).reshape(x.shape)
        centered = check_tensor3(x - self.source_mean_)
        return idft_mode3(t_product_spectral(dft_mode3(self.map_), dft_mode3(centered))) + self.target_mean_


class ChannelwiseColorTransfer(TransformerMixin, BaseEstimator):
    """Per-channel mean/std matching (RGB baseline)."""

    def fit(self, source, target):
        src = check_image(source, "source")
        tgt = check_image(target, "target")
        if src.shape[2] != tgt.shape[2]:
            raise DimensionMismatchError(f"channel counts differ: {src.shape[2]} vs {tgt.shape[2]}")
        self.scale_ = channel_stds(tgt) / channel_stds(src)
        _, self.source_mean_ = center_channels(src)
        _, self.target_mean_ = center_channels(tgt)
        return self

    def transform(self, x):
        check_is_fitted(self, "scale_")
        x = check_image(x)
        return (x - self.source_mean_) * self.scale_ + self.target_mean_


__all__ = [
    "ChannelwiseColorTransfer",
    "DecorrelatedGrayscale",
    "LuminanceGrayscale",
    "PCAGrayscale",
    "TSqrt",
    "TensorColorTransfer",
    "TensorWhitener",
]
