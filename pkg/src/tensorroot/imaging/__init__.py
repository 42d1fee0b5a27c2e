"""Image applications of the T-square root and their classical baselines."""

from .covariance import (
    center_channels,
    center_lateral,
    channel_covariance,
    channel_stds,
    check_image,
    pearson_channel_correlations,
    pixel_matrix,
    tensor_covariance,
)
from .grayscale import GrayscaleResult, luminance_grayscale, normalize_display, pca_grayscale, tdg_grayscale
from .metrics import QualityMetrics, color_metrics, decorrelation_index, eme, grayscale_metrics, ssim
from .synthetic import correlated_gaussian_image, random_image
from .transfer import (
    TransferResult,
    color_transfer,
    monge_map_matrix,
    reinhard_channelwise_transfer,
    transport_tensor,
)
from .whitening import channelwise_pca_whiten, matrix_whiten, t_whiten, whiten_image, whitened_for_display

__all__ = [
    "GrayscaleResult",
    "QualityMetrics",
    "TransferResult",
    "center_channels",
    "center_lateral",
    "channel_covariance",
    "channel_stds",
    "channelwise_pca_whiten",
    "check_image",
    "color_metrics",
    "color_transfer",
    "correlated_gaussian_image",
    "decorrelation_index",
    "eme",
    "grayscale_metrics",
    "luminance_grayscale",
    "matrix_whiten",
    "monge_map_matrix",
    "normalize_display",
    "pca_grayscale",
    "pearson_channel_correlations",
    "pixel_matrix",
    "random_image",
    "reinhard_channelwise_transfer",
    "ssim",
    "t_whiten",
    "tdg_grayscale",
    "tensor_covariance",
    "transport_tensor",
    "whiten_image",
    "whitened_for_display",
]
