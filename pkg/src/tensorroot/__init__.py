"""T-product tensor square roots and their applications.

Third-order tensors are ``numpy`` arrays of shape ``(n, m, p)``.  The
package provides the T-product algebra, Newton and Denman-Beavers
T-square-root solvers with convergence diagnostics, the Tensor
Bures-Wasserstein distance, and image applications (decorrelated
grayscale, whitening, color transfer) with classical baselines.
"""

from importlib.metadata import PackageNotFoundError, version

from .algebra import (
    bcirc_oracle,
    fold,
    frobenius_norm,
    identity_tensor,
    is_t_positive_definite,
    t_inv_sqrt_direct,
    t_inverse,
    t_product,
    t_sqrt_direct,
    t_svd,
    t_transpose,
    unfold,
)
from .exceptions import (
    DimensionMismatchError,
    NotCenteredError,
    NotHermitianError,
    NotPositiveDefiniteError,
    ResidualImaginaryTooLargeError,
    SingularCovarianceError,
    SingularSliceError,
    TensorRootError,
    WrongChannelCountError,
    ZeroVarianceChannelError,
)
from .fourier import dft_mode3, idft_mode3
from .solvers import (
    ConvergenceTrace,
    IterationConfig,
    SqrtSolution,
    convergence_ratios,
    db_tsqrt,
    make_conditioned_spd_tensor,
    newton_tsqrt,
    residual,
    stability_experiment,
    tsqrt,
)
from .tbw import TbwReport, tbw_distance, tbw_report

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+unknown"

__all__ = [
    "ConvergenceTrace",
    "DimensionMismatchError",
    "IterationConfig",
    "NotCenteredError",
    "NotHermitianError",
    "NotPositiveDefiniteError",
    "ResidualImaginaryTooLargeError",
    "SingularCovarianceError",
    "SingularSliceError",
    "SqrtSolution",
    "TbwReport",
    "TensorRootError",
    "WrongChannelCountError",
    "ZeroVarianceChannelError",
    "__version__",
    "bcirc_oracle",
    "convergence_ratios",
    "db_tsqrt",
    "dft_mode3",
    "fold",
    "frobenius_norm",
    "identity_tensor",
    "idft_mode3",
    "is_t_positive_definite",
    "make_conditioned_spd_tensor",
    "newton_tsqrt",
    "residual",
    "stability_experiment",
    "t_inv_sqrt_direct",
    "t_inverse",
    "t_product",
    "t_sqrt_direct",
    "t_svd",
    "t_transpose",
    "tbw_distance",
    "tbw_report",
    "tsqrt",
    "unfold",
]
