"""Covariance square roots for the imaging transforms.

Both the ``p x p`` channel covariance (as a one-slice tensor) and the
Fourier slices of a tensor covariance go through the iterative T-square
root solvers; ``method="direct"`` selects the eigendecomposition instead.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import NotPositiveDefiniteError, SingularCovarianceError, SingularSliceError
from ..fourier import hermitian_part
from ..solvers import IterationConfig, spectral_sqrt_pair

COV_RTOL = 1e-10
METHODS = ("db", "newton", "direct")


def check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def require_nonsingular_spectral(ch, which=None):
    """Raise :class:`SingularCovarianceError` unless every slice is PD.

    The test is ``lam_min > 1e-10 * lam_max`` per Fourier slice.
    """
    for i in range(ch.shape[2]):
        w = np.linalg.eigvalsh(hermitian_part(ch[:, :, i]))
        if not (w[-1] > 0 and w[0] > COV_RTOL * w[-1]):
            detail = f"Fourier slice {i}: eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}]"
            raise SingularCovarianceError(which=which, detail=detail)


def spectral_roots(ch, method="db", which=None, cfg=None):
    """``(C^{1/2}, C^{-1/2})`` slice-wise for a spectral covariance ``ch``."""
    check_method(method)
    ch = np.asarray(ch, dtype=complex)
    require_nonsingular_spectral(ch, which)
    try:
        return spectral_sqrt_pair(ch, method=method, cfg=cfg or IterationConfig(tolerance=1e-14), symmetrize=True)
    except (NotPositiveDefiniteError, SingularSliceError) as exc:
        raise SingularCovarianceError(which=which, detail=str(exc)) from exc


def matrix_roots(c, method="db", which=None, cfg=None):
    """``(C^{1/2}, C^{-1/2})`` of a real symmetric PD matrix, as real arrays."""
    c = np.asarray(c, dtype=float)
    x, y = spectral_roots(c[:, :, np.newaxis], method=method, which=which, cfg=cfg)
    return np.ascontiguousarray(x[:, :, 0].real), np.ascontiguousarray(y[:, :, 0].real)
