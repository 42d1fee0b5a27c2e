"""Mode-3 DFT and dense complex matrix kernels.

Tensors are ``numpy`` arrays of shape ``(n, m, p)``; frontal slice ``k`` is
``a[:, :, k]``.  The spectral representation has the same shape with complex
dtype.  Forward transform is unnormalized and the inverse carries the
``1/p`` factor (``numpy.fft`` convention), so
``||t||_F**2 == sum_i ||fft(t)[:, :, i]||_F**2 / p``.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveDefiniteError,
    ResidualImaginaryTooLargeError,
    SingularSliceError,
)

HERMITIAN_ATOL = 1e-10
PIVOT_RTOL = 1e-14
PD_RTOL = 1e-12
IMAG_RTOL = 1e-9


def check_tensor3(t, name="tensor", dtype=float):
    """Validate and return ``t`` as a finite 3-D array.

    2-D inputs are promoted to a single frontal slice.
    """
    arr = np.asarray(t, dtype=dtype)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise DimensionMismatchError(f"{name} must be 3-D (n, m, p); got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise DimensionMismatchError(f"{name} has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_square_matrix(a, name="matrix"):
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square; got shape {arr.shape}")
    return arr


# ----------------------------------------------------------------------------
# mode-3 transforms
# ----------------------------------------------------------------------------

def dft_mode3(t, use_symmetry=False):
    """Unnormalized DFT of every tube ``t[i, j, :]``.

    With ``use_symmetry=True`` only the first ``p // 2 + 1`` slices are
    transformed (real FFT) and the rest are filled in by conjugate symmetry.
    """
    t = check_tensor3(t)
    if not use_symmetry:
        return np.fft.fft(t, axis=2)
    p = t.shape[2]
    half = np.fft.rfft(t, axis=2)
    out = np.empty(t.shape, dtype=complex)
    out[:, :, : half.shape[2]] = half
    for i in range(half.shape[2], p):
        out[:, :, i] = np.conj(half[:, :, p - i])
    return out


def conjugate_symmetry_defect(s):
    """Max-abs violation of ``s[..., p-i] == conj(s[..., i])``."""
    s = np.asarray(s)
    p = s.shape[2]
    mirrored = np.conj(s[:, :, (-np.arange(p)) % p])
    return float(np.max(np.abs(s - mirrored))) if s.size else 0.0


def idft_mode3(s):
    """Inverse of :func:`dft_mode3`; returns a real tensor.

    Raises
    ------
    ResidualImaginaryTooLargeError
        If the imaginary part of the inverse transform exceeds
        ``1e-9 * ||s||_F`` (the spectrum was not conjugate-symmetric).
    """
    s = check_tensor3(s, "spectral tensor", dtype=complex)
    t = np.fft.ifft(s, axis=2)
    residue = float(np.max(np.abs(t.imag)))
    threshold = IMAG_RTOL * float(np.linalg.norm(s))
    if residue > threshold:
        raise ResidualImaginaryTooLargeError(residue, threshold)
    return np.ascontiguousarray(t.real)


# ----------------------------------------------------------------------------
# dense complex matrix kernels
# ----------------------------------------------------------------------------

def cmat_mul(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def cmat_inv(a):
    """Inverse by partially pivoted LU.

    Raises :class:`SingularSliceError` (without a slice index; callers attach
    one) when a pivot falls below ``1e-14 * max|a|``.
    """
    a = check_square_matrix(a)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        raise SingularSliceError(detail="zero or non-finite matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    min_pivot = float(np.min(np.abs(np.diag(lu))))
    if min_pivot < PIVOT_RTOL * scale:
        raise SingularSliceError(detail=f"pivot {min_pivot:.3e} below {PIVOT_RTOL:g} * max|entry|")
    eye = np.eye(a.shape[0], dtype=lu.dtype)
    return scipy.linalg.lu_solve((lu, piv), eye, check_finite=False)


def hermitian_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitian_part(a):
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def cmat_herm_eig(a, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray of float, non-increasing
    eigenvectors : ndarray, unitary; column ``j`` pairs with ``eigenvalues[j]``
    """
    a = check_square_matrix(a)
    defect = hermitian_defect(a)
    if defect > atol:
        raise NotHermitianError(f"max |a - a^H| = {defect:.3e} exceeds {atol:g}")
    w, v = np.linalg.eigh(hermitian_part(a))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def cmat_sqrt_direct(a, inverse=False):
    """Principal square root of a Hermitian positive definite matrix.

    ``V diag(sqrt(lam)) V^H`` from :func:`cmat_herm_eig`; with
    ``inverse=True`` returns the inverse square root instead.
    """
    w, v = cmat_herm_eig(a)
    if w[-1] <= PD_RTOL * w[0] or w[0] <= 0:
        raise NotPositiveDefiniteError(detail=f"eigenvalues in [{w[-1]:.3e}, {w[0]:.3e}]")
    root = np.sqrt(w)
    if inverse:
        root = 1.0 / root
    out = (v * root) @ v.conj().T
    return hermitian_part(out)


def cmat_sqrt_principal(a):
    """Principal square root of a general matrix with spectrum off ``(-inf, 0]``.

    Complex Schur form followed by the upper-triangular recurrence
    ``R_ii = sqrt(T_ii)``, ``R_ij = (T_ij - sum_k R_ik R_kj) / (R_ii + R_jj)``.
    """
    a = check_square_matrix(a).astype(complex)
    t, z = scipy.linalg.schur(a, output="complex")
    diag = np.diag(t)
    if np.any((diag.real <= 0) & (np.abs(diag.imag) <= PD_RTOL * np.max(np.abs(diag)))):
        raise NotPositiveDefiniteError(detail="eigenvalue on the closed negative real axis")
    n = t.shape[0]
    r = np.zeros_like(t)
    for j in range(n):
        r[j, j] = np.sqrt(diag[j])
        for i in range(j - 1, -1, -1):
            s = r[i, i + 1 : j] @ r[i + 1 : j, j]
            r[i, j] = (t[i, j] - s) / (r[i, i] + r[j, j])
    return z @ r @ z.conj().T


def cmat_trace(a):
    a = check_square_matrix(a)
    return complex(np.trace(a))


def slice_condition_number(a):
    """Condition number of the Hermitian part, ``lam_max / lam_min``.

    Equals the spectral condition number for Hermitian PD input and is the
    quantity the stability study sweeps over.
    """
    w = np.linalg.eigvalsh(hermitian_part(check_square_matrix(a)))
    if w[0] <= 0:
        return float("inf")
    return float(w[-1] / w[0])
