"""T-product algebra on third-order tensors.

All products are computed in the Fourier domain (slice-wise matrix
products after a mode-3 DFT); :func:`bcirc_oracle` provides the explicit
block-circulant matrix for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, NotPositiveDefiniteError, SingularSliceError
from .fourier import (
    HERMITIAN_ATOL,
    check_tensor3,
    cmat_inv,
    cmat_sqrt_direct,
    cmat_sqrt_principal,
    dft_mode3,
    hermitian_defect,
    hermitian_part,
    idft_mode3,
)


@dataclass(frozen=True)
class TSvdResult:
    """``a = u * s * t_transpose(v)`` with orthogonal ``u``, ``v`` and f-diagonal ``s``."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def identity_tensor(n, p):
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    out = np.zeros((n, n, p))
    out[:, :, 0] = np.eye(n)
    return out


def t_product(a, b):
    a = check_tensor3(a, "a")
    b = check_tensor3(b, "b")
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise DimensionMismatchError(f"cannot T-multiply {a.shape} by {b.shape}")
    ah = dft_mode3(a)
    bh = dft_mode3(b)
    return idft_mode3(np.einsum("ijk,jlk->ilk", ah, bh))


def t_product_spectral(*slabs):
    """Slice-wise product of spectral tensors, left to right."""
    out = slabs[0]
    for s in slabs[1:]:
        out = np.einsum("ijk,jlk->ilk", out, s)
    return out


def t_transpose(a):
    a = check_tensor3(a)
    out = np.empty((a.shape[1], a.shape[0], a.shape[2]), dtype=a.dtype)
    out[:, :, 0] = a[:, :, 0].T
    for k in range(1, a.shape[2]):
        out[:, :, k] = a[:, :, a.shape[2] - k].T
    return out


def spectral_conj_transpose(s):
    return np.conj(np.transpose(s, (1, 0, 2)))


def t_inverse(a):
    a = check_tensor3(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"T-inverse needs square slices; got {a.shape}")
    ah = dft_mode3(a)
    out = np.empty_like(ah)
    for i in range(ah.shape[2]):
        try:
            out[:, :, i] = cmat_inv(ah[:, :, i])
        except SingularSliceError as exc:
            raise SingularSliceError(slice_index=i, detail=str(exc)) from exc
    return idft_mode3(out)


def frobenius_norm(a):
    return float(np.linalg.norm(np.asarray(a).ravel()))


def spectral_frobenius_norm(s):
    """Spatial-domain Frobenius norm recovered from a spectral tensor (Parseval)."""
    s = np.asarray(s)
    return float(np.sqrt(np.sum(np.abs(s) ** 2) / s.shape[2]))


def _require_square(a):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected square frontal slices; got {a.shape}")


def first_non_pd_slice(a, tol=1e-12, hermitian=False, spectral=False):
    """Index of the first Fourier slice violating T-positive definiteness, or ``None``.

    A slice ``M`` qualifies when the smallest eigenvalue of its Hermitian
    part ``(M + M^H)/2`` exceeds ``tol`` times the largest.  With
    ``hermitian=True`` the slice must also be Hermitian within ``tol``
    (absolute, but never tighter than the kernel tolerance of 1e-10).
    """
    ah = np.asarray(a) if spectral else dft_mode3(check_tensor3(a))
    _require_square(ah)
    herm_tol = max(tol, HERMITIAN_ATOL)
    for i in range(ah.shape[2]):
        m = ah[:, :, i]
        if hermitian and hermitian_defect(m) > herm_tol:
            return i
        w = np.linalg.eigvalsh(hermitian_part(m))
        if not (w[-1] > 0 and w[0] > tol * w[-1]):
            return i
    return None


def is_t_positive_definite(a, tol=1e-12, hermitian=False):
    """Whether every Fourier slice of ``a`` is positive definite.

    The default test is on the Hermitian part of each slice, which for
    Hermitian slices is the usual HPD test and for the complex-symmetric
    slices of tensors such as ``A(:,:,2) != A(:,:,3)^T`` still certifies a
    spectrum in the open right half-plane.  Pass ``hermitian=True`` to also
    require Hermitian slices (T-symmetric tensors, e.g. covariances).
    """
    return first_non_pd_slice(a, tol=tol, hermitian=hermitian) is None


def require_t_positive_definite(a, tol=1e-12, hermitian=False, which=None, spectral=False):
    idx = first_non_pd_slice(a, tol=tol, hermitian=hermitian, spectral=spectral)
    if idx is not None:
        raise NotPositiveDefiniteError(slice_index=idx, which=which)


def unfold(b):
    """Stack frontal slices vertically: ``(n, m, p) -> (n*p, m)``."""
    b = check_tensor3(b)
    return np.concatenate([b[:, :, k] for k in range(b.shape[2])], axis=0)


def fold(mat, n, p):
    mat = np.asarray(mat)
    if mat.shape[0] != n * p:
        raise DimensionMismatchError(f"cannot fold {mat.shape} into n={n}, p={p}")
    return np.stack([mat[k * n : (k + 1) * n] for k in range(p)], axis=2)


def bcirc_oracle(a):
    """Explicit ``(n*p, m*p)`` block-circulant matrix of ``a``.

    Test-only: O(n m p^2) memory.
    """
    a = check_tensor3(a)
    n, m, p = a.shape
    out = np.zeros((n * p, m * p), dtype=a.dtype)
    for i in range(p):
        for j in range(p):
            out[i * n : (i + 1) * n, j * m : (j + 1) * m] = a[:, :, (i - j) % p]
    return out


def t_svd(a):
    """T-SVD via slice-wise SVDs in the Fourier domain.

    Slices past ``p // 2`` are taken as conjugates of their mirrors so the
    factors are real.  Singular values sit on the diagonal of every Fourier
    slice of ``s`` in non-increasing order.
    """
    a = check_tensor3(a)
    n, m, p = a.shape
    ah = dft_mode3(a)
    uh = np.zeros((n, n, p), dtype=complex)
    sh = np.zeros((n, m, p), dtype=complex)
    vh = np.zeros((m, m, p), dtype=complex)
    r = min(n, m)
    for i in range(p // 2 + 1):
        # DC and Nyquist slices are real; keep their factors real
        m_i = ah[:, :, i].real if (i == 0 or 2 * i == p) else ah[:, :, i]
        u, sv, wh = np.linalg.svd(m_i)
        uh[:, :, i] = u
        sh[np.arange(r), np.arange(r), i] = sv
        vh[:, :, i] = wh.conj().T
    for i in range(p // 2 + 1, p):
        uh[:, :, i] = np.conj(uh[:, :, p - i])
        sh[:, :, i] = np.conj(sh[:, :, p - i])
        vh[:, :, i] = np.conj(vh[:, :, p - i])
    return TSvdResult(u=idft_mode3(uh), s=idft_mode3(sh), v=idft_mode3(vh))


def sqrt_spectral(ah, inverse=False):
    """Slice-wise principal (inverse) square roots of a spectral tensor.

    Hermitian slices go through the eigendecomposition route; other slices
    through the Schur route.
    """
    out = np.empty_like(ah, dtype=complex)
    for i in range(ah.shape[2]):
        m = ah[:, :, i]
        try:
            if hermitian_defect(m) <= HERMITIAN_ATOL:
                out[:, :, i] = cmat_sqrt_direct(m, inverse=inverse)
            else:
                root = cmat_sqrt_principal(m)
                out[:, :, i] = cmat_inv(root) if inverse else root
        except NotPositiveDefiniteError as exc:
            raise NotPositiveDefiniteError(slice_index=i, detail=str(exc)) from exc
        except SingularSliceError as exc:
            raise SingularSliceError(slice_index=i, detail=str(exc)) from exc
    return out


def t_sqrt_direct(a, inverse=False):
    """Principal T-square root by direct per-slice factorization."""
    a = check_tensor3(a)
    _require_square(a)
    ah = dft_mode3(a)
    require_t_positive_definite(ah, spectral=True)
    return idft_mode3(sqrt_spectral(ah, inverse=inverse))


def t_inv_sqrt_direct(a):
    return t_sqrt_direct(a, inverse=True)
