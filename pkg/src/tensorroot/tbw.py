"""Tensor Bures-Wasserstein distance between T-positive definite tensors."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .algebra import require_t_positive_definite
from .exceptions import DimensionMismatchError, NotPositiveDefiniteError
from .fourier import check_tensor3, cmat_sqrt_direct, cmat_trace, dft_mode3, hermitian_part
from .solvers import IterationConfig, spectral_sqrt_pair

CLAMP_ATOL = 1e-10
STRATEGIES = ("direct", "newton", "db")


@dataclass(frozen=True)
class SliceBW:
    trace_a: float
    trace_b: float
    trace_cross_sqrt: float
    d_squared: float


@dataclass(frozen=True)
class TbwReport:
    per_slice: list
    total: float

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["slice", "trace_a", "trace_b", "trace_cross_sqrt", "d_squared"])
        for i, row in enumerate(self.per_slice):
            w.writerow([i + 1, repr(row.trace_a), repr(row.trace_b), repr(row.trace_cross_sqrt), repr(row.d_squared)])
        w.writerow(["total", "", "", "", repr(self.total)])
        return buf.getvalue()


def _hpd_sqrt(m, strategy, cfg):
    if strategy == "direct":
        return cmat_sqrt_direct(m)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    x, _ = spectral_sqrt_pair(m[:, :, np.newaxis], method=strategy, cfg=cfg, symmetrize=True)
    return x[:, :, 0]


def _real_trace(m):
    return cmat_trace(m).real


def _slice_bw(a, b, strategy, cfg):
    """Trace-form pieces and the cancellation-free ``d^2`` for one slice pair.

    ``d^2`` is evaluated as ``||A^{1/2} - B^{1/2} U||_F^2`` with ``U`` the
    unitary polar factor of ``B^{1/2} A^{1/2}``; this equals
    ``tr A + tr B - 2 tr((A^{1/2} B A^{1/2})^{1/2})`` but does not lose
    digits when ``A`` and ``B`` are close.
    """
    pa = _hpd_sqrt(a, strategy, cfg)
    pb = _hpd_sqrt(b, strategy, cfg)
    cross = hermitian_part(pa @ b @ pa)
    cross_sqrt = _hpd_sqrt(cross, strategy, cfg)
    w, _, vh = np.linalg.svd(pb @ pa)
    polar = w @ vh
    d2 = float(np.linalg.norm(pa - pb @ polar) ** 2)
    return SliceBW(_real_trace(a), _real_trace(b), _real_trace(cross_sqrt), d2)


def bw_distance_sq_matrix(a, b):
    """Squared Bures-Wasserstein distance of two HPD matrices (trace form).

    Small negative values from rounding are clamped to zero.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"need equal square matrices; got {a.shape}, {b.shape}")
    pa = cmat_sqrt_direct(a)
    cmat_sqrt_direct(b)  # PD check on b
    cross_sqrt = cmat_sqrt_direct(hermitian_part(pa @ b @ pa))
    d2 = _real_trace(a) + _real_trace(b) - 2.0 * _real_trace(cross_sqrt)
    if d2 < 0:
        if d2 < -CLAMP_ATOL * max(1.0, _real_trace(a) + _real_trace(b)):
            raise ArithmeticError(f"squared BW distance significantly negative: {d2:.3e}")
        d2 = 0.0
    return d2


def _spectra(a, b):
    a = check_tensor3(a, "a")
    b = check_tensor3(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"tensors differ in shape: {a.shape} vs {b.shape}")
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"need square frontal slices; got {a.shape}")
    ah, bh = dft_mode3(a), dft_mode3(b)
    require_t_positive_definite(ah, hermitian=True, which="a", spectral=True)
    require_t_positive_definite(bh, hermitian=True, which="b", spectral=True)
    return ah, bh


def tbw_report(a, b, strategy="direct", cfg=None, use_symmetry=False):
    """Slice-by-slice Bures-Wasserstein ledger and the total TBW distance.

    With ``use_symmetry=True`` only slices ``0..p//2`` are computed and the
    mirrored ones copied (their quantities are identical for real input).
    """
    ah, bh = _spectra(a, b)
    cfg = cfg or IterationConfig(tolerance=1e-13)
    p = ah.shape[2]
    rows = [None] * p
    for i in range(p):
        if use_symmetry and i > p // 2:
            rows[i] = rows[p - i]
            continue
        try:
            rows[i] = _slice_bw(ah[:, :, i], bh[:, :, i], strategy, cfg)
        except NotPositiveDefiniteError as exc:
            raise NotPositiveDefiniteError(slice_index=i, detail=str(exc)) from exc
    total = math.sqrt(math.fsum(r.d_squared for r in rows))
    return TbwReport(per_slice=rows, total=total)


def tbw_distance(a, b, strategy="direct", cfg=None):
    """Tensor Bures-Wasserstein distance ``sqrt(sum_i d_BW^2(A^(i), B^(i)))``.

    Parameters
    ----------
    a, b : array_like, shape (n, n, p)
        T-positive definite tensors with Hermitian Fourier slices.
    strategy : {"direct", "newton", "db"}
        How the inner matrix square roots are computed.
    """
    return tbw_report(a, b, strategy=strategy, cfg=cfg).total
