"""Iterative principal T-square roots: Newton and Denman-Beavers.

Both solvers run slice-wise in the Fourier domain.  The residual reported
at iteration ``k`` is the Fourier-domain quantity

    r_k = sqrt(sum_i ||X_k^(i) X_k^(i) - A^(i)||_F^2)

summed over slices in index order, with no ``1/p`` correction.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ortho_group, unitary_group

from .algebra import require_t_positive_definite, sqrt_spectral
from .exceptions import DimensionMismatchError, SingularSliceError
from .fourier import check_tensor3, cmat_inv, dft_mode3, hermitian_part, idft_mode3, slice_condition_number


@dataclass
class IterationConfig:
    """Solver controls.

    ``symmetrize`` replaces every iterate slice by its Hermitian part after
    each update.  It is off by default: it is only meaningful for Hermitian
    input slices, and it damps the post-convergence error growth of the
    Newton iteration that the stability study measures.
    """

    max_iterations: int = 50
    tolerance: float = 1e-12
    early_stop: bool = True
    symmetrize: bool = False

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be >= 0")
        self.max_iterations = int(self.max_iterations)


@dataclass
class ConvergenceTrace:
    residuals: list
    rho: list
    q: list
    converged: bool
    iterations_run: int
    inverse_residuals: list | None = None

    @classmethod
    def from_residuals(cls, residuals, converged, inverse_residuals=None):
        rho, q = convergence_ratios(residuals) if len(residuals) >= 2 else ([], [])
        return cls(
            residuals=list(map(float, residuals)),
            rho=list(rho),
            q=list(q),
            converged=bool(converged),
            iterations_run=len(residuals) - 1,
            inverse_residuals=None if inverse_residuals is None else list(map(float, inverse_residuals)),
        )

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "residual", "rho", "q"])
        for k, r in enumerate(self.residuals):
            if k == 0:
                w.writerow([0, repr(r), "", ""])
            else:
                rho, q = self.rho[k - 1], self.q[k - 1]
                w.writerow([k, repr(r), _fmt(rho), _fmt(q)])
        return buf.getvalue()


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


@dataclass
class SqrtSolution:
    sqrt: np.ndarray
    trace: ConvergenceTrace
    inv_sqrt: np.ndarray | None = None


def convergence_ratios(residuals):
    """First- and second-order ratios ``r_k/r_{k-1}`` and ``r_k/r_{k-1}**2``.

    Positions where ``r_{k-1} == 0`` hold ``nan``.
    """
    r = [float(x) for x in residuals]
    if len(r) < 2:
        raise ValueError("need at least two residuals")
    rho, q = [], []
    for prev, cur in zip(r[:-1], r[1:]):
        if prev == 0.0:
            rho.append(math.nan)
            q.append(math.nan)
        else:
            rho.append(cur / prev)
            q.append(cur / prev**2)
    return rho, q


def spectral_residual(ah, xh):
    total = 0.0
    for i in range(ah.shape[2]):
        x = xh[:, :, i]
        total += float(np.linalg.norm(x @ x - ah[:, :, i]) ** 2)
    return math.sqrt(total)


def spectral_inverse_residual(xh, yh):
    n = xh.shape[0]
    eye = np.eye(n)
    total = 0.0
    for i in range(xh.shape[2]):
        total += float(np.linalg.norm(yh[:, :, i] @ xh[:, :, i] - eye) ** 2)
    return math.sqrt(total)


def residual(a, x):
    """Fourier-domain square-root residual of ``x`` against ``a``."""
    a = check_tensor3(a, "a")
    x = check_tensor3(x, "x")
    if a.shape != x.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"residual needs equal square shapes; got {a.shape}, {x.shape}")
    return spectral_residual(dft_mode3(a), dft_mode3(x))


def _prepare(a):
    a = check_tensor3(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square root needs square slices; got {a.shape}")
    ah = dft_mode3(a)
    require_t_positive_definite(ah, spectral=True)
    return ah


def _inv_slice(m, slice_index, iteration, residuals):
    try:
        return cmat_inv(m)
    except SingularSliceError as exc:
        partial = ConvergenceTrace.from_residuals(residuals, converged=False)
        raise SingularSliceError(slice_index, iteration, trace=partial, detail=str(exc)) from exc


def newton_spectral(ah, cfg=None, callback=None):
    """Newton iteration on a spectral tensor; returns ``(x_hat, trace)``.

    ``callback(k, x_hat)`` is invoked for every iterate including ``k = 0``.
    """
    cfg = cfg or IterationConfig()
    p = ah.shape[2]
    x = np.array(ah, dtype=complex)
    residuals = [spectral_residual(ah, x)]
    if callback is not None:
        callback(0, x)
    converged = cfg.early_stop and residuals[0] < cfg.tolerance
    k = 0
    while not converged and k < cfg.max_iterations:
        k += 1
        new = np.empty_like(x)
        for i in range(p):
            inv = _inv_slice(x[:, :, i], i, k, residuals)
            # A X^{-1}: inverse first, then left-multiply (no commuting shortcut)
            upd = 0.5 * (x[:, :, i] + ah[:, :, i] @ inv)
            new[:, :, i] = hermitian_part(upd) if cfg.symmetrize else upd
        x = new
        residuals.append(spectral_residual(ah, x))
        if callback is not None:
            callback(k, x)
        if cfg.early_stop and residuals[-1] < cfg.tolerance:
            converged = True
    if not cfg.early_stop:
        converged = residuals[-1] < cfg.tolerance
    return x, ConvergenceTrace.from_residuals(residuals, converged)


def db_spectral(ah, cfg=None, callback=None):
    """Denman-Beavers iteration on a spectral tensor; returns ``(x_hat, y_hat, trace)``.

    ``callback(k, x_hat, y_hat)`` is invoked for every iterate.
    """
    cfg = cfg or IterationConfig()
    n, _, p = ah.shape
    x = np.array(ah, dtype=complex)
    y = np.repeat(np.eye(n, dtype=complex)[:, :, np.newaxis], p, axis=2)
    residuals = [spectral_residual(ah, x)]
    inv_res = [spectral_inverse_residual(x, y)]
    if callback is not None:
        callback(0, x, y)
    converged = cfg.early_stop and residuals[0] < cfg.tolerance
    k = 0
    while not converged and k < cfg.max_iterations:
        k += 1
        x_new = np.empty_like(x)
        y_new = np.empty_like(y)
        for i in range(p):
            y_inv = _inv_slice(y[:, :, i], i, k, residuals)
            x_inv = _inv_slice(x[:, :, i], i, k, residuals)
            xu = 0.5 * (x[:, :, i] + y_inv)
            yu = 0.5 * (y[:, :, i] + x_inv)
            if cfg.symmetrize:
                xu, yu = hermitian_part(xu), hermitian_part(yu)
            x_new[:, :, i] = xu
            y_new[:, :, i] = yu
        x, y = x_new, y_new
        residuals.append(spectral_residual(ah, x))
        inv_res.append(spectral_inverse_residual(x, y))
        if callback is not None:
            callback(k, x, y)
        if cfg.early_stop and residuals[-1] < cfg.tolerance:
            converged = True
    if not cfg.early_stop:
        converged = residuals[-1] < cfg.tolerance
    return x, y, ConvergenceTrace.from_residuals(residuals, converged, inverse_residuals=inv_res)


def newton_tsqrt(a, cfg=None, callback=None):
    """Principal T-square root by the Newton iteration started at ``X_0 = A``.

    Parameters
    ----------
    a : array_like, shape (n, n, p)
        T-positive definite tensor.
    cfg : IterationConfig, optional
    callback : callable, optional
        ``callback(k, x_hat)`` with the spectral iterate, for diagnostics.

    Returns
    -------
    SqrtSolution
        ``inv_sqrt`` is ``None``.

    Raises
    ------
    NotPositiveDefiniteError
        If ``a`` is not T-positive definite.
    SingularSliceError
        If an iterate slice becomes numerically singular; ``exc.trace``
        holds the residuals up to that point.
    """
    ah = _prepare(a)
    xh, trace = newton_spectral(ah, cfg, callback)
    return SqrtSolution(sqrt=idft_mode3(xh), trace=trace)


def db_tsqrt(a, cfg=None, callback=None):
    """Principal T-square root and its inverse by Denman-Beavers.

    Started at ``X_0 = A``, ``Y_0 = I``; both updates of an iteration use
    the previous pair.  Same errors as :func:`newton_tsqrt`.
    """
    ah = _prepare(a)
    xh, yh, trace = db_spectral(ah, cfg, callback)
    return SqrtSolution(sqrt=idft_mode3(xh), inv_sqrt=idft_mode3(yh), trace=trace)


def direct_tsqrt(a, cfg=None):
    """Direct per-slice factorization wrapped as a :class:`SqrtSolution`."""
    del cfg  # no iteration controls; accepted for a uniform dispatch signature
    ah = _prepare(a)
    xh = sqrt_spectral(ah)
    yh = sqrt_spectral(ah, inverse=True)
    trace = ConvergenceTrace.from_residuals([spectral_residual(ah, xh)], converged=True)
    return SqrtSolution(sqrt=idft_mode3(xh), inv_sqrt=idft_mode3(yh), trace=trace)


def spectral_sqrt_pair(ah, method="db", cfg=None, symmetrize=None):
    """``(sqrt, inverse sqrt)`` of a spectral tensor for use inside applications.

    Iterative methods stop at a tolerance relative to ``||A_hat||_F`` and
    return the best iterate seen, so a post-convergence Newton drift cannot
    leak into downstream results.  ``symmetrize`` defaults to whether every
    input slice is Hermitian.
    """
    ah = np.asarray(ah, dtype=complex)
    if method == "direct":
        return sqrt_spectral(ah), sqrt_spectral(ah, inverse=True)
    cfg = cfg or IterationConfig()
    if symmetrize is None:
        symmetrize = all(
            np.max(np.abs(ah[:, :, i] - ah[:, :, i].conj().T)) <= 1e-10 * max(1.0, np.max(np.abs(ah[:, :, i])))
            for i in range(ah.shape[2])
        )
    scale = float(np.linalg.norm(ah))
    run_cfg = IterationConfig(
        max_iterations=cfg.max_iterations,
        tolerance=max(cfg.tolerance, 4 * np.finfo(float).eps) * scale,
        early_stop=cfg.early_stop,
        symmetrize=symmetrize,
    )
    best = {"r": math.inf}

    def keep_best(k, x, y=None):
        r = spectral_residual(ah, x)
        if r < best["r"]:
            best.update(r=r, x=x.copy(), y=None if y is None else y.copy())

    if method == "newton":
        newton_spectral(ah, run_cfg, keep_best)
        x = best["x"]
        y = np.stack([cmat_inv(x[:, :, i]) for i in range(x.shape[2])], axis=2)
    elif method == "db":
        db_spectral(ah, run_cfg, keep_best)
        x, y = best["x"], best["y"]
    else:
        raise ValueError(f"unknown method {method!r}; expected 'newton', 'db' or 'direct'")
    if symmetrize:
        x = np.stack([hermitian_part(x[:, :, i]) for i in range(x.shape[2])], axis=2)
        y = np.stack([hermitian_part(y[:, :, i]) for i in range(y.shape[2])], axis=2)
    return x, y


METHODS = {"newton": newton_tsqrt, "db": db_tsqrt, "direct": direct_tsqrt}


def tsqrt(a, method="db", cfg=None):
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}") from None
    return fn(a, cfg)


# ----------------------------------------------------------------------------
# diagnostics
# ----------------------------------------------------------------------------

def spectral_eigen_range(a):
    """``(lam_min, lam_max)`` over the Hermitian parts of all Fourier slices."""
    ah = dft_mode3(check_tensor3(a))
    lo, hi = math.inf, -math.inf
    for i in range(ah.shape[2]):
        w = np.linalg.eigvalsh(hermitian_part(ah[:, :, i]))
        lo, hi = min(lo, float(w[0])), max(hi, float(w[-1]))
    return lo, hi


def max_slice_condition_number(a):
    ah = dft_mode3(check_tensor3(a))
    return max(slice_condition_number(ah[:, :, i]) for i in range(ah.shape[2]))


def newton_quadratic_constant(a):
    """``0.5 * sqrt(lam_max) / lam_min`` over all Fourier slices."""
    lo, hi = spectral_eigen_range(a)
    return 0.5 * math.sqrt(hi) / lo


def residual_floor(a, factor=100.0):
    """Rounding floor ``factor * eps * ||A_hat||_F`` below which residuals are noise."""
    ah = dft_mode3(check_tensor3(a))
    return factor * float(np.finfo(float).eps) * float(np.linalg.norm(ah))


def prefloor_q(residuals, floor):
    """Second-order ratios ``q_k`` before the residual first reaches the floor.

    The effective floor is the larger of ``floor`` and the smallest
    residual the run attains (an unstable iteration can bottom out above
    the rounding floor).  The run is cut at the first ``r_k`` at or below
    it; later ratios (rounding noise, post-convergence regrowth) are not
    part of the convergence phase.
    """
    r = np.asarray(residuals, dtype=float)
    finite = r[np.isfinite(r)]
    floor = max(float(floor), float(finite.min()) if finite.size else float(floor))
    out = []
    for k in range(1, len(r)):
        if not (r[k] > floor and r[k - 1] > floor):
            break
        out.append(r[k] / r[k - 1] ** 2)
    return out


def make_conditioned_spd_tensor(n, p, kappa, seed):
    """Real T-symmetric T-PD tensor whose Fourier slices all have condition ``kappa``.

    Each independent Fourier slice is ``Q diag(lam) Q^H`` with ``lam``
    log-spaced on ``[1, kappa]`` and Haar-random ``Q`` (orthogonal for the
    real DC/Nyquist slices, unitary otherwise); mirrored slices are
    conjugates so the spatial tensor is real.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if p < 1:
        raise ValueError("p must be >= 1")
    if not kappa >= 1:
        raise ValueError("kappa must be >= 1")
    rng = np.random.default_rng(seed)
    lam = np.logspace(0.0, math.log10(kappa), n)
    ah = np.zeros((n, n, p), dtype=complex)
    for i in range(p // 2 + 1):
        if i == 0 or 2 * i == p:
            q = ortho_group.rvs(n, random_state=rng)
        else:
            q = unitary_group.rvs(n, random_state=rng)
        ah[:, :, i] = hermitian_part((q * lam) @ q.conj().T)
        if i == 0 or 2 * i == p:
            ah[:, :, i] = ah[:, :, i].real
    for i in range(p // 2 + 1, p):
        ah[:, :, i] = np.conj(ah[:, :, p - i])
    return idft_mode3(ah)


def random_tpd_tensor(n, p, seed, kappa_max=10.0):
    """Seeded T-PD tensor with a random condition number in ``[1, kappa_max]``."""
    rng = np.random.default_rng(seed)
    kappa = float(np.exp(rng.uniform(0.0, math.log(kappa_max))))
    scale = float(np.exp(rng.uniform(-1.0, 1.0)))
    return scale * make_conditioned_spd_tensor(n, p, kappa, int(rng.integers(2**31)))


# ----------------------------------------------------------------------------
# stability harness
# ----------------------------------------------------------------------------

@dataclass
class MethodStability:
    residuals: np.ndarray
    r_min: float
    argmin: int
    final_over_min: float
    growth_per_iteration: float
    failed_at: int | None = None


@dataclass
class StabilityReport:
    iterations: int
    newton: MethodStability
    db: MethodStability
    kappa: float = field(default=math.nan)

    def rows(self):
        for k in range(self.iterations + 1):
            yield k, float(self.newton.residuals[k]), float(self.db.residuals[k])


def _summarize(residuals, failed_at):
    r = np.asarray(residuals, dtype=float)
    finite = np.where(np.isfinite(r), r, np.inf)
    argmin = int(np.argmin(finite))
    r_min = float(finite[argmin])
    r_final = float(r[-1])
    if r_min == 0.0:
        ratio = 1.0 if r_final == 0.0 else math.inf
    else:
        ratio = r_final / r_min
    steps = len(r) - 1 - argmin
    if steps <= 0 or ratio <= 0:
        growth = 1.0
    elif not math.isfinite(ratio):
        growth = math.inf
    else:
        growth = ratio ** (1.0 / steps)
    return MethodStability(r, r_min, argmin, ratio, growth, failed_at)


def stability_experiment(a, iterations):
    """Run Newton and DB for exactly ``iterations`` steps without early stopping.

    A slice that becomes singular ends that method's run; its residual is
    recorded as ``inf`` from that iteration on.
    """
    ah = _prepare(a)
    cfg = IterationConfig(max_iterations=iterations, tolerance=0.0, early_stop=False)
    out = {}
    for name in ("newton", "db"):
        failed_at = None
        try:
            if name == "newton":
                _, trace = newton_spectral(ah, cfg)
            else:
                _, _, trace = db_spectral(ah, cfg)
            res = trace.residuals
        except SingularSliceError as exc:
            failed_at = exc.iteration
            res = list(exc.trace.residuals) + [math.inf] * (iterations + 1 - len(exc.trace.residuals))
        out[name] = _summarize(res, failed_at)
    return StabilityReport(iterations=iterations, newton=out["newton"], db=out["db"],
                           kappa=max_slice_condition_number(a))


def stability_sweep(kappas, n=3, p=3, iterations=20, seed=0):
    """:func:`stability_experiment` on one seeded synthetic tensor per ``kappa``."""
    return [stability_experiment(make_conditioned_spd_tensor(n, p, float(k), seed), iterations) for k in kappas]


SWEEP_HEADER = [
    "kappa",
    "newton_r_min",
    "newton_ratio",
    "newton_growth",
    "newton_argmin",
    "db_r_min",
    "db_ratio",
    "db_growth",
    "db_argmin",
]


def sweep_csv(kappas, reports):
    """CSV text of a stability sweep; ratios are ``r_final / r_min``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for kappa, rep in zip(kappas, reports):
        row = [repr(float(kappa))]
        for m in (rep.newton, rep.db):
            row += [repr(m.r_min), repr(m.final_over_min), repr(m.growth_per_iteration), m.argmin]
        w.writerow(row)
    return buf.getvalue()
