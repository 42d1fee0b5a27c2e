"""Seeded synthetic test images."""

from __future__ import annotations

import numpy as np

RHO_RG = 0.83
RHO_RB = 0.68


def correlated_gaussian_image(n, m, seed, rho_rg=RHO_RG, rho_rb=RHO_RB, rho_gb=None, mean=0.5, std=0.12):
    """RGB image whose pixels are i.i.d. Gaussian with the given channel correlations.

    ``rho_gb`` defaults to ``rho_rg * rho_rb`` (G and B conditionally
    independent given R), which keeps the correlation matrix positive
    definite.  Values are clipped to [0, 1]; with the default ``mean`` and
    ``std`` clipping affects about one pixel in 10^4.
    """
    if rho_gb is None:
        rho_gb = rho_rg * rho_rb
    corr = np.array([[1.0, rho_rg, rho_rb], [rho_rg, 1.0, rho_gb], [rho_rb, rho_gb, 1.0]])
    if np.linalg.eigvalsh(corr)[0] <= 0:
        raise ValueError("requested channel correlations are not positive definite")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(corr)
    z = rng.standard_normal((n * m, 3)) @ chol.T
    return np.clip(mean + std * z, 0.0, 1.0).reshape(n, m, 3)


def random_image(n, m, p, seed):
    """Uniform random image in [0, 1]."""
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, m, p))
