"""KL divergence from a full Gaussian to an isotropic one, and its minimizer.

The divergence KL(N(mu1, Sigma1) || N(mu2, var2*I)) has the closed form

    (1/2) { -M + Tr(Sigma1)/var2 + ||mu2 - mu1||^2 / var2
            + M*ln(var2) - ln(det Sigma1) },

minimized over (mu2, var2) at mu2 = mu1, var2 = Tr(Sigma1)/M. The isotropic
filter is this projection applied after every exact update.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["GaussianFull", "GaussianIso", "kl_full_to_iso", "project_isotropic"]

_MAX_CONDITION = 1e12


class GaussianFull(NamedTuple):
    """Gaussian with mean vector and full covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray


class GaussianIso(NamedTuple):
    """Gaussian with mean vector and isotropic covariance ``var * I``."""

    mean: np.ndarray
    var: float


def _checked_cov(p: GaussianFull) -> np.ndarray:
    cov = np.asarray(p.cov, dtype=float)
    m = len(p.mean)
    if cov.shape != (m, m):
        raise ValueError(f"covariance shape {cov.shape} does not match mean length {m}")
    if not np.allclose(cov, cov.T, atol=1e-10):
        raise ValueError("covariance must be symmetric")
    return cov


def kl_full_to_iso(p: GaussianFull, q: GaussianIso) -> float:
    """KL(p || q) in nats for full-covariance p and isotropic q.

    Raises
    ------
    ValueError
        On dimension mismatch, non-positive q.var, or a p.cov that is not
        safely positive definite (condition number above 1e12).
    """
    cov = _checked_cov(p)
    mu1 = np.asarray(p.mean, dtype=float)
    mu2 = np.asarray(q.mean, dtype=float)
    if mu1.shape != mu2.shape:
        raise ValueError(f"mean shapes differ: {mu1.shape} vs {mu2.shape}")
    var2 = float(q.var)
    if not var2 > 0:
        raise ValueError(f"q.var must be > 0, got {q.var!r}")

    eigs = np.linalg.eigvalsh(cov)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > _MAX_CONDITION:
        raise ValueError(
            "covariance is singular or near-singular "
            f"(eigenvalue range [{eigs[0]:.3e}, {eigs[-1]:.3e}])"
        )
    m = len(mu1)
    logdet1 = float(np.sum(np.log(eigs)))
    diff = mu2 - mu1
    kl = 0.5 * (
        -m
        + float(np.trace(cov)) / var2
        + float(diff @ diff) / var2
        + m * np.log(var2)
        - logdet1
    )
    return kl


def project_isotropic(p: GaussianFull) -> GaussianIso:
    """Closest isotropic Gaussian to p in KL(p || .): same mean, var = Tr(cov)/M.

    Accepts any symmetric PSD covariance with positive trace; a zero-trace
    covariance (a point mass) has no isotropic KL minimizer and is rejected.
    """
    cov = _checked_cov(p)
    var = float(np.trace(cov)) / len(p.mean)
    if not var > 0:
        raise ValueError(f"covariance trace must be > 0, got trace/M = {var!r}")
    return GaussianIso(mean=np.asarray(p.mean, dtype=float), var=var)
