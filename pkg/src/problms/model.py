"""State-space model definition shared by every filter in this package.

The model: an unknown length-``dim`` coefficient vector ``w_k`` drifts as a
random walk with per-coordinate variance ``drift_var`` (optionally damped by a
forgetting factor toward zero, i.e. an Ornstein-Uhlenbeck step), and each
scalar observation is ``y_k = x_k . w_k + noise`` with noise variance
``obs_noise_var``.  The coefficients start from a zero-mean Gaussian with
per-coordinate variance ``prior_var``.

All types here are plain immutable values; they carry no behaviour beyond
construction and can be shared freely across threads.  Arrays stored inside
them are treated as read-only by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "SsmParams",
    "RegressionSample",
    "FullGaussianState",
    "IsoGaussianState",
    "StepDetail",
    "validate_params",
    "prior_full",
    "prior_iso",
]


@dataclass(frozen=True)
class SsmParams:
    """Hyperparameters of the random-walk regression model.

    Parameters
    ----------
    dim : int
        Filter length (number of coefficients).
    obs_noise_var : float
        Observation noise variance. Must be strictly positive; a noiseless
        observation makes the posterior update singular.
    drift_var : float
        Per-coordinate variance of the coefficient random walk. Zero gives
        the stationary (fixed-coefficient) model.
    prior_var : float, optional
        Variance of the zero-mean isotropic prior on the initial
        coefficients. Defaults to ``drift_var`` when that is positive and
        to 1.0 in the stationary case, where the drift variance alone would
        give a degenerate point prior.
    forgetting : float
        Mean-decay factor of the transition. 1.0 (default) is the pure
        random walk; values in (0, 1) give an Ornstein-Uhlenbeck pull
        toward zero.
    """

    dim: int
    obs_noise_var: float
    drift_var: float = 0.0
    prior_var: float | None = None
    forgetting: float = 1.0

    def __post_init__(self):
        if self.prior_var is None:
            resolved = self.drift_var if self.drift_var > 0 else 1.0
            object.__setattr__(self, "prior_var", float(resolved))


class RegressionSample(NamedTuple):
    """One time step of data: regressor vector and scalar observation."""

    regressor: np.ndarray
    observation: float


class FullGaussianState(NamedTuple):
    """Gaussian belief with a full covariance matrix.

    ``cov`` is maintained symmetric positive semidefinite by the exact
    recursion; it is not re-checked on construction.
    """

    mean: np.ndarray
    cov: np.ndarray


class IsoGaussianState(NamedTuple):
    """Gaussian belief with isotropic covariance ``var * I``."""

    mean: np.ndarray
    var: float


class StepDetail(NamedTuple):
    """Diagnostics emitted by one filter step.

    ``gain`` is the full gain matrix for covariance-tracking steps and the
    scalar step size for isotropic steps.  ``predicted_obs_var`` is the
    variance of the one-step observation prediction and is never below the
    observation noise variance.
    """

    gain: np.ndarray | float
    innovation: float
    predicted_obs_var: float


def _check_sample(sample: RegressionSample, dim: int) -> tuple[np.ndarray, float]:
    """Coerce a sample to (float vector, float scalar), enforcing shape and finiteness."""
    x = np.asarray(sample.regressor, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"regressor shape {x.shape} does not match filter dim {dim}")
    y = float(sample.observation)
    if not np.isfinite(y) or not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    return x, y


def validate_params(params: SsmParams) -> SsmParams:
    """Check every model invariant, returning ``params`` unchanged.

    Raises
    ------
    ValueError
        If any hyperparameter is out of range or non-finite.
    """
    if not isinstance(params.dim, (int, np.integer)) or params.dim < 1:
        raise ValueError(f"dim must be a positive integer, got {params.dim!r}")
    if not np.isfinite(params.obs_noise_var) or params.obs_noise_var <= 0:
        raise ValueError(
            f"obs_noise_var must be finite and > 0, got {params.obs_noise_var!r}"
        )
    if not np.isfinite(params.drift_var) or params.drift_var < 0:
        raise ValueError(
            f"drift_var must be finite and >= 0, got {params.drift_var!r}"
        )
    if not np.isfinite(params.prior_var) or params.prior_var <= 0:
        raise ValueError(
            f"prior_var must be finite and > 0, got {params.prior_var!r}"
        )
    if not np.isfinite(params.forgetting) or not 0 < params.forgetting <= 1:
        raise ValueError(
            f"forgetting must lie in (0, 1], got {params.forgetting!r}"
        )
    return params


def prior_full(params: SsmParams) -> FullGaussianState:
    """Initial full-covariance belief: zero mean, ``prior_var * I``."""
    validate_params(params)
    return FullGaussianState(
        mean=np.zeros(params.dim),
        cov=params.prior_var * np.eye(params.dim),
    )


def prior_iso(params: SsmParams) -> IsoGaussianState:
    """Initial isotropic belief: zero mean, scalar variance ``prior_var``.

    Identical to the trace/dim projection of :func:`prior_full`, since the
    prior is already isotropic.
    """
    validate_params(params)
    return IsoGaussianState(mean=np.zeros(params.dim), var=float(params.prior_var))
