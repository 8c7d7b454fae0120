"""Isotropic-covariance approximate filter: LMS with a learned step size.

Constraining the posterior to mean plus a single shared variance turns the
exact O(M^2) recursion into an O(M) one. The scalar variance both sets the
step size (large uncertainty, large steps) and contracts as evidence
accumulates, so the filter anneals on stationary data and keeps adapting
when drift_var > 0. Each step is the KL projection of the exact update
started from the current isotropic belief (see the klproj module).
"""

from __future__ import annotations

import numpy as np

from .model import (
    IsoGaussianState,
    RegressionSample,
    SsmParams,
    StepDetail,
    _check_sample,
)

__all__ = [
    "problms_step",
    "problms_step_ou",
    "lms_map_estimate",
    "predictive_band",
]

# Multiplicative positive recursion: a hard floor keeps var > 0 through
# arbitrarily long stationary runs without distorting any physical scale.
_VAR_FLOOR = 1e-300


def _iso_update(
    mean_pred: np.ndarray,
    s: float,
    x: np.ndarray,
    y: float,
    params: SsmParams,
) -> tuple[IsoGaussianState, StepDetail]:
    """Shared correction step given predictive mean and variance ``s``."""
    x_sq = float(x @ x)
    s_y = s * x_sq + params.obs_noise_var
    eta = s / s_y
    innovation = y - float(x @ mean_pred)

    mean_new = mean_pred + (eta * innovation) * x
    shrink = 1.0 - eta * x_sq / params.dim
    if x_sq > 0:
        assert 0.0 < eta * x_sq < 1.0
    var_new = max(shrink * s, _VAR_FLOOR)

    return (
        IsoGaussianState(mean=mean_new, var=var_new),
        StepDetail(gain=eta, innovation=innovation, predicted_obs_var=s_y),
    )


def problms_step(
    state: IsoGaussianState, sample: RegressionSample, params: SsmParams
) -> tuple[IsoGaussianState, StepDetail]:
    """One observation of the random-walk model, isotropic posterior.

    With s = var + drift_var, the update is

        eta   = s / (s ||x||^2 + obs_noise_var)
        mean' = mean + eta * (y - x . mean) * x
        var'  = (1 - eta ||x||^2 / dim) * s

    i.e. an LMS step whose size eta is the current signal-to-noise ratio
    of the belief. ``params.forgetting`` must be 1 here; use
    :func:`problms_step_ou` for the damped transition.
    """
    if params.forgetting != 1.0:
        raise ValueError(
            "problms_step handles the pure random walk only; "
            "use problms_step_ou for forgetting < 1"
        )
    x, y = _check_sample(sample, params.dim)
    s = state.var + params.drift_var
    return _iso_update(state.mean, s, x, y, params)


def problms_step_ou(
    state: IsoGaussianState, sample: RegressionSample, params: SsmParams
) -> tuple[IsoGaussianState, StepDetail]:
    """Variant of :func:`problms_step` with mean decay toward zero.

    The predictive belief is (lam * mean, lam^2 * var + drift_var); the
    correction is unchanged. At lam = 1 this is exactly problms_step.
    """
    x, y = _check_sample(sample, params.dim)
    lam = params.forgetting
    mean_pred = state.mean if lam == 1.0 else lam * state.mean
    s = (lam * lam) * state.var + params.drift_var
    return _iso_update(mean_pred, s, x, y, params)


def lms_map_estimate(state: IsoGaussianState) -> np.ndarray:
    """Point estimate of the coefficients: the posterior mode, i.e. the mean."""
    return state.mean


def predictive_band(
    state: IsoGaussianState, width: float = 2.0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-coefficient credible band ``mean -/+ width * sqrt(var)``.

    Parameters
    ----------
    width : float
        Band half-width in standard deviations, > 0. Default 2.
    """
    if not width > 0:
        raise ValueError(f"width must be > 0, got {width!r}")
    half = width * np.sqrt(state.var)
    return state.mean - half, state.mean + half
