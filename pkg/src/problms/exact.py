"""Exact Bayesian inference for the random-walk regression model.

The posterior over the coefficients stays Gaussian, so filtering reduces to
a closed-form recursion on (mean, covariance). For a scalar observation the
update costs O(M^2) per step; this is the reference the cheaper isotropic
filter is measured against. With drift_var = 0 the recursion is the RLS
algorithm with a Bayesian reading of its inverse-correlation matrix.
"""

from __future__ import annotations

import numpy as np

from .model import (
    FullGaussianState,
    RegressionSample,
    SsmParams,
    StepDetail,
    _check_sample,
)

__all__ = ["exact_step", "rls_map_estimate"]


def exact_step(
    state: FullGaussianState, sample: RegressionSample, params: SsmParams
) -> tuple[FullGaussianState, StepDetail]:
    """Advance the full-covariance posterior by one observation.

    Prediction applies the transition (mean scaled by the forgetting factor
    lam, covariance lam^2 * cov + drift_var * I); correction conditions on
    ``y = x . w + noise``. The gain reported in the detail is the matrix
    ``K = P / (x' P x + obs_noise_var)`` with P the predictive covariance,
    so the mean update reads ``mean + innovation * (K @ x)``.

    Returns
    -------
    (FullGaussianState, StepDetail)
        Posterior state and per-step diagnostics.
    """
    x, y = _check_sample(sample, params.dim)
    lam = params.forgetting

    m_pred = state.mean if lam == 1.0 else lam * state.mean
    cov_pred = (lam * lam) * state.cov + params.drift_var * np.eye(params.dim)

    innovation = y - float(x @ m_pred)
    px = cov_pred @ x
    s_y = float(x @ px) + params.obs_noise_var
    gain = cov_pred / s_y

    mean_new = m_pred + (innovation / s_y) * px
    cov_new = cov_pred - np.outer(px, px) / s_y
    cov_new = 0.5 * (cov_new + cov_new.T)

    return (
        FullGaussianState(mean=mean_new, cov=cov_new),
        StepDetail(gain=gain, innovation=innovation, predicted_obs_var=s_y),
    )


def rls_map_estimate(state: FullGaussianState) -> np.ndarray:
    """Point estimate of the coefficients: the posterior mode, i.e. the mean."""
    return state.mean
