"""Classical adaptive filters the probabilistic ones are benchmarked against.

All steps are pure: they take a :class:`BaselineState` and return a new one.
``aux`` carries whatever memory the algorithm needs beyond the weights and
starts as ``None``; steps that need it (VSS-NLMS, RLS) initialize it lazily
on the first call.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .model import RegressionSample, _check_sample

__all__ = [
    "BaselineState",
    "lms_step",
    "nlms_step",
    "vss_nlms_step",
    "rls_classic_step",
]


class BaselineState(NamedTuple):
    """Weights plus algorithm-specific auxiliary memory.

    aux is ``None`` for LMS/NLMS, the smoothed gradient vector for
    VSS-NLMS, and the inverse-correlation matrix for RLS.
    """

    weights: np.ndarray
    aux: Optional[np.ndarray] = None


def _error(state: BaselineState, x: np.ndarray, y: float) -> float:
    return y - float(x @ state.weights)


def lms_step(state: BaselineState, sample: RegressionSample, mu: float) -> BaselineState:
    """Fixed-step LMS: ``w += mu * e * x``."""
    if not mu > 0:
        raise ValueError(f"mu must be > 0, got {mu!r}")
    x, y = _check_sample(sample, len(state.weights))
    e = _error(state, x, y)
    return BaselineState(weights=state.weights + mu * e * x, aux=state.aux)


def nlms_step(
    state: BaselineState, sample: RegressionSample, mu: float, eps: float = 1e-8
) -> BaselineState:
    """Normalized LMS: ``w += mu * e * x / (eps + ||x||^2)``.

    mu = 1 interpolates the sample exactly (posterior error zero as
    eps -> 0); stability requires mu in (0, 2).
    """
    if not mu > 0:
        raise ValueError(f"mu must be > 0, got {mu!r}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps!r}")
    x, y = _check_sample(sample, len(state.weights))
    e = _error(state, x, y)
    step = mu / (eps + float(x @ x))
    return BaselineState(weights=state.weights + step * e * x, aux=state.aux)


def vss_nlms_step(
    state: BaselineState,
    sample: RegressionSample,
    mu_max: float,
    alpha: float,
    c: float,
    eps: float = 1e-8,
) -> BaselineState:
    """Variable-step NLMS driven by a smoothed projection of the gradient.

    The auxiliary vector tracks ``p = alpha*p + (1-alpha)*x*e/(eps+||x||^2)``;
    the step size ``mu_max * ||p||^2 / (||p||^2 + c)`` grows toward mu_max
    while the error is correlated with the regressor and collapses once only
    noise remains. mu_max bounds the step from above, strictly.
    """
    if not mu_max > 0:
        raise ValueError(f"mu_max must be > 0, got {mu_max!r}")
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha!r}")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c!r}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps!r}")
    x, y = _check_sample(sample, len(state.weights))
    p_prev = state.aux if state.aux is not None else np.zeros(len(state.weights))

    e = _error(state, x, y)
    p = alpha * p_prev + (1.0 - alpha) * (e / (eps + float(x @ x))) * x
    p_sq = float(p @ p)
    mu_k = mu_max * p_sq / (p_sq + c)
    step = mu_k / (eps + float(x @ x))
    return BaselineState(weights=state.weights + step * e * x, aux=p)


def rls_classic_step(
    state: BaselineState, sample: RegressionSample, lam: float, eps_inv: float
) -> BaselineState:
    """Exponentially-weighted RLS with forgetting factor lam.

        g = P x / (lam + x' P x);  w += g e;  P = (P - g x' P) / lam

    The inverse-correlation matrix lives in ``aux`` and is created as
    ``eps_inv * I`` on the first call; eps_inv is ignored afterwards.
    At lam = 1 and matching prior this reproduces the exact filter's mean
    for the drift-free model.
    """
    if not 0 < lam <= 1:
        raise ValueError(f"lam must lie in (0, 1], got {lam!r}")
    if not eps_inv > 0:
        raise ValueError(f"eps_inv must be > 0, got {eps_inv!r}")
    m = len(state.weights)
    x, y = _check_sample(sample, m)
    p_mat = state.aux if state.aux is not None else eps_inv * np.eye(m)

    e = _error(state, x, y)
    px = p_mat @ x
    g = px / (lam + float(x @ px))
    p_new = (p_mat - np.outer(g, px)) / lam
    p_new = 0.5 * (p_new + p_new.T)
    return BaselineState(weights=state.weights + g * e, aux=p_new)
