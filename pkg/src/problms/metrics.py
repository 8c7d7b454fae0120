"""Evaluation quantities: deviation curves and uncertainty calibration.

Curves stay in linear scale until reporting; averaging across trials must
happen before the log, so dB conversion is the caller's last step.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

__all__ = ["MsdCurve", "msd_curve", "steady_state_msd_db", "coverage"]


class MsdCurve(NamedTuple):
    """Trial-averaged squared deviation from the truth, per step, linear scale."""

    per_step_msd: np.ndarray
    n_trials: int


def _stacked(trajectories: Sequence[np.ndarray], name: str) -> np.ndarray:
    arr = np.asarray(trajectories, dtype=float)
    if arr.ndim != 3:
        raise ValueError(
            f"{name} must stack to (n_trials, n_steps, m), got shape {arr.shape}"
        )
    return arr


def msd_curve(
    estimates: Sequence[np.ndarray], truths: Sequence[np.ndarray]
) -> MsdCurve:
    """Mean over trials of the squared deviation ``||w_true_k - w_est_k||^2``.

    Both arguments are sequences of (n_steps, m) trajectories, one per
    trial, with identical shapes throughout.
    """
    est = _stacked(estimates, "estimates")
    tru = _stacked(truths, "truths")
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch: estimates {est.shape} vs truths {tru.shape}")
    sq_dev = np.sum((tru - est) ** 2, axis=2)
    return MsdCurve(per_step_msd=sq_dev.mean(axis=0), n_trials=est.shape[0])


def steady_state_msd_db(curve: MsdCurve, window: int) -> float:
    """10*log10 of the mean deviation over the last ``window`` steps."""
    n = len(curve.per_step_msd)
    if not 1 <= window <= n:
        raise ValueError(f"window must lie in [1, {n}], got {window!r}")
    return float(10.0 * np.log10(np.mean(curve.per_step_msd[n - window :])))


def coverage(
    estimate_means: np.ndarray,
    estimate_vars: np.ndarray,
    truths: np.ndarray,
    width: float,
) -> float:
    """Fraction of (step, coordinate) pairs with ``|truth - mean| <= width * sd``.

    estimate_means and truths have shape (n_steps, m); estimate_vars has
    shape (n_steps,), one shared variance per step.
    """
    means = np.asarray(estimate_means, dtype=float)
    tru = np.asarray(truths, dtype=float)
    if means.shape != tru.shape:
        raise ValueError(f"shape mismatch: means {means.shape} vs truths {tru.shape}")
    svar = np.asarray(estimate_vars, dtype=float)
    if svar.shape != means.shape[:1]:
        raise ValueError(
            f"estimate_vars shape {svar.shape} does not match {means.shape[0]} steps"
        )
    if not width > 0:
        raise ValueError(f"width must be > 0, got {width!r}")
    half = width * np.sqrt(svar)[:, None]
    hits = np.abs(tru - means) <= half
    return float(hits.mean())
