"""Scenario generation and CSV ingestion for the benchmark harness.

A :class:`Scenario` bundles the per-step ground-truth coefficients (possibly
empty, for real recordings), the regressor/observation stream, the
generating model parameters when known, and the seed that produced it.
Generators are pure functions of their arguments: the same call yields a
bit-identical scenario on any platform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .model import RegressionSample, SsmParams

__all__ = [
    "Scenario",
    "gen_stationary",
    "gen_random_walk",
    "load_tracking_csv",
    "write_tracking_csv",
]


@dataclass(frozen=True)
class Scenario:
    """One benchmark data stream.

    truth has shape (n_steps, m), or (0, m) when ground truth is unknown;
    regressors has shape (n_steps, m); observations has shape (n_steps,).
    params_hint carries the generating model when the scenario is synthetic,
    None for ingested recordings whose generating process is unknown.
    """

    truth: np.ndarray
    regressors: np.ndarray
    observations: np.ndarray
    params_hint: SsmParams | None = None
    seed: int | None = None

    def __post_init__(self):
        n, m = self.regressors.shape
        if self.observations.shape != (n,):
            raise ValueError(
                f"observations shape {self.observations.shape} does not match {n} steps"
            )
        if self.truth.size and self.truth.shape != (n, m):
            raise ValueError(
                f"truth shape {self.truth.shape} does not match regressors {(n, m)}"
            )

    def __len__(self) -> int:
        return self.regressors.shape[0]

    @property
    def dim(self) -> int:
        return self.regressors.shape[1]

    @property
    def has_truth(self) -> bool:
        return self.truth.size > 0

    @property
    def samples(self) -> list[RegressionSample]:
        return [
            RegressionSample(regressor=x, observation=float(y))
            for x, y in zip(self.regressors, self.observations)
        ]


def _noise_var_from_snr(snr_db: float) -> float:
    # Signal power is exactly 1 because the truth is normalized to unit norm
    # and regressors are standard normal, so SNR fixes the noise variance alone.
    return 10.0 ** (-snr_db / 10.0)


def _unit_truth(rng: np.random.Generator, m: int) -> np.ndarray:
    w = rng.uniform(-1.0, 1.0, size=m)
    return w / np.linalg.norm(w)


def gen_stationary(m: int, snr_db: float, n_steps: int, seed: int) -> Scenario:
    """Fixed unknown coefficients observed through Gaussian regressors.

    The truth is drawn uniformly on [-1, 1]^m and normalized to unit norm;
    regressors are i.i.d. N(0, I); observation noise variance is
    10^(-snr_db/10), which equals the noise power at the stated SNR because
    the unit-norm truth makes the signal power exactly 1.
    """
    if m < 1 or n_steps < 1:
        raise ValueError(f"m and n_steps must be >= 1, got m={m}, n_steps={n_steps}")
    rng = np.random.default_rng(seed)
    w_true = _unit_truth(rng, m)
    x = rng.standard_normal((n_steps, m))
    noise_var = _noise_var_from_snr(snr_db)
    y = x @ w_true + np.sqrt(noise_var) * rng.standard_normal(n_steps)
    return Scenario(
        truth=np.tile(w_true, (n_steps, 1)),
        regressors=x,
        observations=y,
        params_hint=SsmParams(
            dim=m, obs_noise_var=noise_var, drift_var=0.0, prior_var=1.0 / m
        ),
        seed=seed,
    )


def gen_random_walk(
    m: int,
    snr_db: float,
    drift_var: float,
    n_steps: int,
    seed: int,
    regressor_kind: str = "iid",
) -> Scenario:
    """Coefficients drifting as a random walk with per-coordinate variance drift_var.

    regressor_kind selects i.i.d. Gaussian vectors ("iid") or a tapped-delay
    line over an i.i.d. scalar stream ("shift"), where x_k[j] = u_{k-j} with
    zero padding before the stream starts. drift_var = 0 reduces to the
    stationary generator's dynamics (constant truth).
    """
    if m < 1 or n_steps < 1:
        raise ValueError(f"m and n_steps must be >= 1, got m={m}, n_steps={n_steps}")
    if drift_var < 0:
        raise ValueError(f"drift_var must be >= 0, got {drift_var!r}")
    if regressor_kind not in ("iid", "shift"):
        raise ValueError(f"regressor_kind must be 'iid' or 'shift', got {regressor_kind!r}")

    rng = np.random.default_rng(seed)
    w0 = _unit_truth(rng, m)
    if drift_var > 0:
        steps = np.sqrt(drift_var) * rng.standard_normal((n_steps, m))
        steps[0] = 0.0
        truth = w0 + np.cumsum(steps, axis=0)
    else:
        truth = np.tile(w0, (n_steps, 1))

    if regressor_kind == "iid":
        x = rng.standard_normal((n_steps, m))
    else:
        u = rng.standard_normal(n_steps)
        padded = np.concatenate([np.zeros(m - 1), u])
        # x[k, j] = u[k - j]; column j is the input stream delayed by j steps
        x = np.stack([padded[m - 1 - j : m - 1 - j + n_steps] for j in range(m)], axis=1)

    noise_var = _noise_var_from_snr(snr_db)
    y = np.einsum("ij,ij->i", x, truth) + np.sqrt(noise_var) * rng.standard_normal(n_steps)
    return Scenario(
        truth=truth,
        regressors=x,
        observations=y,
        params_hint=SsmParams(
            dim=m, obs_noise_var=noise_var, drift_var=drift_var, prior_var=1.0 / m
        ),
        seed=seed,
    )


def write_tracking_csv(scenario: Scenario, path) -> None:
    """Write a scenario in the format :func:`load_tracking_csv` reads.

    Floats are emitted with ``repr``, whose shortest round-trip form makes
    write-then-read bit-exact.
    """
    m = scenario.dim
    header = ["k", "y"] + [f"x_{j}" for j in range(m)]
    if scenario.has_truth:
        header += [f"w_{j}" for j in range(m)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(len(scenario)):
            row = [str(k), repr(float(scenario.observations[k]))]
            row += [repr(float(v)) for v in scenario.regressors[k]]
            if scenario.has_truth:
                row += [repr(float(v)) for v in scenario.truth[k]]
            writer.writerow(row)


def load_tracking_csv(path) -> Scenario:
    """Read a recorded tracking stream.

    Expected header: ``k,y,x_0,...,x_{M-1}`` with optional trailing
    ``w_0,...,w_{M-1}`` truth columns; one row per time step. Returns a
    Scenario with empty truth when the w columns are absent and
    params_hint=None (the generating model is unknown).

    Raises
    ------
    FileNotFoundError
        If path does not exist.
    ValueError
        On a malformed header or row (the message names the line number).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        x_cols = [h for h in header if h.startswith("x_")]
        w_cols = [h for h in header if h.startswith("w_")]
        m = len(x_cols)
        if header[:2] != ["k", "y"] or m == 0 or len(w_cols) not in (0, m):
            raise ValueError(f"{path}: header must be k,y,x_0..x_{{M-1}}[,w_0..w_{{M-1}}]")
        expected = ["k", "y"] + [f"x_{j}" for j in range(m)] + [f"w_{j}" for j in range(len(w_cols))]
        if header != expected:
            raise ValueError(f"{path}: unexpected column order {header}")

        xs, ys, ws = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                vals = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            ys.append(vals[0])
            xs.append(vals[1 : 1 + m])
            if w_cols:
                ws.append(vals[1 + m :])

    x = np.asarray(xs, dtype=float).reshape(len(ys), m)
    truth = np.asarray(ws, dtype=float).reshape(len(ws), m) if ws else np.empty((0, m))
    return Scenario(
        truth=truth,
        regressors=x,
        observations=np.asarray(ys, dtype=float),
        params_hint=None,
        seed=None,
    )
