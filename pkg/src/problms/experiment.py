"""Monte Carlo experiment harness: config, algorithm registry, runner, reports.

A run is (scenario recipe) x (algorithm list) x (n_trials seeds). Trials are
independent work units; each one regenerates its scenario from a per-trial
seed and drives every configured algorithm over the same data stream. The
reduction across trials is a plain sum in trial-index order, so the output
is bit-identical at any worker count.

Per-trial seeds: trial i uses the i-th 64-bit word of
``numpy.random.SeedSequence(master_seed).generate_state(n_trials, uint64)``,
which makes any single trial reproducible in isolation.
"""

from __future__ import annotations

import csv
import multiprocessing
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import baselines, isotropic
from .exact import exact_step
from .metrics import MsdCurve, steady_state_msd_db
from .model import RegressionSample, SsmParams, prior_full, prior_iso
from .synth import Scenario, gen_random_walk, gen_stationary, load_tracking_csv

__all__ = [
    "AlgoSpec",
    "ExperimentConfig",
    "UsageError",
    "DataError",
    "parse_config_file",
    "build_config",
    "list_algorithms",
    "run_experiment",
    "BAND_WIDTH",
]

# Credible-band half-width, in standard deviations, used for coverage
# reporting and the band plot.
BAND_WIDTH = 2.0


class UsageError(Exception):
    """Bad flags or config keys; the caller's mistake."""


class DataError(Exception):
    """Missing or malformed input data, or an unwritable output location."""


@dataclass(frozen=True)
class AlgoSpec:
    """One algorithm to run: display label, registry name, parameter overrides."""

    label: str
    algo: str
    params: dict

    def param(self, name: str, default):
        return self.params.get(name, default)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; value object, safe to ship to worker processes."""

    kind: str = "stationary"  # stationary | randomwalk | csv
    m: int = 50
    snr_db: float = 20.0
    drift_var: float = 0.0
    regressor_kind: str = "iid"
    n_steps: int = 10_000
    n_trials: int = 50
    seed: int = 0
    csv_path: Optional[str] = None
    algos: tuple = ()
    out_dir: str = "results"
    window: Optional[int] = None  # None -> final 10% of steps
    workers: int = 1
    # Model parameters handed to the probabilistic filters when the scenario
    # carries no generating-parameter hint (i.e. ingested CSV data).
    assumed_noise_var: Optional[float] = None
    assumed_drift_var: float = 0.0

    def resolved_window(self, n_steps: int) -> int:
        if self.window is not None:
            return self.window
        return max(1, n_steps // 10)


# ---------------------------------------------------------------------------
# Algorithm registry


class TrialTrace(NamedTuple):
    """Per-step reductions from one algorithm over one trial.

    Arrays are length n_steps; fields are None where the quantity does not
    exist (no truth -> no sq_dev/cover; non-probabilistic -> no eta/var).
    weights is the full (n_steps, m) trajectory, kept for trial 0 only.
    """

    sq_dev: Optional[np.ndarray]
    sq_err: np.ndarray
    eta: Optional[np.ndarray]
    var: Optional[np.ndarray]
    cover: Optional[np.ndarray]
    weights: Optional[np.ndarray]


def _drive_baseline(
    scenario: Scenario,
    step_fn: Callable[[baselines.BaselineState, RegressionSample], baselines.BaselineState],
    keep_weights: bool,
) -> TrialTrace:
    n, m = scenario.regressors.shape
    state = baselines.BaselineState(weights=np.zeros(m))
    sq_dev = np.empty(n) if scenario.has_truth else None
    sq_err = np.empty(n)
    weights = np.empty((n, m)) if keep_weights else None
    for k in range(n):
        x = scenario.regressors[k]
        y = scenario.observations[k]
        e = y - float(x @ state.weights)
        sq_err[k] = e * e
        state = step_fn(state, RegressionSample(x, y))
        if sq_dev is not None:
            d = scenario.truth[k] - state.weights
            sq_dev[k] = float(d @ d)
        if weights is not None:
            weights[k] = state.weights
    return TrialTrace(sq_dev, sq_err, None, None, None, weights)


def _drive_iso(
    scenario: Scenario, params: SsmParams, keep_weights: bool
) -> TrialTrace:
    step = (
        isotropic.problms_step
        if params.forgetting == 1.0
        else isotropic.problms_step_ou
    )
    n, m = scenario.regressors.shape
    state = prior_iso(params)
    sq_dev = np.empty(n) if scenario.has_truth else None
    cover = np.empty(n) if scenario.has_truth else None
    sq_err = np.empty(n)
    eta = np.empty(n)
    var = np.empty(n)
    weights = np.empty((n, m)) if keep_weights else None
    for k in range(n):
        sample = RegressionSample(scenario.regressors[k], scenario.observations[k])
        state, detail = step(state, sample, params)
        sq_err[k] = detail.innovation * detail.innovation
        eta[k] = detail.gain
        var[k] = state.var
        if sq_dev is not None:
            d = scenario.truth[k] - state.mean
            sq_dev[k] = float(d @ d)
            half = BAND_WIDTH * np.sqrt(state.var)
            cover[k] = float(np.mean(np.abs(d) <= half))
        if weights is not None:
            weights[k] = state.mean
    return TrialTrace(sq_dev, sq_err, eta, var, cover, weights)


def _drive_exact(
    scenario: Scenario, params: SsmParams, keep_weights: bool
) -> TrialTrace:
    n, m = scenario.regressors.shape
    state = prior_full(params)
    sq_dev = np.empty(n) if scenario.has_truth else None
    sq_err = np.empty(n)
    weights = np.empty((n, m)) if keep_weights else None
    for k in range(n):
        sample = RegressionSample(scenario.regressors[k], scenario.observations[k])
        state, detail = exact_step(state, sample, params)
        sq_err[k] = detail.innovation * detail.innovation
        if sq_dev is not None:
            d = scenario.truth[k] - state.mean
            sq_dev[k] = float(d @ d)
        if weights is not None:
            weights[k] = state.mean
    return TrialTrace(sq_dev, sq_err, None, None, None, weights)


def _model_params(spec: AlgoSpec, scenario: Scenario, config: ExperimentConfig) -> SsmParams:
    base = scenario.params_hint
    if base is None:
        if config.assumed_noise_var is None:
            raise DataError(
                f"algorithm '{spec.label}' needs model parameters, but the scenario "
                "carries none; set assumed_noise_var (and assumed_drift_var) in the config"
            )
        base = SsmParams(
            dim=scenario.dim,
            obs_noise_var=config.assumed_noise_var,
            drift_var=config.assumed_drift_var,
        )
    noise_scale = float(spec.param("noise_scale", 1.0))
    if not noise_scale > 0:
        raise UsageError(f"{spec.label}.noise_scale must be > 0, got {noise_scale!r}")
    forgetting = float(spec.param("forgetting", base.forgetting))
    return replace(base, obs_noise_var=base.obs_noise_var * noise_scale, forgetting=forgetting)


def _run_lms(spec, scenario, config, keep):
    mu = float(spec.param("mu", 0.01))
    return _drive_baseline(
        scenario, lambda st, s: baselines.lms_step(st, s, mu), keep
    )


def _run_nlms(spec, scenario, config, keep):
    mu = float(spec.param("mu", 0.5))
    eps = float(spec.param("eps", 1e-8))
    return _drive_baseline(
        scenario, lambda st, s: baselines.nlms_step(st, s, mu, eps), keep
    )


def _run_vss_nlms(spec, scenario, config, keep):
    mu_max = float(spec.param("mu_max", 1.0))
    alpha = float(spec.param("alpha", 0.95))
    c = float(spec.param("c", 1e-4))
    eps = float(spec.param("eps", 1e-8))
    return _drive_baseline(
        scenario,
        lambda st, s: baselines.vss_nlms_step(st, s, mu_max, alpha, c, eps),
        keep,
    )


def _run_rls_classic(spec, scenario, config, keep):
    lam = float(spec.param("lam", 1.0))
    eps_inv = float(spec.param("eps_inv", 0.01))
    return _drive_baseline(
        scenario, lambda st, s: baselines.rls_classic_step(st, s, lam, eps_inv), keep
    )


def _run_problms(spec, scenario, config, keep):
    return _drive_iso(scenario, _model_params(spec, scenario, config), keep)


def _run_exact(spec, scenario, config, keep):
    return _drive_exact(scenario, _model_params(spec, scenario, config), keep)


class AlgorithmDef(NamedTuple):
    kind: str  # baseline | iso | exact
    defaults: dict
    run: Callable


REGISTRY: dict[str, AlgorithmDef] = {
    "lms": AlgorithmDef("baseline", {"mu": 0.01}, _run_lms),
    "nlms": AlgorithmDef("baseline", {"mu": 0.5, "eps": 1e-8}, _run_nlms),
    "vss-nlms": AlgorithmDef(
        "baseline",
        {"mu_max": 1.0, "alpha": 0.95, "c": 1e-4, "eps": 1e-8},
        _run_vss_nlms,
    ),
    "rls-classic": AlgorithmDef(
        "baseline", {"lam": 1.0, "eps_inv": 0.01}, _run_rls_classic
    ),
    "problms": AlgorithmDef(
        "iso", {"noise_scale": 1.0, "forgetting": None}, _run_problms
    ),
    "exact": AlgorithmDef(
        "exact", {"noise_scale": 1.0, "forgetting": None}, _run_exact
    ),
}


def list_algorithms() -> dict[str, dict]:
    """Registry names mapped to their parameter schemas (name -> default)."""
    return {name: dict(d.defaults) for name, d in sorted(REGISTRY.items())}


# ---------------------------------------------------------------------------
# Config parsing


def parse_config_file(path) -> dict[str, str]:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    items: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}: line {lineno}: expected 'key = value'")
        items[key.strip()] = value.strip()
    return items


_SCALAR_KEYS = {
    "kind": str,
    "m": int,
    "snr_db": float,
    "drift_var": float,
    "regressor_kind": str,
    "n_steps": int,
    "n_trials": int,
    "seed": int,
    "csv_path": str,
    "out": str,
    "window": int,
    "workers": int,
    "assumed_noise_var": float,
    "assumed_drift_var": float,
}

_FIELD_FOR_KEY = {"out": "out_dir"}


def build_config(
    items: dict[str, str],
    out: Optional[str] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    algo_names: Optional[list[str]] = None,
) -> ExperimentConfig:
    """Turn raw config items (plus winning CLI flags) into an ExperimentConfig.

    ``algo_names`` replaces the config's algorithm list: each name must be a
    label defined in the config or a bare registry name run with defaults.
    """
    kwargs = {}
    label_params: dict[str, dict] = {}
    labels: list[str] = []
    for key, value in items.items():
        if key == "algos":
            labels = [tok.strip() for tok in value.split(",") if tok.strip()]
            continue
        if "." in key:
            label, _, pname = key.partition(".")
            label_params.setdefault(label, {})[pname] = value
            continue
        if key not in _SCALAR_KEYS:
            raise UsageError(f"unknown config key '{key}'")
        try:
            kwargs[_FIELD_FOR_KEY.get(key, key)] = _SCALAR_KEYS[key](value)
        except ValueError:
            raise UsageError(f"config key '{key}': cannot parse {value!r}") from None

    config_labels = list(labels)
    if algo_names:
        labels = list(algo_names)
    for label in label_params:
        if label not in config_labels and label not in labels:
            raise UsageError(
                f"config sets parameters for '{label}' which is not in the algos list"
            )

    specs = []
    for label in labels:
        raw = dict(label_params.get(label, {}))
        algo = raw.pop("algo", label)
        params = {}
        for pname, pval in raw.items():
            try:
                params[pname] = float(pval)
            except ValueError:
                raise UsageError(
                    f"parameter {label}.{pname}: cannot parse {pval!r}"
                ) from None
        specs.append(AlgoSpec(label=label, algo=algo, params=params))

    if out is not None:
        kwargs["out_dir"] = out
    if seed is not None:
        kwargs["seed"] = seed
    if workers is not None:
        kwargs["workers"] = workers
    return ExperimentConfig(algos=tuple(specs), **kwargs)


def _validate_config(config: ExperimentConfig) -> None:
    if config.kind not in ("stationary", "randomwalk", "csv"):
        raise UsageError(f"kind must be stationary, randomwalk or csv, got {config.kind!r}")
    if config.n_trials < 1 or config.n_steps < 1 or config.m < 1:
        raise UsageError("m, n_steps and n_trials must all be >= 1")
    if config.workers < 1:
        raise UsageError("workers must be >= 1")
    if not config.algos:
        raise UsageError("no algorithms selected; set 'algos' or pass --algo")
    if config.kind == "csv":
        if not config.csv_path:
            raise UsageError("kind=csv needs csv_path")
        if config.n_trials != 1:
            raise UsageError("kind=csv has no sampling dimension; n_trials must be 1")
    seen = set()
    for spec in config.algos:
        if spec.algo not in REGISTRY:
            known = ", ".join(sorted(REGISTRY))
            raise UsageError(
                f"unknown algorithm '{spec.algo}' (label '{spec.label}'); "
                f"known algorithms: {known}"
            )
        if spec.label in seen:
            raise UsageError(f"duplicate algorithm label '{spec.label}'")
        seen.add(spec.label)
        for pname in spec.params:
            if pname not in REGISTRY[spec.algo].defaults:
                valid = ", ".join(sorted(REGISTRY[spec.algo].defaults))
                raise UsageError(
                    f"unknown parameter '{pname}' for algorithm '{spec.algo}' "
                    f"(valid: {valid})"
                )
    if config.window is not None and config.window < 1:
        raise UsageError("window must be >= 1")


# ---------------------------------------------------------------------------
# Trial execution


def _make_scenario(config: ExperimentConfig, trial_seed: int) -> Scenario:
    if config.kind == "stationary":
        return gen_stationary(config.m, config.snr_db, config.n_steps, trial_seed)
    return gen_random_walk(
        config.m,
        config.snr_db,
        config.drift_var,
        config.n_steps,
        trial_seed,
        regressor_kind=config.regressor_kind,
    )


def _trial_worker(payload) -> tuple[dict, Optional[np.ndarray]]:
    index, trial_seed, config, fixed_scenario = payload
    scenario = fixed_scenario if fixed_scenario is not None else _make_scenario(config, trial_seed)
    keep_weights = index == 0
    out = {}
    for spec in config.algos:
        out[spec.label] = REGISTRY[spec.algo].run(spec, scenario, config, keep_weights)
    truth0 = scenario.truth[:, 0].copy() if keep_weights and scenario.has_truth else None
    return out, truth0


def _iter_trial_results(config: ExperimentConfig, fixed_scenario):
    seeds = np.random.SeedSequence(config.seed).generate_state(
        config.n_trials, np.uint64
    )
    payloads = [
        (i, int(seeds[i]), config, fixed_scenario) for i in range(config.n_trials)
    ]
    if config.workers == 1 or config.n_trials == 1:
        for p in payloads:
            yield _trial_worker(p)
        return
    with multiprocessing.Pool(processes=config.workers) as pool:
        # imap preserves submission order, which fixes the reduction order.
        yield from pool.imap(_trial_worker, payloads, chunksize=1)


# ---------------------------------------------------------------------------
# Reports


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: list[str], columns: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([_fmt(v) for v in row])


def _db(linear: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(linear)


def _write_plots(
    out: Path,
    steps: np.ndarray,
    msd_db: dict[str, np.ndarray],
    band: Optional[dict],
) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "problms"
    written = []

    if msd_db:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for label, curve in msd_db.items():
            ax.plot(steps, curve, linewidth=1.1, label=label)
        ax.set_xlabel("step")
        ax.set_ylabel("MSD (dB)")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        path = out / "msd.svg"
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    if band is not None:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        ax.fill_between(
            steps,
            band["lower"],
            band["upper"],
            alpha=0.25,
            linewidth=0,
            label=f"{band['label']} ±{BAND_WIDTH:g} sd",
        )
        ax.plot(steps, band["mean"], linewidth=1.1, label=f"{band['label']} mean")
        if band.get("truth") is not None:
            ax.plot(
                steps, band["truth"], linewidth=1.1, linestyle="--", label="truth"
            )
        ax.set_xlabel("step")
        ax.set_ylabel("coefficient 0")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        path = out / "band.svg"
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    return written


def run_experiment(config: ExperimentConfig) -> dict[str, Path]:
    """Run the configured Monte Carlo experiment and write its report files.

    Writes into ``config.out_dir``: ``msd.csv`` (per-step trial-averaged
    squared deviation, dB, one column per algorithm) and ``summary.csv``
    (steady-state MSD over the trailing window) when the scenario has ground
    truth; ``prediction_error.csv`` (per-step mean squared innovation)
    always; ``uncertainty.csv`` (step size, posterior variance and band
    coverage per step) when a probabilistic isotropic algorithm is present;
    and SVG plots. Returns the written paths keyed by report name.

    Deterministic: (config, seed) fixes every output byte, at any worker
    count.
    """
    _validate_config(config)

    fixed_scenario = None
    if config.kind == "csv":
        try:
            fixed_scenario = load_tracking_csv(config.csv_path)
        except (OSError, ValueError) as exc:
            raise DataError(str(exc)) from None

    out = Path(config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise DataError(f"output directory {out} is not writable: {exc}") from None

    labels = [spec.label for spec in config.algos]
    iso_labels = [s.label for s in config.algos if REGISTRY[s.algo].kind == "iso"]

    sums: dict[str, dict[str, np.ndarray]] = {}
    first_traces: dict[str, TrialTrace] = {}
    truth0 = None
    for index, (result, trial_truth0) in enumerate(
        _iter_trial_results(config, fixed_scenario)
    ):
        if index == 0:
            truth0 = trial_truth0
        for label in labels:
            trace = result[label]
            if index == 0:
                first_traces[label] = trace
                sums[label] = {}
            acc = sums[label]
            for fname in ("sq_dev", "sq_err", "eta", "var", "cover"):
                arr = getattr(trace, fname)
                if arr is None:
                    continue
                if fname in acc:
                    acc[fname] += arr
                else:
                    acc[fname] = arr.copy()

    n = config.n_steps if fixed_scenario is None else len(fixed_scenario)
    steps = np.arange(1, n + 1)
    means = {
        label: {k: v / config.n_trials for k, v in acc.items()}
        for label, acc in sums.items()
    }
    has_truth = "sq_dev" in means[labels[0]]

    written: dict[str, Path] = {}
    msd_db: dict[str, np.ndarray] = {}

    if has_truth:
        msd_db = {label: _db(means[label]["sq_dev"]) for label in labels}
        path = out / "msd.csv"
        _write_csv(
            path,
            ["step"] + labels,
            [steps] + [msd_db[label] for label in labels],
        )
        written["msd"] = path

        window = config.resolved_window(n)
        rows_label, rows_db = [], []
        for label in labels:
            curve = MsdCurve(per_step_msd=means[label]["sq_dev"], n_trials=config.n_trials)
            rows_label.append(label)
            rows_db.append(steady_state_msd_db(curve, window))
        path = out / "summary.csv"
        _write_csv(path, ["algorithm", "steady_state_msd_db"], [rows_label, rows_db])
        written["summary"] = path

    path = out / "prediction_error.csv"
    _write_csv(
        path,
        ["step"] + labels,
        [steps] + [means[label]["sq_err"] for label in labels],
    )
    written["prediction_error"] = path

    if iso_labels:
        header = ["step"]
        cols: list = [steps]
        for label in iso_labels:
            header += [f"{label}_eta", f"{label}_var"]
            cols += [means[label]["eta"], means[label]["var"]]
            if has_truth:
                header.append(f"{label}_coverage")
                cols.append(means[label]["cover"])
        path = out / "uncertainty.csv"
        _write_csv(path, header, cols)
        written["uncertainty"] = path

    band = None
    if iso_labels:
        label = iso_labels[0]
        trace = first_traces[label]
        half = BAND_WIDTH * np.sqrt(trace.var)
        band = {
            "label": label,
            "mean": trace.weights[:, 0],
            "lower": trace.weights[:, 0] - half,
            "upper": trace.weights[:, 0] + half,
            "truth": truth0,
        }

    for plot_path in _write_plots(out, steps, msd_db, band):
        written[f"{plot_path.stem}_plot"] = plot_path

    return written
