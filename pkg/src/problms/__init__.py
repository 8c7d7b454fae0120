"""Adaptive filtering with tracked uncertainty.

The package pairs an exact Bayesian filter for random-walk regression
(quadratic cost per step) with an isotropic approximation that collapses to
an LMS update whose step size is learned online (linear cost), classical
baselines (LMS, NLMS, VSS-NLMS, RLS), and a deterministic Monte Carlo
benchmark harness with a CLI.
"""

from .baselines import (
    BaselineState,
    lms_step,
    nlms_step,
    rls_classic_step,
    vss_nlms_step,
)
from .exact import exact_step, rls_map_estimate
from .experiment import (
    AlgoSpec,
    ExperimentConfig,
    list_algorithms,
    run_experiment,
)
from .isotropic import (
    lms_map_estimate,
    predictive_band,
    problms_step,
    problms_step_ou,
)
from .klproj import GaussianFull, GaussianIso, kl_full_to_iso, project_isotropic
from .metrics import MsdCurve, coverage, msd_curve, steady_state_msd_db
from .model import (
    FullGaussianState,
    IsoGaussianState,
    RegressionSample,
    SsmParams,
    StepDetail,
    prior_full,
    prior_iso,
    validate_params,
)
from .synth import (
    Scenario,
    gen_random_walk,
    gen_stationary,
    load_tracking_csv,
    write_tracking_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AlgoSpec",
    "BaselineState",
    "ExperimentConfig",
    "FullGaussianState",
    "GaussianFull",
    "GaussianIso",
    "IsoGaussianState",
    "MsdCurve",
    "RegressionSample",
    "Scenario",
    "SsmParams",
    "StepDetail",
    "coverage",
    "exact_step",
    "gen_random_walk",
    "gen_stationary",
    "kl_full_to_iso",
    "list_algorithms",
    "lms_map_estimate",
    "lms_step",
    "load_tracking_csv",
    "msd_curve",
    "nlms_step",
    "predictive_band",
    "prior_full",
    "prior_iso",
    "problms_step",
    "problms_step_ou",
    "project_isotropic",
    "rls_classic_step",
    "rls_map_estimate",
    "run_experiment",
    "steady_state_msd_db",
    "validate_params",
    "vss_nlms_step",
    "write_tracking_csv",
]
