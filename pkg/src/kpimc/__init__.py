"""kpimc: uncertainty quantification for manufacturing KPIs.

Two methods over one workflow: a nonparametric cumulative Monte Carlo
estimator (empirical CDF + inverse-transform sampling) and a
Metropolis-Hastings MCMC fit of Gaussian parameters, compared by the
coverage probability of bootstrap confidence intervals across synthetic
and CSV-derived scenarios.
"""

from .backend import backend_name
from .bootstrap import (
    BootstrapSettings,
    ConfidenceInterval,
    bootstrap_ci,
    ci_for_method_output,
    normal_cdf,
    normal_quantile,
)
from .empirical_mc import (
    EmpiricalCdf,
    build_empirical_cdf,
    cdf_value,
    default_bounds,
    quantile,
    sample_cdf,
)
from .errors import (
    ConfigError,
    EmptyChainError,
    EmptyDatasetError,
    InvalidBoundsError,
    InvalidParameterError,
    KpimcError,
    PipelineError,
    RowError,
    SchemaError,
)
from .experiment import (
    CoverageCell,
    CoverageReport,
    DEFAULT_SEED,
    ScenarioConfig,
    coverage_probability,
    default_suite,
    run_full_comparison,
    run_scenario,
    true_reference_points,
)
from .kpi_data import (
    Dataset,
    NoiseSpec,
    ShiftRecord,
    add_observation_noise,
    efficiencies,
    efficiency,
    generate_normal_dataset,
    generate_skew_shift_dataset,
    parse_shift_csv,
    resample,
    skew_normal_moments,
)
from .mcmc import (
    Chain,
    McmcSettings,
    MhStepOutcome,
    ParamState,
    ProposalSpec,
    log_likelihood_normal,
    log_prior,
    mh_step,
    posterior_summary,
    run_chain,
)
from .rng import RngStream, derive_stream, next_normal, next_uniform, substream

__version__ = "0.1.0"

__all__ = [
    "BootstrapSettings", "Chain", "ConfidenceInterval", "ConfigError",
    "CoverageCell", "CoverageReport", "DEFAULT_SEED", "Dataset",
    "EmpiricalCdf", "EmptyChainError", "EmptyDatasetError",
    "InvalidBoundsError", "InvalidParameterError", "KpimcError",
    "McmcSettings", "MhStepOutcome", "NoiseSpec", "ParamState",
    "PipelineError", "ProposalSpec", "RngStream", "RowError",
    "ScenarioConfig", "SchemaError", "ShiftRecord",
    "add_observation_noise", "backend_name", "bootstrap_ci",
    "build_empirical_cdf", "cdf_value", "ci_for_method_output",
    "coverage_probability", "default_bounds", "default_suite",
    "derive_stream", "efficiencies", "efficiency",
    "generate_normal_dataset", "generate_skew_shift_dataset",
    "log_likelihood_normal", "log_prior", "mh_step", "next_normal",
    "next_uniform", "normal_cdf", "normal_quantile", "parse_shift_csv",
    "posterior_summary", "quantile", "resample", "run_chain",
    "run_full_comparison", "run_scenario", "sample_cdf",
    "skew_normal_moments", "substream", "true_reference_points",
]
