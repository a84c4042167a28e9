"""Copula estimation for multivariate regression errors from residual ranks.

Fit each margin's location(-scale) regression, turn the residuals into
pseudo-observations, and estimate a one-parameter copula by maximum
pseudo-likelihood, trimmed pseudo-likelihood or Kendall's tau inversion.
"""

from .copulas import FAMILIES, get_family
from .dataset import ObservationSet, load_csv, save_csv
from .diagnose import check_applicability, classify_beta
from .errors import EstimationError, InputError, ResidCopulaError
from .estimate import (
    EstimateReport,
    TrimPolicy,
    estimate_mple,
    estimate_mple_trimmed,
    estimate_tau_inversion,
    fit_pipeline,
    sandwich_covariance,
    standard_errors,
)
from .marginals import ErrorLaw, MarginalSpec, fit_marginal
from .montecarlo import Scenario, render_table, run_scenario
from .ranks import kendall_tau, pseudo_observations

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "get_family",
    "ObservationSet",
    "load_csv",
    "save_csv",
    "check_applicability",
    "classify_beta",
    "EstimationError",
    "InputError",
    "ResidCopulaError",
    "EstimateReport",
    "TrimPolicy",
    "estimate_mple",
    "estimate_mple_trimmed",
    "estimate_tau_inversion",
    "fit_pipeline",
    "sandwich_covariance",
    "standard_errors",
    "ErrorLaw",
    "MarginalSpec",
    "fit_marginal",
    "Scenario",
    "render_table",
    "run_scenario",
    "kendall_tau",
    "pseudo_observations",
]
