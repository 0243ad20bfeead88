"""Shrinkage, pretest and restricted estimators for linear regression."""

__version__ = "0.1.0"

from .asymptotics import LocalAlternative, adb, adqr, aqdb, risk_curve
from .crossval import CvConfig, CvReport, EstimatorSpec, kfold_once, repeated_cv
from .distributions import NoncentralChiSq, central_quantile, cdf, inverse_moment, truncated_inverse_moment
from . import errors
from .estimators import (
    ShrinkageContext,
    estimate,
    positive_stein_estimate,
    pretest_estimate,
    stein_estimate,
)
from .io import AnalysisSpec, load_csv, standardize
from .regression import FitResult, LinearRestriction, RegressionData, ols_fit, restricted_fit, wald_statistic
from .simulation import SimConfig, generate_design, null_statistics, rmse_sweep
from .tables import RmseTable

__all__ = [
    "AnalysisSpec", "CvConfig", "CvReport", "EstimatorSpec", "FitResult", "LinearRestriction",
    "LocalAlternative", "NoncentralChiSq", "RegressionData", "RmseTable", "ShrinkageContext",
    "SimConfig", "adb", "errors", "adqr", "aqdb", "cdf", "central_quantile", "estimate", "generate_design",
    "inverse_moment", "kfold_once", "load_csv", "null_statistics", "ols_fit",
    "positive_stein_estimate", "pretest_estimate", "repeated_cv", "restricted_fit", "risk_curve",
    "rmse_sweep", "standardize", "stein_estimate", "truncated_inverse_moment", "wald_statistic",
]
