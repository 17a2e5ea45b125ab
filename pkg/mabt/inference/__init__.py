"""Confidence intervals for coefficients under nested candidate sets."""

from mabt.inference.asymptotics import (
    AsymptoticInputs,
    LimitDrawSet,
    LimitGeometry,
    delta_matrix,
    estimate_asymptotics,
    limit_geometry,
    psd_factor,
    simulate_limit_draws,
)
from mabt.inference.intervals import (
    ci_averaging,
    ci_bms_bootstrap,
    ci_model_averaging,
    ci_ols_z,
    empirical_quantile,
)

__all__ = [
    "AsymptoticInputs",
    "LimitDrawSet",
    "LimitGeometry",
    "ci_averaging",
    "ci_bms_bootstrap",
    "ci_model_averaging",
    "ci_ols_z",
    "delta_matrix",
    "empirical_quantile",
    "estimate_asymptotics",
    "limit_geometry",
    "psd_factor",
    "simulate_limit_draws",
]
