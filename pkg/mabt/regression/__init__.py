"""Least-squares machinery over candidate models and classical selection criteria."""

from mabt.regression.ols import (
    averaged_coefficients,
    averaged_fit,
    fit_all,
    fit_ols,
    hat_trace_squared,
    numerical_rank,
    predict_averaged,
    projection_matrix,
    rank_tolerance,
    solve_least_squares,
)
from mabt.regression.selection import (
    criterion_scores,
    info_criterion,
    mallows_cp,
    select_model,
    tie_break_argmin,
)

__all__ = [
    "averaged_coefficients",
    "averaged_fit",
    "criterion_scores",
    "fit_all",
    "fit_ols",
    "hat_trace_squared",
    "info_criterion",
    "mallows_cp",
    "numerical_rank",
    "predict_averaged",
    "projection_matrix",
    "rank_tolerance",
    "select_model",
    "solve_least_squares",
    "tie_break_argmin",
]
