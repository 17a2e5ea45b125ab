"""Data ingestion, prediction study and report writers."""

from mabt.io.data import (
    INTERCEPT,
    StandardizeTransform,
    fit_standardize,
    intercept_columns,
    load_csv,
    nested_from_order,
    order_variables_cp,
    standardize,
)
from mabt.io.prediction import (
    MspeSummary,
    PredictionReport,
    SplitConfig,
    evaluate_splits,
    split_mspe,
    validate_split_config,
)
from mabt.io.reports import render_csv, render_json, write_report

__all__ = [
    "INTERCEPT",
    "MspeSummary",
    "PredictionReport",
    "SplitConfig",
    "StandardizeTransform",
    "evaluate_splits",
    "fit_standardize",
    "intercept_columns",
    "load_csv",
    "nested_from_order",
    "order_variables_cp",
    "render_csv",
    "render_json",
    "split_mspe",
    "standardize",
    "validate_split_config",
    "write_report",
]
