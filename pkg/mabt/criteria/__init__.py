"""Weight-selection objectives and model-selection rules."""

from mabt.criteria.bootstrap import (
    GcvSelection,
    ReplicateFit,
    bagging_cp_predict,
    bootstrap_replicates,
    btma_criterion,
    criterion_from_plans,
    criterion_from_replicates,
    default_subsample_sizes,
    gcv_score,
    gcv_select_m,
    half_n,
    resolve_m,
    subsampling_criterion,
)
from mabt.criteria.quadratic import (
    bms_select,
    jma_criterion,
    loo_residuals,
    mma_criterion,
    smoothed_ic_weights,
    solve_criterion,
    unit_weights,
)

__all__ = [
    "GcvSelection",
    "ReplicateFit",
    "bagging_cp_predict",
    "bms_select",
    "bootstrap_replicates",
    "btma_criterion",
    "criterion_from_plans",
    "criterion_from_replicates",
    "default_subsample_sizes",
    "gcv_score",
    "gcv_select_m",
    "half_n",
    "jma_criterion",
    "loo_residuals",
    "mma_criterion",
    "resolve_m",
    "smoothed_ic_weights",
    "solve_criterion",
    "subsampling_criterion",
    "unit_weights",
]
