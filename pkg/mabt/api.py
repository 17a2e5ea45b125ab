"""Public, supported API surface for mabt.

If it isn't imported here and re-exported via __all__, treat it as internal
and subject to change.

Usage:
    from mabt.api import make_dataset, CandidateModelSet, fit_all, btma_criterion
    # or
    from mabt import make_dataset, CandidateModelSet, fit_all, btma_criterion
"""

from __future__ import annotations

# -----------------------------------------------------------------------------
# Core types
# -----------------------------------------------------------------------------
from mabt.common.config import EngineConfig, MPolicy
from mabt.common.types import (
    CandidateModelSet,
    ConfidenceInterval,
    Dataset,
    FitBundle,
    InfoCriterion,
    LimitKind,
    MethodWeights,
    ModelFit,
    QPSolution,
    QPStatus,
    QuadraticCriterion,
    ResampleKind,
    ResamplePlan,
)
from mabt.common.validate import make_dataset

# -----------------------------------------------------------------------------
# Regression and resampling
# -----------------------------------------------------------------------------
from mabt.regression import (
    averaged_coefficients,
    averaged_fit,
    fit_all,
    fit_ols,
    hat_trace_squared,
    info_criterion,
    mallows_cp,
    predict_averaged,
    select_model,
)
from mabt.resampling import SeedSpec, draw_fullrank_plan, draw_plan, identity_plan

# -----------------------------------------------------------------------------
# Criteria and solver
# -----------------------------------------------------------------------------
from mabt.criteria import (
    bagging_cp_predict,
    bms_select,
    btma_criterion,
    gcv_select_m,
    jma_criterion,
    mma_criterion,
    smoothed_ic_weights,
    solve_criterion,
    subsampling_criterion,
)
from mabt.optimize import solve_simplex_qp

# -----------------------------------------------------------------------------
# Inference
# -----------------------------------------------------------------------------
from mabt.inference import (
    ci_averaging,
    ci_bms_bootstrap,
    ci_model_averaging,
    ci_ols_z,
    estimate_asymptotics,
    simulate_limit_draws,
)

# -----------------------------------------------------------------------------
# Methods, experiments, data
# -----------------------------------------------------------------------------
from mabt.methods import MethodContext, MethodRegistry, create_default_registry
from mabt.sim import (
    CICaseConfig,
    HansenConfig,
    run_coverage_experiment,
    run_m_sweep,
    run_risk_experiment,
)
from mabt.io import SplitConfig, evaluate_splits, load_csv, standardize

__all__ = [
    "CICaseConfig",
    "CandidateModelSet",
    "ConfidenceInterval",
    "Dataset",
    "EngineConfig",
    "FitBundle",
    "HansenConfig",
    "InfoCriterion",
    "LimitKind",
    "MPolicy",
    "MethodContext",
    "MethodRegistry",
    "MethodWeights",
    "ModelFit",
    "QPSolution",
    "QPStatus",
    "QuadraticCriterion",
    "ResampleKind",
    "ResamplePlan",
    "SeedSpec",
    "SplitConfig",
    "averaged_coefficients",
    "averaged_fit",
    "bagging_cp_predict",
    "bms_select",
    "btma_criterion",
    "ci_averaging",
    "ci_bms_bootstrap",
    "ci_model_averaging",
    "ci_ols_z",
    "create_default_registry",
    "draw_fullrank_plan",
    "draw_plan",
    "estimate_asymptotics",
    "evaluate_splits",
    "fit_all",
    "fit_ols",
    "gcv_select_m",
    "hat_trace_squared",
    "identity_plan",
    "info_criterion",
    "jma_criterion",
    "load_csv",
    "make_dataset",
    "mallows_cp",
    "mma_criterion",
    "predict_averaged",
    "run_coverage_experiment",
    "run_m_sweep",
    "run_risk_experiment",
    "select_model",
    "simulate_limit_draws",
    "smoothed_ic_weights",
    "solve_criterion",
    "solve_simplex_qp",
    "standardize",
    "subsampling_criterion",
]
