"""Simulation designs and Monte Carlo experiments."""

from mabt.sim.designs import (
    CI_CASE_K,
    CI_CASE_M0,
    CICaseConfig,
    HansenConfig,
    gen_ci_case,
    gen_hansen,
    validate_ci_case_config,
    validate_hansen_config,
)
from mabt.sim.experiments import (
    COVERAGE_METHODS,
    CoverageReport,
    ExperimentReport,
    Failure,
    MetricSummary,
    RiskReport,
    run_coverage_experiment,
    run_m_sweep,
    run_risk_experiment,
    summarize,
    underfit_weight_mass,
)

__all__ = [
    "CI_CASE_K",
    "CI_CASE_M0",
    "COVERAGE_METHODS",
    "CICaseConfig",
    "CoverageReport",
    "ExperimentReport",
    "Failure",
    "HansenConfig",
    "MetricSummary",
    "RiskReport",
    "gen_ci_case",
    "gen_hansen",
    "run_coverage_experiment",
    "run_m_sweep",
    "run_risk_experiment",
    "summarize",
    "underfit_weight_mass",
    "validate_ci_case_config",
    "validate_hansen_config",
]
