"""Common types, errors, and utilities for mabt."""

from mabt.common.errors import (
    CoefficientNotInModel,
    ConfigError,
    DataError,
    DegenerateFit,
    DimensionMismatch,
    FitError,
    InvalidSize,
    LeverageOne,
    MabtError,
    MissingColumn,
    NonFinite,
    NonNumeric,
    ParseError,
    RankDeficient,
    RankRetryExhausted,
    ResamplingError,
    SigmaNotPD,
    SingularQ,
    SolverError,
    UnknownMethod,
    UnknownSubcommand,
    ZeroVariance,
)
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

__all__ = [
    "CandidateModelSet",
    "CoefficientNotInModel",
    "ConfidenceInterval",
    "ConfigError",
    "DataError",
    "Dataset",
    "DegenerateFit",
    "DimensionMismatch",
    "FitBundle",
    "FitError",
    "InfoCriterion",
    "InvalidSize",
    "LeverageOne",
    "LimitKind",
    "MabtError",
    "MethodWeights",
    "MissingColumn",
    "ModelFit",
    "NonFinite",
    "NonNumeric",
    "ParseError",
    "QPSolution",
    "QPStatus",
    "QuadraticCriterion",
    "RankDeficient",
    "RankRetryExhausted",
    "ResampleKind",
    "ResamplePlan",
    "ResamplingError",
    "SigmaNotPD",
    "SingularQ",
    "SolverError",
    "UnknownMethod",
    "UnknownSubcommand",
    "ZeroVariance",
]
