"""Error definitions for mabt.

Every error carries a human-readable message and a ``details`` mapping so the
CLI can render a machine-readable error object without string parsing.
Nothing is silently degraded: numerical failures surface as one of these
classes with the offending model, replicate or cell attached.
"""

from __future__ import annotations

from typing import Any, Optional


class MabtError(Exception):
    """Base exception for all mabt errors."""

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None) -> None:
        """Initialize the error.

        Args:
            message: Human-readable error description.
            details: Structured context (indices, names, sizes).
        """
        super().__init__(message)
        self.message = message
        self.details: dict[str, Any] = dict(details or {})

    def to_dict(self) -> dict[str, Any]:
        """Render the error as a JSON-ready object."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


# -----------------------------------------------------------------------------
# Families
# -----------------------------------------------------------------------------


class DataError(MabtError):
    """Raised when input data is malformed or unusable."""


class FitError(MabtError):
    """Raised when a least-squares fit cannot be computed."""


class ResamplingError(MabtError):
    """Raised when resample plans cannot be drawn."""


class SolverError(MabtError):
    """Raised when the simplex QP receives unusable input."""


class ConfigError(MabtError):
    """Raised when a run configuration fails validation.

    Carries the full list of problems, never only the first one.
    """

    def __init__(self, errors: list[str]) -> None:
        super().__init__(
            "Configuration invalid: " + "; ".join(errors), {"errors": list(errors)}
        )
        self.errors = list(errors)


# -----------------------------------------------------------------------------
# Data errors
# -----------------------------------------------------------------------------


class DimensionMismatch(DataError):
    """Raised when shapes disagree or a model indexes a column outside the pool."""


class ParseError(DataError):
    """Raised when a CSV file cannot be tokenized."""

    def __init__(self, row: int, col: int, reason: str = "") -> None:
        super().__init__(
            f"Cannot parse input at row {row}, column {col}" + (f": {reason}" if reason else ""),
            {"row": row, "col": col},
        )
        self.row = row
        self.col = col


class MissingColumn(DataError):
    """Raised when a required header is absent."""

    def __init__(self, name: str) -> None:
        super().__init__(f"Column '{name}' not found in header", {"name": name})
        self.name = name


class NonNumeric(DataError):
    """Raised when a cell cannot be read as a real number."""

    def __init__(self, row: int, col: str, value: str = "") -> None:
        super().__init__(
            f"Non-numeric value {value!r} at row {row}, column '{col}'",
            {"row": row, "col": col, "value": value},
        )
        self.row = row
        self.col = col


class ZeroVariance(DataError):
    """Raised when a column to be standardized is constant."""

    def __init__(self, col: str) -> None:
        super().__init__(f"Column '{col}' has zero sample variance", {"col": col})
        self.col = col


class SigmaNotPD(DataError):
    """Raised when a simulation covariance matrix is not positive definite."""


# -----------------------------------------------------------------------------
# Fit errors
# -----------------------------------------------------------------------------


class RankDeficient(FitError):
    """Raised when a candidate design has numerical rank below its width."""

    def __init__(self, model_index: int, rank: int = -1, width: int = -1) -> None:
        super().__init__(
            f"Model {model_index} is rank deficient (rank {rank} < {width})",
            {"model_index": model_index, "rank": rank, "width": width},
        )
        self.model_index = model_index


class DegenerateFit(FitError):
    """Raised when a criterion needs a positive residual sum of squares."""


class LeverageOne(FitError):
    """Raised when a leave-one-out residual is undefined (h_ii = 1)."""

    def __init__(self, row: int, model_index: int) -> None:
        super().__init__(
            f"Leverage of row {row} equals one in model {model_index}",
            {"row": row, "model_index": model_index},
        )
        self.row = row
        self.model_index = model_index


class SingularQ(FitError):
    """Raised when the regressor second-moment matrix is not positive definite."""


class CoefficientNotInModel(FitError):
    """Raised when an interval is requested for a coefficient the model omits."""

    def __init__(self, coef: int, model_index: int) -> None:
        super().__init__(
            f"Coefficient {coef} is not in model {model_index}",
            {"coef": coef, "model_index": model_index},
        )
        self.coef = coef
        self.model_index = model_index


# -----------------------------------------------------------------------------
# Resampling and solver errors
# -----------------------------------------------------------------------------


class InvalidSize(ResamplingError):
    """Raised when a resample size is impossible for the requested scheme."""


class RankRetryExhausted(ResamplingError):
    """Raised when no full-rank resample was found within the retry budget.

    Usually means m is too small relative to the largest model dimension.
    """

    def __init__(self, max_retries: int, replicate: Optional[int] = None) -> None:
        where = f" (replicate {replicate})" if replicate is not None else ""
        super().__init__(
            f"No full-rank resample after {max_retries} draws{where}",
            {"max_retries": max_retries, "replicate": replicate},
        )
        self.max_retries = max_retries
        self.replicate = replicate


class NonFinite(SolverError):
    """Raised when a quadratic objective contains NaN or infinite entries."""


# -----------------------------------------------------------------------------
# Command-line errors
# -----------------------------------------------------------------------------


class UnknownSubcommand(ConfigError):
    """Raised when the CLI receives a subcommand it does not know."""

    def __init__(self, name: str) -> None:
        super().__init__([f"unknown subcommand '{name}'"])
        self.name = name


class UnknownMethod(ConfigError):
    """Raised when a method name is not in the registry."""

    def __init__(self, name: str) -> None:
        super().__init__([f"unknown method '{name}'"])
        self.name = name
