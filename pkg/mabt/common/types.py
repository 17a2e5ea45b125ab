"""Core type definitions for mabt."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np


class ResampleKind(Enum):
    """Resampling scheme for a replicate."""

    WITH_REPLACEMENT = "with_replacement"
    WITHOUT_REPLACEMENT = "without_replacement"


class InfoCriterion(Enum):
    """Classical selection rules built on a single fit."""

    AIC = "AIC"
    BIC = "BIC"
    CP = "Cp"


class LimitKind(Enum):
    """Averaging estimators with a simulated limit law."""

    BTMA = "BTMA"
    MMA = "MMA"
    JMA = "JMA"


class QPStatus(Enum):
    """Termination status of the simplex QP."""

    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class Dataset:
    """Response vector and regressor pool.

    Construct through ``mabt.common.validate.make_dataset`` to get the
    shape and finiteness checks.
    """

    y: np.ndarray
    x: np.ndarray
    column_names: Optional[tuple[str, ...]] = None

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])

    def take(self, rows: np.ndarray) -> Dataset:
        """Return the dataset restricted to ``rows`` (repeats allowed)."""
        return Dataset(y=self.y[rows], x=self.x[rows], column_names=self.column_names)

    def column_label(self, j: int) -> str:
        if self.column_names is not None and 0 <= j < len(self.column_names):
            return self.column_names[j]
        return f"x{j}"


@dataclass(frozen=True)
class CandidateModelSet:
    """Ordered candidate models, each a tuple of 0-based column indices."""

    models: tuple[tuple[int, ...], ...]
    nested: bool = False

    @classmethod
    def prefixes(cls, sizes: Any, order: Optional[tuple[int, ...]] = None) -> CandidateModelSet:
        """Build nested candidates from the first ``k`` columns of ``order``."""
        sizes = [int(s) for s in sizes]
        if order is None:
            order = tuple(range(max(sizes)))
        return cls(models=tuple(tuple(order[:k]) for k in sizes), nested=True)

    @property
    def size(self) -> int:
        return len(self.models)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(cols) for cols in self.models)

    @property
    def largest(self) -> int:
        """Index of the largest model by dimension (ties to the smaller index)."""
        dims = self.dims
        return dims.index(max(dims))


@dataclass(frozen=True)
class ModelFit:
    """Least-squares artifacts of one candidate model."""

    columns: tuple[int, ...]
    theta_hat: np.ndarray
    mu_hat: np.ndarray
    resid: np.ndarray
    hat_diag: np.ndarray
    k: int
    rss: float
    xtx_inv: np.ndarray


@dataclass(frozen=True)
class FitBundle:
    """Per-model fits of a candidate set on one dataset."""

    fits: tuple[ModelFit, ...]
    residual_matrix: np.ndarray
    sigma2_full: float
    models: CandidateModelSet

    @property
    def n(self) -> int:
        return int(self.residual_matrix.shape[0])

    @property
    def dims(self) -> np.ndarray:
        return np.array([f.k for f in self.fits], dtype=float)

    @property
    def fitted_matrix(self) -> np.ndarray:
        return np.column_stack([f.mu_hat for f in self.fits])


@dataclass(frozen=True)
class ResamplePlan:
    """One bootstrap or subsampling draw.

    ``counts`` is the multiplicity vector over the n original rows and
    ``indices`` the m selected rows in draw order.
    """

    kind: ResampleKind
    m: int
    counts: np.ndarray
    indices: np.ndarray


@dataclass(frozen=True)
class QuadraticCriterion:
    """Objective w'Aw + b'w + c over the weight simplex."""

    a: np.ndarray
    b: np.ndarray
    c: float
    method: str
    dims: tuple[int, ...]
    meta: dict[str, Any] = field(default_factory=dict)

    def objective(self, weights: np.ndarray) -> float:
        w = np.asarray(weights, dtype=float)
        return float(w @ self.a @ w + self.b @ w + self.c)


@dataclass(frozen=True)
class MethodWeights:
    """Weights chosen by one method, with solver diagnostics."""

    weights: np.ndarray
    method: str
    objective: float = float("nan")
    iterations: int = 0


@dataclass(frozen=True)
class QPSolution:
    """Result of a simplex-constrained quadratic program."""

    weights: np.ndarray
    objective: float
    active_set: tuple[int, ...]
    iterations: int
    status: QPStatus
    kkt_residual: float


@dataclass(frozen=True)
class ConfidenceInterval:
    """Interval for one regression coefficient."""

    lower: float
    upper: float
    level: float
    method: str
    coef: int

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper
