"""Closed-form weight criteria and selection on a fitted candidate set.

Every averaging criterion is data: ``QuadraticCriterion(a, b, c)`` with
objective ``w'aw + b'w + c``. The single simplex QP in
``mabt.optimize`` turns any of them into weights.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import special

from mabt.common.config import DEFAULT_QP_TOL
from mabt.common.errors import DegenerateFit, LeverageOne
from mabt.common.types import (
    Dataset,
    FitBundle,
    InfoCriterion,
    MethodWeights,
    QuadraticCriterion,
)
from mabt.optimize.simplex_qp import solve_simplex_qp
from mabt.regression.selection import info_criterion, tie_break_argmin

logger = logging.getLogger(__name__)

_LEVERAGE_ONE_TOL = 1e-12


def mma_criterion(bundle: FitBundle, n: int) -> QuadraticCriterion:
    """Mallows averaging: ||y - mu(w)||^2/n + (2 sigma2 / n) sum w_q k_q."""
    resid = bundle.residual_matrix
    return QuadraticCriterion(
        a=resid.T @ resid / n,
        b=2.0 * bundle.sigma2_full * bundle.dims / n,
        c=0.0,
        method="MMA",
        dims=tuple(f.k for f in bundle.fits),
        meta={"sigma2": bundle.sigma2_full},
    )


def loo_residuals(bundle: FitBundle) -> np.ndarray:
    """Leave-one-out residuals e_i / (1 - h_ii), one column per model.

    Raises:
        LeverageOne: If a row is fitted exactly by its own observation.
    """
    cols = []
    for q, fit in enumerate(bundle.fits):
        saturated = np.flatnonzero(fit.hat_diag >= 1.0 - _LEVERAGE_ONE_TOL)
        if saturated.size:
            raise LeverageOne(int(saturated[0]), q)
        cols.append(fit.resid / (1.0 - fit.hat_diag))
    return np.column_stack(cols)


def jma_criterion(bundle: FitBundle, dataset: Dataset) -> QuadraticCriterion:
    """Jackknife averaging: mean squared leave-one-out residual of the mix."""
    loo = loo_residuals(bundle)
    size = bundle.models.size
    return QuadraticCriterion(
        a=loo.T @ loo / dataset.n,
        b=np.zeros(size),
        c=0.0,
        method="JMA",
        dims=tuple(f.k for f in bundle.fits),
    )


def smoothed_ic_weights(bundle: FitBundle, n: int, kind: InfoCriterion) -> MethodWeights:
    """Exponential smoothing of AIC or BIC: w_q proportional to exp(-IC_q / 2).

    Raises:
        DegenerateFit: If any candidate has an infinite criterion value.
    """
    ic = np.array([info_criterion(f, n, kind) for f in bundle.fits])
    if not np.all(np.isfinite(ic)):
        raise DegenerateFit(f"S-{kind.value} needs finite criteria for every candidate")
    weights = special.softmax(-0.5 * (ic - ic.min()))
    return MethodWeights(weights=weights, method=f"S-{kind.value}")


def bms_select(criterion: QuadraticCriterion) -> int:
    """Best single model under a criterion: the best simplex vertex."""
    vertex = np.diag(criterion.a) + criterion.b + criterion.c
    return tie_break_argmin(vertex, criterion.dims)


def solve_criterion(criterion: QuadraticCriterion, tol: float = DEFAULT_QP_TOL) -> MethodWeights:
    """Minimize a criterion over the weight simplex."""
    solution = solve_simplex_qp(criterion.a, criterion.b, tol=tol)
    return MethodWeights(
        weights=solution.weights,
        method=criterion.method,
        objective=solution.objective + criterion.c,
        iterations=solution.iterations,
    )


def unit_weights(size: int, index: int, method: str) -> MethodWeights:
    """Weights of a selection method: all mass on one candidate."""
    weights = np.zeros(size)
    weights[index] = 1.0
    return MethodWeights(weights=weights, method=method)
