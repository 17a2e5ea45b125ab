"""Least-squares fitting of candidate linear models.

Every fit goes through a column-pivoted QR factorization. Coefficients
come from a triangular solve, leverages from the row norms of the thin
orthogonal factor, and rank is decided with the tolerance
``rows * eps * max column norm``. No explicit inverse is used to solve.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from scipy import linalg

from mabt.common.errors import DimensionMismatch, RankDeficient
from mabt.common.types import CandidateModelSet, Dataset, FitBundle, ModelFit
from mabt.common.validate import check_candidates

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)


def rank_tolerance(matrix: np.ndarray) -> float:
    """Rank cut-off for a design: rows * eps * largest column norm."""
    if matrix.size == 0:
        return 0.0
    return matrix.shape[0] * _EPS * float(np.max(np.linalg.norm(matrix, axis=0)))


def numerical_rank(matrix: np.ndarray) -> int:
    """Numerical rank under pivoted QR with the package tolerance."""
    if matrix.size == 0:
        return 0
    r, _ = linalg.qr(matrix, mode="r", pivoting=True)
    diag = np.abs(np.diag(r))
    return int(np.sum(diag > rank_tolerance(matrix)))


def _columns(model: Sequence[int], p: int) -> tuple[int, ...]:
    cols = tuple(int(c) for c in model)
    if not cols:
        raise DimensionMismatch("Model has no columns")
    bad = [c for c in cols if c < 0 or c >= p]
    if bad:
        raise DimensionMismatch(
            f"Model indexes columns outside 0..{p - 1}: {bad}", {"columns": bad, "p": p}
        )
    return cols


def solve_least_squares(
    x: np.ndarray, y: np.ndarray, model_index: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pivoted-QR least squares on a full-column-rank design.

    Returns:
        ``(theta, q, r, piv)`` with ``x[:, piv] = q @ r``.

    Raises:
        RankDeficient: If the numerical rank is below the column count.
    """
    rows, k = x.shape
    if k > rows:
        raise RankDeficient(model_index, rows, k)
    q, r, piv = linalg.qr(x, mode="economic", pivoting=True)
    rank = int(np.sum(np.abs(np.diag(r)) > rank_tolerance(x)))
    if rank < k:
        raise RankDeficient(model_index, rank, k)
    theta = np.empty(k)
    theta[piv] = linalg.solve_triangular(r, q.T @ y)
    return theta, q, r, piv


def fit_ols(dataset: Dataset, model: Sequence[int], model_index: int = 0) -> ModelFit:
    """Fit one candidate model by least squares.

    Args:
        dataset: Response and regressor pool.
        model: Column indices of the candidate (0-based).
        model_index: Position of the model in its candidate set, used in errors.

    Raises:
        DimensionMismatch: If the model indexes a column outside the pool.
        RankDeficient: If the model's design is numerically rank deficient.
    """
    cols = _columns(model, dataset.p)
    x = dataset.x[:, cols]
    theta, q, r, piv = solve_least_squares(x, dataset.y, model_index)
    k = len(cols)
    mu = x @ theta
    resid = dataset.y - mu

    r_inv = linalg.solve_triangular(r, np.eye(k))
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = r_inv @ r_inv.T

    return ModelFit(
        columns=cols,
        theta_hat=theta,
        mu_hat=mu,
        resid=resid,
        hat_diag=np.einsum("ij,ij->i", q, q),
        k=k,
        rss=float(resid @ resid),
        xtx_inv=xtx_inv,
    )


def fit_all(dataset: Dataset, models: CandidateModelSet) -> FitBundle:
    """Fit every candidate and collect the shared artifacts.

    ``sigma2_full`` is always the residual variance of the largest model.

    Raises:
        DimensionMismatch: If the candidate set does not fit the dataset.
        RankDeficient: With the index of the first failing model.
    """
    check_candidates(models, dataset)
    fits = tuple(fit_ols(dataset, cols, q) for q, cols in enumerate(models.models))
    largest = fits[models.largest]
    dof = dataset.n - largest.k
    sigma2 = largest.rss / dof if dof > 0 else float("nan")
    logger.debug("fitted %d candidates, sigma2_full=%.6g", len(fits), sigma2)
    return FitBundle(
        fits=fits,
        residual_matrix=np.column_stack([f.resid for f in fits]),
        sigma2_full=sigma2,
        models=models,
    )


def projection_matrix(dataset: Dataset, model: Sequence[int]) -> np.ndarray:
    """Explicit hat matrix of one model. Meant for small n only."""
    cols = _columns(model, dataset.p)
    _, q, _, _ = solve_least_squares(dataset.x[:, cols], dataset.y)
    return q @ q.T


def hat_trace_squared(dataset: Dataset, models: CandidateModelSet, weights: np.ndarray) -> float:
    """tr H(w)^2 for H(w) = sum_q w_q H_q, from explicit projectors.

    Equals sum_q sum_r w_q w_r tr(H_q H_r); for nested candidates
    tr(H_q H_r) = min(k_q, k_r). Meant for small n only.
    """
    w = np.asarray(weights, dtype=float)
    h = np.zeros((dataset.n, dataset.n))
    for wq, cols in zip(w, models.models):
        h += wq * projection_matrix(dataset, cols)
    return float(np.sum(h * h))


def averaged_fit(bundle: FitBundle, weights: np.ndarray) -> np.ndarray:
    """Weighted combination of the candidates' fitted vectors."""
    return bundle.fitted_matrix @ np.asarray(weights, dtype=float)


def averaged_coefficients(bundle: FitBundle, weights: np.ndarray, p: int) -> np.ndarray:
    """Combined coefficient vector, each model zero-padded into the p columns."""
    beta = np.zeros(p)
    for w, fit in zip(np.asarray(weights, dtype=float), bundle.fits):
        beta[list(fit.columns)] += w * fit.theta_hat
    return beta


def predict_averaged(bundle: FitBundle, weights: np.ndarray, x_new: np.ndarray) -> np.ndarray:
    """Averaged prediction at new rows given in the full column pool."""
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    out = np.zeros(x_new.shape[0])
    for w, fit in zip(np.asarray(weights, dtype=float), bundle.fits):
        if w != 0.0:
            out += w * (x_new[:, list(fit.columns)] @ fit.theta_hat)
    return out
