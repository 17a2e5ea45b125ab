"""Quadratic programming over the probability simplex.

Minimizes ``w'Aw + b'w`` subject to ``w >= 0`` and ``sum(w) = 1`` with a
primal active-set method. The equality-constrained subproblem on the free
set is solved in an orthonormal basis of the simplex tangent space through
an eigendecomposition, so singular (PSD) matrices and flat directions are
handled without pseudo-inverses. The method starts from the best vertex and
only takes descent steps, hence the result never loses to a vertex.

Convexity only matters on the tangent space: a matrix such as
``a 1' + 1 a'`` is indefinite yet linear on the simplex. A ridge is added
only when the tangent-space curvature is materially negative.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from mabt.common.config import DEFAULT_QP_TOL
from mabt.common.errors import NonFinite, SolverError
from mabt.common.types import QPSolution, QPStatus

logger = logging.getLogger(__name__)

_NEG_CURVATURE_RTOL = 1e-10


def _tangent_basis(size: int) -> np.ndarray:
    """Orthonormal basis of ``{v : sum(v) = 0}`` in R^size."""
    q, _ = np.linalg.qr(np.ones((size, 1)), mode="complete")
    return q[:, 1:]


def _convexify(a: np.ndarray) -> np.ndarray:
    m = a.shape[0]
    basis = _tangent_basis(m)
    curvature = np.linalg.eigvalsh(basis.T @ a @ basis)
    norm = float(np.linalg.norm(a, 2))
    if curvature[0] >= -_NEG_CURVATURE_RTOL * norm:
        return a
    shift = -float(curvature[0]) + _NEG_CURVATURE_RTOL * max(abs(float(np.trace(a))) / m, norm)
    logger.warning("simplex QP is nonconvex (curvature %.3g); adding ridge %.3g", curvature[0], shift)
    return a + shift * np.eye(m)


def kkt_residual(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> float:
    """Largest violation of the simplex KKT conditions at ``weights``."""
    grad = 2.0 * a @ weights + b
    support = weights > 0
    lam = float(np.mean(grad[support]))
    residual = float(np.max(np.abs(grad[support] - lam)))
    if np.any(~support):
        residual = max(residual, float(np.max(lam - grad[~support])))
    return max(residual, 0.0)


def _finish(weights: np.ndarray, tol: float) -> np.ndarray:
    w = weights.copy()
    w[(w < 0) & (w >= -tol)] = 0.0
    w = np.maximum(w, 0.0)
    w /= w.sum()
    w[int(np.argmax(w))] += 1.0 - w.sum()
    return w


def solve_simplex_qp(
    a: np.ndarray,
    b: Optional[np.ndarray] = None,
    tol: float = DEFAULT_QP_TOL,
    max_iter: Optional[int] = None,
) -> QPSolution:
    """Minimize ``w'Aw + b'w`` over the probability simplex.

    Args:
        a: Symmetric M x M matrix (symmetrized internally).
        b: Linear term; zeros when omitted.
        tol: Step and multiplier tolerance, relative to the problem scale.
        max_iter: Iteration cap, default ``10 * M**2``.

    Returns:
        The minimizer with status ``MaxIterations`` if the cap was hit.

    Raises:
        SolverError: If shapes are inconsistent.
        NonFinite: If ``a`` or ``b`` has NaN or infinite entries.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise SolverError(f"A must be a non-empty square matrix, got shape {a.shape}")
    size = a.shape[0]
    b = np.zeros(size) if b is None else np.asarray(b, dtype=float).reshape(-1)
    if b.shape[0] != size:
        raise SolverError(f"b has length {b.shape[0]}, expected {size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFinite("Quadratic objective contains non-finite entries")
    a = 0.5 * (a + a.T)

    vertex_values = np.diag(a) + b
    start = int(np.argmin(vertex_values))
    if size == 1:
        return QPSolution(np.ones(1), float(vertex_values[0]), (), 0, QPStatus.CONVERGED, 0.0)

    max_iter = 10 * size * size if max_iter is None else max_iter
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), np.finfo(float).tiny)
    h = _convexify(a)
    grad_tol = tol * scale

    w = np.zeros(size)
    w[start] = 1.0
    free = [start]
    released: Optional[int] = None
    status = QPStatus.MAX_ITERATIONS
    iterations = 0

    for iterations in range(1, max_iter + 1):
        grad = 2.0 * h @ w + b
        idx = np.array(free)
        unbounded = False
        if idx.size > 1:
            basis = _tangent_basis(idx.size)
            hess = 2.0 * basis.T @ h[np.ix_(idx, idx)] @ basis
            evals, evecs = np.linalg.eigh(0.5 * (hess + hess.T))
            coef = evecs.T @ (basis.T @ grad[idx])
            curved = evals > grad_tol
            flat = ~curved
            if np.any(np.abs(coef[flat]) > grad_tol):
                direction = -(evecs[:, flat] @ coef[flat])
                unbounded = True
            else:
                direction = -(evecs[:, curved] @ (coef[curved] / evals[curved]))
            step = basis @ direction
        else:
            step = np.zeros(1)

        if float(np.max(np.abs(step))) <= tol:
            lam = float(np.mean(grad[idx]))
            bound = [j for j in range(size) if j not in free]
            if not bound:
                status = QPStatus.CONVERGED
                break
            mult = grad[bound] - lam
            worst = int(np.argmin(mult))
            if mult[worst] >= -grad_tol:
                status = QPStatus.CONVERGED
                break
            released = bound[worst]
            free = sorted(free + [released])
            continue

        alpha = np.inf if unbounded else 1.0
        blocking: Optional[int] = None
        for i, p_i in zip(idx, step):
            if p_i >= 0.0 or (i == released and p_i > -tol):
                continue
            ratio = -w[i] / p_i
            if ratio < alpha:
                alpha, blocking = ratio, int(i)
        if not np.isfinite(alpha):
            break
        w[idx] += alpha * step
        if blocking is not None:
            w[blocking] = 0.0
            free.remove(blocking)
        released = None

    weights = _finish(w, tol)
    objective = float(weights @ a @ weights + b @ weights)
    if objective > vertex_values[start]:
        weights = np.zeros(size)
        weights[start] = 1.0
        objective = float(vertex_values[start])
    if status is not QPStatus.CONVERGED:
        logger.warning("simplex QP stopped after %d iterations without convergence", iterations)
    else:
        logger.debug("simplex QP converged in %d iterations", iterations)
    return QPSolution(
        weights=weights,
        objective=objective,
        active_set=tuple(int(j) for j in np.flatnonzero(weights == 0.0)),
        iterations=iterations,
        status=status,
        kkt_residual=kkt_residual(h, b, weights),
    )
