"""Simulated limit law of averaging estimators over nested candidates.

Coefficients live in the coordinate system of the largest model
(``column_order``). Model ``q`` is embedded through its positions in that
order; ``V_q = S_q' Q_q^{-1} S_q`` with ``Q_q`` the matching block of
``Q = X'X / n``. Only the ``R = M - M0`` models that contain the selected
one enter the limit problem, so under-fitted models never get weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from mabt.common.config import DEFAULT_QP_TOL, DEFAULT_U
from mabt.common.errors import DataError, InvalidSize, SingularQ
from mabt.common.parallel import ordered_map
from mabt.common.types import CandidateModelSet, Dataset, FitBundle, InfoCriterion, LimitKind
from mabt.optimize.simplex_qp import solve_simplex_qp
from mabt.regression.ols import fit_all
from mabt.regression.selection import select_model
from mabt.resampling.seeds import SeedSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AsymptoticInputs:
    """Plug-in moments of the largest model plus the nesting structure."""

    sigma2_hat: float
    q_hat: np.ndarray
    xi_hat: np.ndarray
    n: int
    m: int
    k: int
    m0: int
    dims: tuple[int, ...]
    positions: tuple[tuple[int, ...], ...]
    column_order: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.dims)

    @property
    def r(self) -> int:
        """Number of candidates that contain the selected model."""
        return self.size - self.m0


@dataclass(frozen=True)
class LimitGeometry:
    """Draw-independent pieces of the limit problem."""

    q_inv: np.ndarray
    v: np.ndarray
    dims: np.ndarray
    sandwich_traces: np.ndarray


@dataclass(frozen=True)
class LimitDrawSet:
    """Simulated realizations of the limit of sqrt(n) (beta(w) - beta)."""

    draws: np.ndarray
    nu: np.ndarray
    kind: LimitKind
    column_order: tuple[int, ...]
    m0: int

    @property
    def size(self) -> int:
        return int(self.draws.shape[0])

    def position(self, column: int) -> Optional[int]:
        """Coordinate of a dataset column in the draws, or None if absent."""
        try:
            return self.column_order.index(column)
        except ValueError:
            return None


def _require_nested(models: CandidateModelSet) -> None:
    if not models.nested:
        raise DataError("Inference needs a nested candidate set")


def estimate_asymptotics(
    dataset: Dataset,
    models: CandidateModelSet,
    m: int,
    m0: Optional[int] = None,
    bundle: Optional[FitBundle] = None,
) -> AsymptoticInputs:
    """Moment matrices from the largest model's residuals.

    ``m0`` defaults to the number of candidates below the BIC choice.

    Raises:
        DataError: If the set is not nested or ``n <= k``.
        SingularQ: If ``X'X / n`` of the largest model is not positive definite.
        InvalidSize: If ``m0`` is outside ``0..M-1`` or ``m < 1``.
    """
    _require_nested(models)
    if m < 1:
        raise InvalidSize(f"m must be positive, got {m}", {"m": m})
    bundle = fit_all(dataset, models) if bundle is None else bundle
    largest = models.largest
    order = models.models[largest]
    k = len(order)
    n = dataset.n
    if n <= k:
        raise DataError(f"Need n > k for the variance estimate (n={n}, k={k})")

    x = dataset.x[:, list(order)]
    resid = bundle.fits[largest].resid
    q_hat = x.T @ x / n
    xi_hat = (x * (resid**2)[:, None]).T @ x / n
    try:
        linalg.cholesky(q_hat, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularQ("X'X / n of the largest model is not positive definite") from exc

    if m0 is None:
        m0 = select_model(bundle, n, InfoCriterion.BIC)
    if not 0 <= m0 < models.size:
        raise InvalidSize(f"m0 must lie in 0..{models.size - 1}, got {m0}", {"m0": m0})

    positions = tuple(tuple(order.index(c) for c in cols) for cols in models.models)
    logger.debug("asymptotic inputs: k=%d, M0=%d, sigma2=%.6g", k, m0, bundle.sigma2_full)
    return AsymptoticInputs(
        sigma2_hat=float(bundle.fits[largest].rss / (n - k)),
        q_hat=0.5 * (q_hat + q_hat.T),
        xi_hat=0.5 * (xi_hat + xi_hat.T),
        n=n,
        m=int(m),
        k=k,
        m0=int(m0),
        dims=models.dims,
        positions=positions,
        column_order=tuple(order),
    )


def limit_geometry(inputs: AsymptoticInputs) -> LimitGeometry:
    """Embedded inverse blocks V_r and sandwich traces for the correct models."""
    k = inputs.k
    q_inv = linalg.cho_solve(linalg.cho_factor(inputs.q_hat), np.eye(k))
    v = np.zeros((inputs.r, k, k))
    traces = np.zeros(inputs.r)
    for r in range(inputs.r):
        pos = list(inputs.positions[inputs.m0 + r])
        block = inputs.q_hat[np.ix_(pos, pos)]
        block_inv = linalg.cho_solve(linalg.cho_factor(block), np.eye(len(pos)))
        v[r][np.ix_(pos, pos)] = block_inv
        traces[r] = float(np.trace(block_inv @ inputs.xi_hat[np.ix_(pos, pos)]))
    dims = np.array(inputs.dims[inputs.m0 :], dtype=float)
    return LimitGeometry(q_inv=0.5 * (q_inv + q_inv.T), v=v, dims=dims, sandwich_traces=traces)


def _delta(
    inputs: AsymptoticInputs, geometry: LimitGeometry, z: np.ndarray, kind: LimitKind
) -> np.ndarray:
    idx = np.arange(inputs.r)
    upper = np.maximum.outer(idx, idx)
    zvz = np.einsum("i,rij,j->r", z, geometry.v, z)[upper]
    if kind is LimitKind.BTMA:
        lower = np.minimum.outer(idx, idx)
        scale = inputs.n * inputs.sigma2_hat / inputs.m
        delta = scale * geometry.dims[lower] + (float(z @ geometry.q_inv @ z) - zvz)
    elif kind is LimitKind.MMA:
        delta = inputs.sigma2_hat * np.add.outer(geometry.dims, geometry.dims) - zvz
    elif kind is LimitKind.JMA:
        traces = geometry.sandwich_traces
        delta = np.add.outer(traces, traces) - zvz
    else:
        raise ValueError(f"no limit problem for {kind}")
    return 0.5 * (delta + delta.T)


def delta_matrix(inputs: AsymptoticInputs, z: np.ndarray, kind: LimitKind) -> np.ndarray:
    """The R x R matrix of the limit problem for one normal draw ``z``.

    Raises:
        DataError: If ``z`` does not have length k.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape[0] != inputs.k:
        raise DataError(f"Z has length {z.shape[0]}, expected {inputs.k}")
    return _delta(inputs, limit_geometry(inputs), z, kind)


def psd_factor(matrix: np.ndarray) -> np.ndarray:
    """L with L L' equal to ``matrix`` after clipping negative eigenvalues."""
    evals, evecs = np.linalg.eigh(0.5 * (matrix + matrix.T))
    return evecs * np.sqrt(np.clip(evals, 0.0, None))


def simulate_limit_draws(
    inputs: AsymptoticInputs,
    U: int = DEFAULT_U,
    kind: LimitKind = LimitKind.BTMA,
    seeds: SeedSpec = SeedSpec(0),
    tol: float = DEFAULT_QP_TOL,
    workers: int = 1,
) -> LimitDrawSet:
    """Draw Z ~ N(0, Xi), solve the simplex problem, keep sum_r nu_r V_r Z.

    Raises:
        InvalidSize: If ``U < 1``.
    """
    if U < 1:
        raise InvalidSize(f"U must be at least 1, got {U}", {"U": U})
    geometry = limit_geometry(inputs)
    factor = psd_factor(inputs.xi_hat)
    normals = seeds.generator(0, "limit-draws").standard_normal((U, inputs.k))
    zs = normals @ factor.T

    def solve(u: int) -> np.ndarray:
        if inputs.r == 1:
            return np.ones(1)
        return solve_simplex_qp(_delta(inputs, geometry, zs[u], kind), tol=tol).weights

    nu = np.stack(ordered_map(solve, range(U), workers))
    vz = np.einsum("rij,uj->uri", geometry.v, zs)
    draws = np.einsum("ur,uri->ui", nu, vz)
    logger.debug("simulated %d %s limit draws over %d correct models", U, kind.value, inputs.r)
    return LimitDrawSet(
        draws=draws, nu=nu, kind=kind, column_order=inputs.column_order, m0=inputs.m0
    )
