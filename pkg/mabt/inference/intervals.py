"""Confidence intervals for single regression coefficients.

Averaging intervals invert the simulated limit law: with quantiles
``lo`` and ``hi`` of the draws at ``alpha/2`` and ``1 - alpha/2``, the
interval is ``[beta - hi / sqrt(n), beta - lo / sqrt(n)]``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional, Union

import numpy as np
from scipy import stats

from mabt.common.config import DEFAULT_B, DEFAULT_LEVEL, DEFAULT_MAX_RETRIES, DEFAULT_QP_TOL, DEFAULT_U
from mabt.common.errors import CoefficientNotInModel, InvalidSize
from mabt.common.types import (
    CandidateModelSet,
    ConfidenceInterval,
    Dataset,
    FitBundle,
    LimitKind,
    MethodWeights,
    ResampleKind,
    ResamplePlan,
)
from mabt.criteria.bootstrap import (
    bootstrap_replicates,
    btma_criterion,
    criterion_from_replicates,
    fit_replicate,
    half_n,
)
from mabt.criteria.quadratic import bms_select, jma_criterion, mma_criterion, solve_criterion
from mabt.inference.asymptotics import LimitDrawSet, estimate_asymptotics, simulate_limit_draws
from mabt.regression.ols import averaged_coefficients, fit_all, fit_ols
from mabt.resampling.seeds import SeedSpec

logger = logging.getLogger(__name__)


def _check_level(level: float) -> None:
    if not 0.0 <= level <= 1.0:
        raise InvalidSize(f"level must lie in [0, 1], got {level}", {"level": level})


def _unbounded(level: float, method: str, j: int) -> ConfidenceInterval:
    return ConfidenceInterval(-math.inf, math.inf, level, method, j)


def empirical_quantile(values: np.ndarray, p: float) -> float:
    """Quantile by linear interpolation between order statistics.

    The p-quantile of U sorted values sits at 0-based position (U - 1) p.
    """
    return float(np.quantile(np.asarray(values, dtype=float), p, method="linear"))


def ci_averaging(
    dataset: Dataset,
    models: CandidateModelSet,
    weights: MethodWeights,
    draws: LimitDrawSet,
    j: int,
    level: float = DEFAULT_LEVEL,
    bundle: Optional[FitBundle] = None,
) -> ConfidenceInterval:
    """Interval for coefficient ``j`` of an averaging estimator.

    Raises:
        CoefficientNotInModel: If column ``j`` is not in the largest model.
        InvalidSize: If ``level`` is outside ``[0, 1]`` or there are no draws.
    """
    _check_level(level)
    if draws.size < 1:
        raise InvalidSize("limit draw set is empty")
    pos = draws.position(j)
    if pos is None:
        raise CoefficientNotInModel(j, models.largest)
    if level >= 1.0:
        return _unbounded(level, weights.method, j)
    bundle = fit_all(dataset, models) if bundle is None else bundle
    beta = float(averaged_coefficients(bundle, weights.weights, dataset.p)[j])
    alpha = 1.0 - level
    column = draws.draws[:, pos]
    lo = empirical_quantile(column, alpha / 2.0)
    hi = empirical_quantile(column, 1.0 - alpha / 2.0)
    root_n = math.sqrt(dataset.n)
    return ConfidenceInterval(
        lower=beta - hi / root_n,
        upper=beta - lo / root_n,
        level=level,
        method=weights.method,
        coef=j,
    )


def ci_ols_z(
    dataset: Dataset,
    model: Sequence[int],
    j: int,
    level: float = DEFAULT_LEVEL,
    sigma2_source: str = "model",
    full_model: Optional[Sequence[int]] = None,
    model_index: int = 0,
    method: str = "OLS",
) -> ConfidenceInterval:
    """Normal-quantile interval from one least-squares fit.

    ``sigma2_source="model"`` uses rss/(n - k) of ``model`` itself;
    ``"full"`` uses that of ``full_model``.

    Raises:
        CoefficientNotInModel: If column ``j`` is not in ``model``.
    """
    _check_level(level)
    cols = tuple(int(c) for c in model)
    if j not in cols:
        raise CoefficientNotInModel(j, model_index)
    if level >= 1.0:
        return _unbounded(level, method, j)
    fit = fit_ols(dataset, cols, model_index)
    n = dataset.n
    if sigma2_source == "model":
        source = fit
    elif sigma2_source == "full":
        if full_model is None:
            raise ValueError("sigma2_source='full' needs full_model")
        source = fit_ols(dataset, full_model)
    else:
        raise ValueError(f"unknown sigma2_source '{sigma2_source}'")
    sigma2 = source.rss / (n - source.k) if n > source.k else float("nan")
    pos = cols.index(j)
    se = math.sqrt(sigma2 * fit.xtx_inv[pos, pos])
    z = float(stats.norm.ppf(0.5 + level / 2.0))
    beta = float(fit.theta_hat[pos])
    return ConfidenceInterval(beta - z * se, beta + z * se, level, method, j)


def ci_bms_bootstrap(
    dataset: Dataset,
    models: CandidateModelSet,
    m: Optional[int],
    B: int,
    j: int,
    level: float = DEFAULT_LEVEL,
    seeds: SeedSpec = SeedSpec(0),
    plans: Optional[Sequence[ResamplePlan]] = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> ConfidenceInterval:
    """Symmetric bootstrap interval around the bootstrap-selected model.

    The half-width is the level-quantile of |sqrt(n) (beta* - beta)| over
    replicates, centered at the last replicate's estimate. A coefficient
    outside the selected model is estimated as exactly zero.
    """
    _check_level(level)
    if plans is not None:
        replicates = [fit_replicate(dataset, models, plan) for plan in plans]
    else:
        m = half_n(dataset.n) if m is None else m
        replicates = bootstrap_replicates(
            dataset, models, m, B, seeds, ResampleKind.WITH_REPLACEMENT, "btma",
            max_retries, workers,
        )
    if not replicates:
        raise InvalidSize("B must be at least 1")
    chosen = bms_select(criterion_from_replicates(dataset, models, replicates, "BMS"))
    cols = models.models[chosen]
    if j not in cols:
        logger.debug("coefficient %d not in BMS model %d; interval is the point 0", j, chosen)
        return ConfidenceInterval(0.0, 0.0, level, "BMS", j)
    if level >= 1.0:
        return _unbounded(level, "BMS", j)
    pos = cols.index(j)
    beta = float(fit_ols(dataset, cols, chosen).theta_hat[pos])
    boot = np.array([rep.thetas[chosen][pos] for rep in replicates])
    root_n = math.sqrt(dataset.n)
    half = empirical_quantile(np.abs(root_n * (boot - beta)), level) / root_n
    center = float(boot[-1])
    return ConfidenceInterval(center - half, center + half, level, "BMS", j)


def ci_model_averaging(
    dataset: Dataset,
    models: CandidateModelSet,
    method: Union[LimitKind, str],
    j: int,
    level: float = DEFAULT_LEVEL,
    m: Optional[int] = None,
    B: int = DEFAULT_B,
    U: int = DEFAULT_U,
    seeds: SeedSpec = SeedSpec(0),
    m0: Optional[int] = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    tol: float = DEFAULT_QP_TOL,
    workers: int = 1,
) -> ConfidenceInterval:
    """Weights, plug-in moments, limit draws and interval in one call.

    ``m`` defaults to n/2; for MMA and JMA it only enters the inputs record.
    """
    kind = LimitKind(method) if isinstance(method, str) else method
    m = half_n(dataset.n) if m is None else m
    bundle = fit_all(dataset, models)
    if kind is LimitKind.BTMA:
        criterion = btma_criterion(dataset, models, m, B, seeds.child(0), max_retries, workers)
    elif kind is LimitKind.MMA:
        criterion = mma_criterion(bundle, dataset.n)
    else:
        criterion = jma_criterion(bundle, dataset)
    weights = solve_criterion(criterion, tol)
    inputs = estimate_asymptotics(dataset, models, m, m0, bundle)
    draws = simulate_limit_draws(inputs, U, kind, seeds.child(1), tol, workers)
    return ci_averaging(dataset, models, weights, draws, j, level, bundle)
