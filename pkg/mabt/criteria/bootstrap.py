"""Resampling-based criteria: BTMA, subsampling averaging, Cp bagging, GCV for m.

The BTMA criterion is the Monte Carlo average of the residual Gram matrices
of the resampled-coefficient fits, evaluated on the original sample:

    A = (1 / (n B)) sum_b E_b' E_b,   E_b[:, q] = y - X_(q) theta*_{q,b}

Replicates draw from counter-derived streams and are reduced in replicate
order, so any worker count gives the same matrix.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mabt.common.config import DEFAULT_B, DEFAULT_MAX_RETRIES, DEFAULT_QP_TOL, MPolicy
from mabt.common.errors import InvalidSize, RankRetryExhausted
from mabt.common.parallel import ordered_map
from mabt.common.types import (
    CandidateModelSet,
    Dataset,
    FitBundle,
    InfoCriterion,
    MethodWeights,
    QuadraticCriterion,
    ResampleKind,
    ResamplePlan,
)
from mabt.common.validate import check_candidates
from mabt.criteria.quadratic import solve_criterion
from mabt.regression.ols import averaged_fit, fit_all
from mabt.regression.selection import select_model
from mabt.resampling.plans import draw_fullrank_plan, resampled_fit
from mabt.resampling.seeds import SeedSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplicateFit:
    """One resample and every candidate's coefficients on it."""

    plan: ResamplePlan
    thetas: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class GcvSelection:
    """Outcome of choosing m by generalized cross-validation."""

    selected_m: int
    scores: dict[int, float]
    weights: dict[int, MethodWeights] = field(default_factory=dict)
    criteria: dict[int, QuadraticCriterion] = field(default_factory=dict)

    @property
    def criterion(self) -> QuadraticCriterion:
        """BTMA criterion at the selected size."""
        return self.criteria[self.selected_m]


def default_subsample_sizes(n: int) -> tuple[int, int]:
    """The two subsampling sizes: floor(0.632 n) and floor(n^(2/3))."""
    return int(math.floor(0.632 * n)), int(math.floor(n ** (2.0 / 3.0) + 1e-9))


def half_n(n: int) -> int:
    return max(1, n // 2)


def fit_replicate(dataset: Dataset, models: CandidateModelSet, plan: ResamplePlan) -> ReplicateFit:
    """Fit every candidate on one plan's resampled pairs."""
    thetas = tuple(
        resampled_fit(dataset, cols, plan, model_index=q) for q, cols in enumerate(models.models)
    )
    return ReplicateFit(plan=plan, thetas=thetas)


def bootstrap_replicates(
    dataset: Dataset,
    models: CandidateModelSet,
    m: int,
    B: int,
    seeds: SeedSpec,
    kind: ResampleKind = ResampleKind.WITH_REPLACEMENT,
    tag: Optional[str] = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> list[ReplicateFit]:
    """Draw B full-rank plans and fit every candidate on each.

    Raises:
        InvalidSize: If ``B < 1`` or m is impossible for ``kind``.
        RankRetryExhausted: With the index of the failing replicate.
    """
    if B < 1:
        raise InvalidSize(f"B must be at least 1, got {B}", {"B": B})
    check_candidates(models, dataset)
    stream_tag = kind.value if tag is None else tag

    def run(b: int) -> ReplicateFit:
        stream = seeds.generator(b, stream_tag)
        plan = draw_fullrank_plan(dataset, models, m, kind, stream, max_retries, replicate=b)
        return fit_replicate(dataset, models, plan)

    return ordered_map(run, range(B), workers)


def replicate_gram(dataset: Dataset, models: CandidateModelSet, replicate: ReplicateFit) -> np.ndarray:
    """E_b' E_b for one replicate, residuals taken on the original sample."""
    resid = np.column_stack(
        [
            dataset.y - dataset.x[:, list(cols)] @ theta
            for cols, theta in zip(models.models, replicate.thetas)
        ]
    )
    return resid.T @ resid


def criterion_from_replicates(
    dataset: Dataset,
    models: CandidateModelSet,
    replicates: Sequence[ReplicateFit],
    method: str = "BTMA",
    meta: Optional[dict[str, object]] = None,
) -> QuadraticCriterion:
    """Average the replicate Gram matrices into a quadratic criterion."""
    grams = np.stack([replicate_gram(dataset, models, r) for r in replicates])
    a = grams.sum(axis=0) / (dataset.n * len(replicates))
    info: dict[str, object] = {"B": len(replicates)}
    info.update(meta or {})
    return QuadraticCriterion(
        a=0.5 * (a + a.T),
        b=np.zeros(models.size),
        c=0.0,
        method=method,
        dims=models.dims,
        meta=info,
    )


def criterion_from_plans(
    dataset: Dataset,
    models: CandidateModelSet,
    plans: Sequence[ResamplePlan],
    method: str = "BTMA",
) -> QuadraticCriterion:
    """BTMA-type criterion for an explicit list of plans."""
    replicates = [fit_replicate(dataset, models, plan) for plan in plans]
    return criterion_from_replicates(
        dataset, models, replicates, method, {"m": plans[0].m if plans else 0}
    )


def btma_criterion(
    dataset: Dataset,
    models: CandidateModelSet,
    m: Optional[int] = None,
    B: int = DEFAULT_B,
    seeds: SeedSpec = SeedSpec(0),
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> QuadraticCriterion:
    """Bootstrap-pairs model averaging criterion; m defaults to n/2."""
    m = half_n(dataset.n) if m is None else m
    replicates = bootstrap_replicates(
        dataset, models, m, B, seeds, ResampleKind.WITH_REPLACEMENT, "btma", max_retries, workers
    )
    return criterion_from_replicates(dataset, models, replicates, "BTMA", {"m": m})


def subsampling_criterion(
    dataset: Dataset,
    models: CandidateModelSet,
    m: Optional[int] = None,
    B: int = DEFAULT_B,
    seeds: SeedSpec = SeedSpec(0),
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> QuadraticCriterion:
    """Same construction as BTMA with plans drawn without replacement.

    m defaults to floor(0.632 n).
    """
    m = default_subsample_sizes(dataset.n)[0] if m is None else m
    replicates = bootstrap_replicates(
        dataset, models, m, B, seeds, ResampleKind.WITHOUT_REPLACEMENT, "subsampling",
        max_retries, workers,
    )
    return criterion_from_replicates(dataset, models, replicates, "Sub", {"m": m})


def bagging_cp_predict(
    dataset: Dataset,
    models: CandidateModelSet,
    x_new: np.ndarray,
    B: int = DEFAULT_B,
    m: Optional[int] = None,
    seeds: SeedSpec = SeedSpec(0),
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> np.ndarray:
    """Bagged Cp selection: select by Mallows' Cp on each resample, average predictions.

    Each replicate estimates sigma2 from its own largest model. m defaults to n.

    Raises:
        InvalidSize: If a replicate cannot estimate sigma2 (m <= largest dimension).
    """
    m = dataset.n if m is None else m
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    if m <= max(models.dims):
        raise InvalidSize(
            f"Cp bagging needs m > {max(models.dims)} to estimate sigma2, got {m}", {"m": m}
        )
    if B < 1:
        raise InvalidSize(f"B must be at least 1, got {B}", {"B": B})

    def run(b: int) -> np.ndarray:
        stream = seeds.generator(b, "bagging")
        plan = draw_fullrank_plan(
            dataset, models, m, ResampleKind.WITH_REPLACEMENT, stream, max_retries, replicate=b
        )
        return bagged_prediction(dataset.take(plan.indices), models, x_new)

    predictions = ordered_map(run, range(B), workers)
    return np.mean(np.stack(predictions), axis=0)


def bagged_prediction(sample: Dataset, models: CandidateModelSet, x_new: np.ndarray) -> np.ndarray:
    """Prediction of the Cp-selected model fitted on one (re)sample."""
    bundle = fit_all(sample, models)
    chosen = bundle.fits[select_model(bundle, sample.n, InfoCriterion.CP)]
    return x_new[:, list(chosen.columns)] @ chosen.theta_hat


def gcv_score(bundle: FitBundle, dataset: Dataset, weights: np.ndarray) -> float:
    """(||y - mu(w)||^2 / n) / (1 - sum_q w_q k_q / n)^2."""
    n = dataset.n
    effective = float(bundle.dims @ weights)
    if effective >= n:
        return float("inf")
    resid = dataset.y - averaged_fit(bundle, weights)
    return float(resid @ resid / n) / (1.0 - effective / n) ** 2


def gcv_select_m(
    dataset: Dataset,
    models: CandidateModelSet,
    candidate_ms: Sequence[int],
    B: int = DEFAULT_B,
    seeds: SeedSpec = SeedSpec(0),
    bundle: Optional[FitBundle] = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
    tol: float = DEFAULT_QP_TOL,
) -> GcvSelection:
    """Pick the resample size whose BTMA weights minimize the GCV score.

    Ties go to the smaller m. A size for which no full-rank replicate can
    be drawn scores infinity. Every size runs BTMA under ``seeds``, so
    ``btma_criterion(dataset, models, selected_m, B, seeds)`` rebuilds the
    selected criterion exactly.

    Raises:
        InvalidSize: If ``candidate_ms`` is empty, or no size has a finite score.
        RankRetryExhausted: If no size has a finite score and some size failed.
    """
    grid = sorted({int(m) for m in candidate_ms})
    if not grid:
        raise InvalidSize("candidate_ms is empty")
    bundle = fit_all(dataset, models) if bundle is None else bundle
    scores: dict[int, float] = {}
    weights: dict[int, MethodWeights] = {}
    criteria: dict[int, QuadraticCriterion] = {}
    best_m, best_score = grid[0], float("inf")
    failure: Optional[RankRetryExhausted] = None
    for m in grid:
        try:
            criterion = btma_criterion(dataset, models, m, B, seeds, max_retries, workers)
        except RankRetryExhausted as exc:
            logger.warning("GCV skips m=%d: no full-rank replicate", m)
            scores[m], failure = float("inf"), exc
            continue
        chosen = solve_criterion(criterion, tol)
        score = gcv_score(bundle, dataset, chosen.weights)
        scores[m], weights[m], criteria[m] = score, chosen, criterion
        if score < best_score:
            best_m, best_score = m, score
    if math.isinf(best_score):
        if failure is not None:
            raise failure
        raise InvalidSize(
            f"no resample size in {grid} has a finite GCV score", {"candidate_ms": grid}
        )
    logger.debug("GCV scores by m: %s -> %d", scores, best_m)
    return GcvSelection(selected_m=best_m, scores=scores, weights=weights, criteria=criteria)


def resolve_m(
    policy: MPolicy,
    dataset: Dataset,
    models: CandidateModelSet,
    B: int = DEFAULT_B,
    seeds: SeedSpec = SeedSpec(0),
    bundle: Optional[FitBundle] = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> tuple[int, Optional[GcvSelection]]:
    """Resample size for ``dataset`` under ``policy``.

    Returns:
        ``(m, selection)``; ``selection`` is only set for gcv policies. The
        selection was drawn under ``seeds``, the scope later BTMA runs use.
    """
    grid = policy.candidates(dataset.n)
    if policy.kind != "gcv":
        return grid[0], None
    selection = gcv_select_m(dataset, models, grid, B, seeds, bundle, max_retries, workers)
    return selection.selected_m, selection
