"""Bootstrap-pairs and subsampling plans.

A plan records which rows a replicate uses: ``indices`` in draw order and
``counts``, the multiplicity of every original row. With replacement the
counts are Multinomial(m; 1/n, ..., 1/n); without replacement they are 0/1.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np

from mabt.common.config import DEFAULT_MAX_RETRIES
from mabt.common.errors import InvalidSize, RankRetryExhausted
from mabt.common.types import CandidateModelSet, Dataset, ResampleKind, ResamplePlan
from mabt.regression.ols import numerical_rank, solve_least_squares

logger = logging.getLogger(__name__)


def draw_plan(n: int, m: int, kind: ResampleKind, stream: np.random.Generator) -> ResamplePlan:
    """Draw m rows out of n.

    Raises:
        InvalidSize: If ``m < 1`` or, without replacement, ``m > n``.
    """
    if n < 1 or m < 1:
        raise InvalidSize(f"Resample size must be positive (n={n}, m={m})", {"n": n, "m": m})
    if kind is ResampleKind.WITHOUT_REPLACEMENT:
        if m > n:
            raise InvalidSize(
                f"Subsample size {m} exceeds sample size {n}", {"n": n, "m": m}
            )
        indices = stream.choice(n, size=m, replace=False)
    else:
        indices = stream.integers(0, n, size=m)
    return ResamplePlan(
        kind=kind, m=m, counts=np.bincount(indices, minlength=n), indices=indices
    )


def identity_plan(n: int) -> ResamplePlan:
    """Every row exactly once, in order."""
    return ResamplePlan(
        kind=ResampleKind.WITHOUT_REPLACEMENT,
        m=n,
        counts=np.ones(n, dtype=np.int64),
        indices=np.arange(n),
    )


def guard_designs(models: CandidateModelSet) -> list[tuple[int, ...]]:
    """Designs whose rank a replicate must preserve.

    Nested sets only need the largest model; sub-models inherit full rank.
    """
    if models.nested:
        return [models.models[models.largest]]
    return list(models.models)


def draw_fullrank_plan(
    dataset: Dataset,
    models: CandidateModelSet,
    m: int,
    kind: ResampleKind,
    stream: np.random.Generator,
    max_retries: int = DEFAULT_MAX_RETRIES,
    replicate: Optional[int] = None,
) -> ResamplePlan:
    """Draw plans until every guarded design keeps full column rank.

    Raises:
        InvalidSize: As in ``draw_plan`` or when ``max_retries < 1``.
        RankRetryExhausted: If no draw within ``max_retries`` is full rank.
    """
    if max_retries < 1:
        raise InvalidSize(f"max_retries must be at least 1, got {max_retries}")
    designs = guard_designs(models)
    widest = max(len(cols) for cols in designs)
    if m < widest:
        logger.debug("m=%d below model dimension %d; no draw can be full rank", m, widest)
        raise RankRetryExhausted(max_retries, replicate)
    for attempt in range(max_retries):
        plan = draw_plan(dataset.n, m, kind, stream)
        rows = dataset.x[plan.indices]
        if all(numerical_rank(rows[:, list(cols)]) == len(cols) for cols in designs):
            if attempt:
                logger.debug("replicate %s full rank after %d retries", replicate, attempt)
            return plan
    raise RankRetryExhausted(max_retries, replicate)


def resampled_fit(
    dataset: Dataset,
    model: Sequence[int],
    plan: ResamplePlan,
    via: str = "indices",
    model_index: int = 0,
) -> np.ndarray:
    """Least-squares coefficients on the resampled pairs.

    ``via="indices"`` fits the expanded rows; ``via="weights"`` fits the
    original rows weighted by the plan counts. Both solve the same normal
    equations.

    Raises:
        RankDeficient: If the resampled design loses rank.
    """
    cols = list(model)
    if via == "indices":
        x = dataset.x[np.ix_(plan.indices, cols)]
        y = dataset.y[plan.indices]
    elif via == "weights":
        used = np.flatnonzero(plan.counts)
        root = np.sqrt(plan.counts[used].astype(float))
        x = dataset.x[np.ix_(used, cols)] * root[:, None]
        y = dataset.y[used] * root
    else:
        raise ValueError(f"unknown resampled_fit path '{via}'")
    theta, _, _, _ = solve_least_squares(x, y, model_index)
    return theta
