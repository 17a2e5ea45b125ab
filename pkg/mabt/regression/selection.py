"""Classical model selection criteria on top of least-squares fits.

AIC and BIC use the Gaussian profile form without additive constants:
``n log(rss/n) + 2k`` and ``n log(rss/n) + k log n``. Lower is better.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from mabt.common.errors import DegenerateFit
from mabt.common.types import FitBundle, InfoCriterion, ModelFit

logger = logging.getLogger(__name__)

_TIE_RTOL = 1e-12


def mallows_cp(fit: ModelFit, sigma2: float, n: int) -> float:
    """Mallows' Cp: rss/n + (2 sigma2 / n) k.

    Raises:
        DegenerateFit: If ``sigma2`` is not positive.
    """
    if not sigma2 > 0:
        raise DegenerateFit(
            f"Mallows Cp needs a positive sigma2, got {sigma2}", {"sigma2": sigma2}
        )
    return fit.rss / n + 2.0 * sigma2 * fit.k / n


def info_criterion(fit: ModelFit, n: int, kind: InfoCriterion) -> float:
    """AIC or BIC of one fit.

    A perfect fit (rss == 0) has no finite value; ``-inf`` is returned as a
    sentinel so selection still prefers it. Smoothing rejects it.
    """
    if fit.rss <= 0.0:
        logger.warning("zero residual sum of squares; %s is -inf", kind.value)
        return float("-inf")
    base = n * math.log(fit.rss / n)
    if kind is InfoCriterion.AIC:
        return base + 2.0 * fit.k
    if kind is InfoCriterion.BIC:
        return base + fit.k * math.log(n)
    raise ValueError(f"info_criterion does not handle {kind}")


def tie_break_argmin(values: Sequence[float], dims: Sequence[int]) -> int:
    """Index of the smallest value; ties go to the smaller dimension, then index."""
    vals = np.asarray(values, dtype=float)
    best = float(np.min(vals))
    if math.isinf(best):
        tied = np.flatnonzero(vals == best)
    else:
        tied = np.flatnonzero(vals <= best + _TIE_RTOL * max(1.0, abs(best)))
    return int(min(tied, key=lambda q: (dims[q], q)))


def criterion_scores(bundle: FitBundle, n: int, rule: InfoCriterion) -> np.ndarray:
    """Score every candidate under AIC, BIC or Cp (Cp uses the full-model sigma2).

    An exact full-model fit leaves sigma2 at zero; Cp then reduces to rss/n.
    """
    if rule is InfoCriterion.CP:
        sigma2 = bundle.sigma2_full if bundle.sigma2_full > 0 else 0.0
        return np.array([(f.rss + 2.0 * sigma2 * f.k) / n for f in bundle.fits])
    return np.array([info_criterion(f, n, rule) for f in bundle.fits])


def select_model(bundle: FitBundle, n: int, rule: InfoCriterion) -> int:
    """Index of the candidate chosen by a selection rule."""
    return tie_break_argmin(criterion_scores(bundle, n, rule), [f.k for f in bundle.fits])
