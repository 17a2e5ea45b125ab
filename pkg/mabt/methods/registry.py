"""Registry of weight-selection methods.

Every method is a handler taking a ``MethodContext`` and returning a
``MethodFit``. Methods must be registered explicitly; names are matched
exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from mabt.common.config import EngineConfig, MPolicy
from mabt.common.errors import ConfigError, UnknownMethod
from mabt.common.types import (
    CandidateModelSet,
    Dataset,
    FitBundle,
    InfoCriterion,
    MethodWeights,
    QuadraticCriterion,
)
from mabt.criteria.bootstrap import (
    GcvSelection,
    bagging_cp_predict,
    btma_criterion,
    default_subsample_sizes,
    resolve_m,
    subsampling_criterion,
)
from mabt.criteria.quadratic import (
    bms_select,
    jma_criterion,
    mma_criterion,
    smoothed_ic_weights,
    solve_criterion,
    unit_weights,
)
from mabt.regression.ols import fit_all, predict_averaged
from mabt.regression.selection import select_model
from mabt.resampling.seeds import SeedSpec

logger = logging.getLogger(__name__)

METHOD_NAMES = (
    "AIC",
    "BIC",
    "Mallows",
    "S-AIC",
    "S-BIC",
    "MMA",
    "JMA",
    "BMS",
    "Sub1",
    "Sub2",
    "Bag",
    "BTMA",
)


@dataclass(frozen=True)
class MethodContext:
    """One dataset and candidate set, shared by every method run on it.

    Bootstrap criteria are cached by (kind, m) so BMS and BTMA reuse the
    same replicates.
    """

    dataset: Dataset
    models: CandidateModelSet
    bundle: FitBundle
    engine: EngineConfig = EngineConfig()
    seeds: SeedSpec = SeedSpec(0)
    m_policy: MPolicy = MPolicy()
    _cache: dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        dataset: Dataset,
        models: CandidateModelSet,
        engine: EngineConfig = EngineConfig(),
        seeds: SeedSpec = SeedSpec(0),
        m_policy: MPolicy = MPolicy(),
    ) -> MethodContext:
        return cls(dataset, models, fit_all(dataset, models), engine, seeds, m_policy)

    def resample_size(self) -> int:
        """m under the context's policy, resolved once."""
        if "m" not in self._cache:
            m, selection = resolve_m(
                self.m_policy,
                self.dataset,
                self.models,
                self.engine.B,
                self.seeds,
                self.bundle,
                self.engine.max_retries,
                self.engine.workers,
            )
            self._cache["m"] = m
            self._cache["gcv"] = selection
        return int(self._cache["m"])

    @property
    def gcv(self) -> Optional[GcvSelection]:
        self.resample_size()
        return self._cache.get("gcv")

    def btma(self) -> QuadraticCriterion:
        m = self.resample_size()
        key = ("btma", m)
        if key not in self._cache and self.gcv is not None:
            self._cache[key] = self.gcv.criterion
        if key not in self._cache:
            engine = self.engine
            self._cache[key] = btma_criterion(
                self.dataset, self.models, m, engine.B, self.seeds, engine.max_retries,
                engine.workers,
            )
        return self._cache[key]


@dataclass(frozen=True)
class MethodFit:
    """Output of one method: weights (None for bagging) and a predictor."""

    method: str
    weights: Optional[np.ndarray]
    predict: Callable[[np.ndarray], np.ndarray]
    meta: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Method:
    """Definition of a registered method."""

    name: str
    description: str
    handler: Callable[[MethodContext], MethodFit]


def weighted_fit(ctx: MethodContext, chosen: MethodWeights, **meta: Any) -> MethodFit:
    """Wrap simplex weights into a fit predicting with the context's bundle."""
    bundle = ctx.bundle

    def predict(x_new: np.ndarray) -> np.ndarray:
        return predict_averaged(bundle, chosen.weights, x_new)

    info = {"objective": chosen.objective, "iterations": chosen.iterations}
    info.update(meta)
    return MethodFit(method=chosen.method, weights=chosen.weights, predict=predict, meta=info)


class MethodRegistry:
    """Registry of available methods."""

    def __init__(self) -> None:
        self._methods: dict[str, Method] = {}

    def register(
        self,
        name: str,
        handler: Callable[[MethodContext], MethodFit],
        description: str = "",
    ) -> None:
        """Register a method.

        Raises:
            ConfigError: If the name is already registered.
        """
        if name in self._methods:
            raise ConfigError([f"method '{name}' is already registered"])
        self._methods[name] = Method(name=name, description=description, handler=handler)

    def unregister(self, name: str) -> None:
        """Remove a method.

        Raises:
            UnknownMethod: If the name is not registered.
        """
        if name not in self._methods:
            raise UnknownMethod(name)
        del self._methods[name]

    def get(self, name: str) -> Optional[Method]:
        return self._methods.get(name)

    def has(self, name: str) -> bool:
        return name in self._methods

    def list_methods(self) -> list[str]:
        return list(self._methods.keys())

    def unknown(self, names: list[str]) -> list[str]:
        """Names not registered, in input order."""
        return [name for name in names if name not in self._methods]

    def fit(self, name: str, ctx: MethodContext) -> MethodFit:
        """Run a method on a context.

        Raises:
            UnknownMethod: If the name is not registered.
        """
        method = self.get(name)
        if method is None:
            raise UnknownMethod(name)
        result = method.handler(ctx)
        logger.debug("method %s fitted (weights=%s)", name, result.weights)
        return result


def _selection(rule: InfoCriterion, label: str) -> Callable[[MethodContext], MethodFit]:
    def handler(ctx: MethodContext) -> MethodFit:
        chosen = select_model(ctx.bundle, ctx.dataset.n, rule)
        return weighted_fit(ctx, unit_weights(ctx.models.size, chosen, label), selected=chosen)

    return handler


def _smoothed(kind: InfoCriterion) -> Callable[[MethodContext], MethodFit]:
    def handler(ctx: MethodContext) -> MethodFit:
        return weighted_fit(ctx, smoothed_ic_weights(ctx.bundle, ctx.dataset.n, kind))

    return handler


def _mma(ctx: MethodContext) -> MethodFit:
    criterion = mma_criterion(ctx.bundle, ctx.dataset.n)
    return weighted_fit(ctx, solve_criterion(criterion, ctx.engine.qp_tol))


def _jma(ctx: MethodContext) -> MethodFit:
    criterion = jma_criterion(ctx.bundle, ctx.dataset)
    return weighted_fit(ctx, solve_criterion(criterion, ctx.engine.qp_tol))


def _btma(ctx: MethodContext) -> MethodFit:
    criterion = ctx.btma()
    return weighted_fit(ctx, solve_criterion(criterion, ctx.engine.qp_tol), m=criterion.meta["m"])


def _bms(ctx: MethodContext) -> MethodFit:
    criterion = ctx.btma()
    chosen = bms_select(criterion)
    return weighted_fit(
        ctx, unit_weights(ctx.models.size, chosen, "BMS"), selected=chosen, m=criterion.meta["m"]
    )


def _subsampling(which: int, label: str) -> Callable[[MethodContext], MethodFit]:
    def handler(ctx: MethodContext) -> MethodFit:
        m = default_subsample_sizes(ctx.dataset.n)[which]
        engine = ctx.engine
        criterion = subsampling_criterion(
            ctx.dataset, ctx.models, m, engine.B, ctx.seeds, engine.max_retries, engine.workers
        )
        chosen = solve_criterion(criterion, engine.qp_tol)
        return weighted_fit(
            ctx, MethodWeights(chosen.weights, label, chosen.objective, chosen.iterations), m=m
        )

    return handler


def _bagging(ctx: MethodContext) -> MethodFit:
    engine = ctx.engine
    m = ctx.dataset.n

    def predict(x_new: np.ndarray) -> np.ndarray:
        return bagging_cp_predict(
            ctx.dataset, ctx.models, x_new, engine.B, m, ctx.seeds, engine.max_retries,
            engine.workers,
        )

    return MethodFit(method="Bag", weights=None, predict=predict, meta={"m": m})


def create_default_registry() -> MethodRegistry:
    """Registry with every built-in averaging and selection method."""
    registry = MethodRegistry()
    registry.register("AIC", _selection(InfoCriterion.AIC, "AIC"), "AIC model selection")
    registry.register("BIC", _selection(InfoCriterion.BIC, "BIC"), "BIC model selection")
    registry.register("Mallows", _selection(InfoCriterion.CP, "Mallows"), "Mallows Cp selection")
    registry.register("S-AIC", _smoothed(InfoCriterion.AIC), "Smoothed AIC weights")
    registry.register("S-BIC", _smoothed(InfoCriterion.BIC), "Smoothed BIC weights")
    registry.register("MMA", _mma, "Mallows model averaging")
    registry.register("JMA", _jma, "Jackknife model averaging")
    registry.register("BMS", _bms, "Bootstrap model selection")
    registry.register("Sub1", _subsampling(0, "Sub1"), "Subsampling averaging, m = 0.632 n")
    registry.register("Sub2", _subsampling(1, "Sub2"), "Subsampling averaging, m = n^(2/3)")
    registry.register("Bag", _bagging, "Bagged Cp selection")
    registry.register("BTMA", _btma, "Bootstrap model averaging")
    return registry
