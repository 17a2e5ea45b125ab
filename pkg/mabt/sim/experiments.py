"""Seeded Monte Carlo experiments: risk, coverage, resample-size sweeps.

Every repetition draws its data from ``seeds.child(rep)`` and runs its
methods on sub-streams of that scope, so a rep's outcome does not depend on
which worker ran it. Reductions happen in rep order. Failures are counted
per method and reported next to the summaries.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from mabt.common.codec import to_plain
from mabt.common.config import SCHEMA_VERSION, EngineConfig, MPolicy
from mabt.common.errors import CoefficientNotInModel, MabtError, UnknownMethod
from mabt.common.hashing import config_digest
from mabt.common.parallel import ordered_map
from mabt.common.types import (
    CandidateModelSet,
    ConfidenceInterval,
    Dataset,
    FitBundle,
    InfoCriterion,
    LimitKind,
    QuadraticCriterion,
)
from mabt.criteria.bootstrap import GcvSelection, btma_criterion, resolve_m
from mabt.criteria.quadratic import jma_criterion, mma_criterion, solve_criterion
from mabt.inference.asymptotics import AsymptoticInputs, estimate_asymptotics, simulate_limit_draws
from mabt.inference.intervals import ci_averaging, ci_bms_bootstrap, ci_ols_z
from mabt.methods.registry import MethodContext, MethodRegistry, create_default_registry
from mabt.regression.ols import fit_all
from mabt.regression.selection import select_model
from mabt.resampling.seeds import SeedSpec
from mabt.sim.designs import CI_CASE_M0, CICaseConfig, HansenConfig, gen_ci_case, gen_hansen

logger = logging.getLogger(__name__)

COVERAGE_METHODS = ("JUST", "FULL", "AIC", "BIC", "BMS", "MMA", "JMA", "BTMA")


@dataclass(frozen=True)
class MetricSummary:
    """Monte Carlo mean of one metric for one method."""

    method: str
    metric: str
    value: float
    mc_se: float
    n_ok: int
    n_failed: int
    coef: Optional[int] = None


@dataclass(frozen=True)
class Failure:
    rep: int
    method: str
    error: str
    message: str


@dataclass
class ExperimentReport:
    """Summaries plus the configuration echo that produced them."""

    kind: str
    config: dict[str, Any]
    seed: int
    methods: list[str]
    summaries: list[MetricSummary] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)

    @property
    def config_digest(self) -> str:
        return config_digest(
            to_plain({"kind": self.kind, "config": self.config, "seed": self.seed,
                      "methods": self.methods})
        )

    def summary(self, method: str, metric: str, coef: Optional[int] = None) -> MetricSummary:
        for row in self.summaries:
            if row.method == method and row.metric == metric and row.coef == coef:
                return row
        raise KeyError((method, metric, coef))

    def to_records(self) -> list[dict[str, Any]]:
        """Tidy rows, one per (method, metric[, coef]), with config fields."""
        flat = {f"config.{k}": v for k, v in sorted(_flatten(self.config).items())}
        records = []
        for row in self.summaries:
            record: dict[str, Any] = {
                "method": row.method,
                "metric": row.metric,
                "coef": row.coef,
                "value": row.value,
                "mc_se": row.mc_se,
                "n_ok": row.n_ok,
                "n_failed": row.n_failed,
                "seed": self.seed,
            }
            record.update(flat)
            records.append(record)
        return records

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "methods": self.methods,
            "summaries": [asdict(row) for row in self.summaries],
            "failures": [asdict(f) for f in self.failures],
        }


class RiskReport(ExperimentReport):
    """Mean loss ||mu_hat - mu||^2 and oracle ratio per method."""


class CoverageReport(ExperimentReport):
    """Coverage probability and mean interval length per method and coefficient."""


def _flatten(data: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            out[name] = ",".join(str(v) for v in value)
        else:
            out[name] = value
    return out


def summarize(values: Sequence[float]) -> tuple[float, float]:
    """Mean and Monte Carlo standard error (zero with a single value)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def _summary(
    method: str, metric: str, values: list[float], failed: int, coef: Optional[int] = None
) -> MetricSummary:
    mean, se = summarize(values)
    return MetricSummary(method, metric, mean, se, len(values), failed, coef)


def _check_methods(methods: Sequence[str], known: Sequence[str]) -> None:
    for name in methods:
        if name not in known:
            raise UnknownMethod(name)


def _config_echo(config: Any) -> dict[str, Any]:
    echo = asdict(config)
    echo["m"] = config.m.label()
    return to_plain(echo)


# -----------------------------------------------------------------------------
# Risk
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class _RiskOutcome:
    loss: dict[str, float]
    ratio: dict[str, float]
    failures: list[Failure]


def _risk_rep(
    config: HansenConfig,
    methods: Sequence[tuple[str, str, MPolicy]],
    registry: MethodRegistry,
    rep: int,
    seeds: SeedSpec,
) -> _RiskOutcome:
    rep_seeds = seeds.child(rep)
    dataset, mu, models = gen_hansen(config, rep_seeds.generator(0, "data"))
    loss: dict[str, float] = {}
    ratio: dict[str, float] = {}
    failures: list[Failure] = []
    try:
        bundle = fit_all(dataset, models)
    except MabtError as exc:
        for label, _, _ in methods:
            failures.append(Failure(rep, label, type(exc).__name__, exc.message))
        return _RiskOutcome(loss, ratio, failures)

    oracle = min(float(np.sum((f.mu_hat - mu) ** 2)) for f in bundle.fits)
    engine = EngineConfig(B=config.B)
    contexts: dict[str, MethodContext] = {}
    for label, name, policy in methods:
        ctx = contexts.get(policy.label())
        if ctx is None:
            ctx = MethodContext(dataset, models, bundle, engine, rep_seeds.child(1), policy)
            contexts[policy.label()] = ctx
        try:
            mu_hat = registry.fit(name, ctx).predict(dataset.x)
        except MabtError as exc:
            logger.warning("rep %d: %s failed with %s", rep, label, type(exc).__name__)
            failures.append(Failure(rep, label, type(exc).__name__, exc.message))
            continue
        loss[label] = float(np.sum((mu_hat - mu) ** 2))
        if oracle > 0:
            ratio[label] = loss[label] / oracle
    return _RiskOutcome(loss, ratio, failures)


def _run_risk(
    kind: str,
    config: HansenConfig,
    methods: Sequence[tuple[str, str, MPolicy]],
    seeds: SeedSpec,
    registry: MethodRegistry,
    workers: int,
    echo: dict[str, Any],
) -> RiskReport:
    labels = [label for label, _, _ in methods]
    report = RiskReport(kind=kind, config=echo, seed=seeds.master_seed, methods=labels)
    logger.info("%s experiment start: reps=%d digest=%s", kind, config.reps, report.config_digest)
    outcomes = ordered_map(
        lambda rep: _risk_rep(config, methods, registry, rep, seeds), range(config.reps), workers
    )
    for label in labels:
        failed = sum(1 for o in outcomes for f in o.failures if f.method == label)
        losses = [o.loss[label] for o in outcomes if label in o.loss]
        ratios = [o.ratio[label] for o in outcomes if label in o.ratio]
        report.summaries.append(_summary(label, "risk", losses, failed))
        report.summaries.append(_summary(label, "oracle_ratio", ratios, failed))
    report.failures = [f for o in outcomes for f in o.failures]
    logger.info("%s experiment done: %d failures", kind, len(report.failures))
    return report


def run_risk_experiment(
    config: HansenConfig,
    methods: Sequence[str],
    seeds: SeedSpec,
    registry: Optional[MethodRegistry] = None,
    workers: int = 1,
) -> RiskReport:
    """Monte Carlo risk of each method on the infinite-order design.

    Raises:
        UnknownMethod: If a method name is not registered.
    """
    registry = create_default_registry() if registry is None else registry
    _check_methods(methods, registry.list_methods())
    specs = [(name, name, config.m) for name in methods]
    echo = _config_echo(config)
    return _run_risk("risk", config, specs, seeds, registry, workers, echo)


def run_m_sweep(
    config: HansenConfig,
    m_policies: Sequence[MPolicy],
    seeds: SeedSpec,
    workers: int = 1,
) -> RiskReport:
    """BTMA risk under several resample-size rules, on shared data."""
    registry = create_default_registry()
    specs = [(f"BTMA[m={policy.label()}]", "BTMA", policy) for policy in m_policies]
    echo = _config_echo(config)
    echo["m_policies"] = [policy.label() for policy in m_policies]
    return _run_risk("m-sweep", config, specs, seeds, registry, workers, echo)


# -----------------------------------------------------------------------------
# Coverage
# -----------------------------------------------------------------------------


@dataclass
class _CoverageRep:
    """Lazily computed per-rep quantities shared by interval methods.

    Bootstrap work runs under ``seeds.child(2)``: GCV, the BTMA weights and
    the BMS replicates at the chosen m are the same draws. The limit law
    uses the design's M0 under-fitted candidates.
    """

    config: CICaseConfig
    dataset: Dataset
    models: CandidateModelSet
    bundle: FitBundle
    seeds: SeedSpec
    _m: Optional[int] = None
    _gcv: Optional[GcvSelection] = None
    _inputs: Optional[AsymptoticInputs] = None
    _draws: dict[LimitKind, Any] = field(default_factory=dict)
    _weights: dict[LimitKind, Any] = field(default_factory=dict)

    def m(self) -> int:
        if self._m is None:
            self._m, self._gcv = resolve_m(
                self.config.m, self.dataset, self.models, self.config.B, self.bootstrap_seeds,
                self.bundle,
            )
        return self._m

    @property
    def bootstrap_seeds(self) -> SeedSpec:
        return self.seeds.child(2)

    def btma(self) -> QuadraticCriterion:
        m = self.m()
        if self._gcv is not None:
            return self._gcv.criterion
        return btma_criterion(self.dataset, self.models, m, self.config.B, self.bootstrap_seeds)

    def inputs(self) -> AsymptoticInputs:
        if self._inputs is None:
            self._inputs = estimate_asymptotics(
                self.dataset, self.models, self.m(), CI_CASE_M0, self.bundle
            )
        return self._inputs

    def averaging(self, kind: LimitKind, j: int) -> ConfidenceInterval:
        if kind not in self._weights:
            if kind is LimitKind.BTMA:
                criterion = self.btma()
            elif kind is LimitKind.MMA:
                criterion = mma_criterion(self.bundle, self.dataset.n)
            else:
                criterion = jma_criterion(self.bundle, self.dataset)
            self._weights[kind] = solve_criterion(criterion)
            self._draws[kind] = simulate_limit_draws(
                self.inputs(), self.config.U, kind, self.seeds.child(3)
            )
        return ci_averaging(
            self.dataset, self.models, self._weights[kind], self._draws[kind], j,
            self.config.level, self.bundle,
        )


def _selected_ols(state: _CoverageRep, rule: InfoCriterion, label: str, j: int) -> ConfidenceInterval:
    chosen = select_model(state.bundle, state.dataset.n, rule)
    try:
        return ci_ols_z(
            state.dataset, state.models.models[chosen], j, state.config.level,
            model_index=chosen, method=label,
        )
    except CoefficientNotInModel:
        return ConfidenceInterval(0.0, 0.0, state.config.level, label, j)


def _fixed_ols(
    index: Callable[[CandidateModelSet], int], label: str
) -> Callable[[_CoverageRep, int], ConfidenceInterval]:
    def interval(state: _CoverageRep, j: int) -> ConfidenceInterval:
        q = index(state.models)
        return ci_ols_z(
            state.dataset, state.models.models[q], j, state.config.level,
            model_index=q, method=label,
        )

    return interval


INTERVALS: dict[str, Callable[[_CoverageRep, int], ConfidenceInterval]] = {
    "JUST": _fixed_ols(lambda models: CI_CASE_M0, "JUST"),
    "FULL": _fixed_ols(lambda models: models.largest, "FULL"),
    "AIC": lambda state, j: _selected_ols(state, InfoCriterion.AIC, "AIC", j),
    "BIC": lambda state, j: _selected_ols(state, InfoCriterion.BIC, "BIC", j),
    "BMS": lambda state, j: ci_bms_bootstrap(
        state.dataset, state.models, state.m(), state.config.B, j, state.config.level,
        state.bootstrap_seeds,
    ),
    "MMA": lambda state, j: state.averaging(LimitKind.MMA, j),
    "JMA": lambda state, j: state.averaging(LimitKind.JMA, j),
    "BTMA": lambda state, j: state.averaging(LimitKind.BTMA, j),
}


@dataclass(frozen=True)
class _CoverageOutcome:
    covered: dict[tuple[str, int], bool]
    length: dict[tuple[str, int], float]
    failures: list[Failure]


def _coverage_rep(
    config: CICaseConfig, methods: Sequence[str], rep: int, seeds: SeedSpec
) -> _CoverageOutcome:
    rep_seeds = seeds.child(rep)
    dataset, beta = gen_ci_case(config, rep_seeds.generator(0, "data"))
    models = config.models()
    covered: dict[tuple[str, int], bool] = {}
    length: dict[tuple[str, int], float] = {}
    failures: list[Failure] = []
    try:
        bundle = fit_all(dataset, models)
    except MabtError as exc:
        failures.extend(Failure(rep, name, type(exc).__name__, exc.message) for name in methods)
        return _CoverageOutcome(covered, length, failures)
    state = _CoverageRep(config, dataset, models, bundle, rep_seeds.child(1))
    for name in methods:
        try:
            intervals = [INTERVALS[name](state, j) for j in config.coefs]
        except MabtError as exc:
            logger.warning("rep %d: %s failed with %s", rep, name, type(exc).__name__)
            failures.append(Failure(rep, name, type(exc).__name__, exc.message))
            continue
        for j, ci in zip(config.coefs, intervals):
            covered[(name, j)] = ci.covers(float(beta[j]))
            length[(name, j)] = ci.length
    return _CoverageOutcome(covered, length, failures)


def run_coverage_experiment(
    config: CICaseConfig,
    methods: Sequence[str],
    seeds: SeedSpec,
    workers: int = 1,
) -> CoverageReport:
    """Coverage probability and mean length of each interval method.

    Raises:
        UnknownMethod: If a name is not an interval method.
    """
    _check_methods(methods, COVERAGE_METHODS)
    methods = list(methods)
    report = CoverageReport(
        kind="coverage", config=_config_echo(config), seed=seeds.master_seed, methods=methods
    )
    logger.info("coverage experiment start: reps=%d digest=%s", config.reps, report.config_digest)
    outcomes = ordered_map(
        lambda rep: _coverage_rep(config, methods, rep, seeds), range(config.reps), workers
    )
    for name in methods:
        failed = sum(1 for o in outcomes for f in o.failures if f.method == name)
        for j in config.coefs:
            hits = [float(o.covered[(name, j)]) for o in outcomes if (name, j) in o.covered]
            lengths = [o.length[(name, j)] for o in outcomes if (name, j) in o.length]
            report.summaries.append(_summary(name, "cp", hits, failed, j))
            report.summaries.append(_summary(name, "length", lengths, failed, j))
    report.failures = [f for o in outcomes for f in o.failures]
    logger.info("coverage experiment done: %d failures", len(report.failures))
    return report


def underfit_weight_mass(
    config: CICaseConfig, m: int, reps: int, seeds: SeedSpec, workers: int = 1
) -> MetricSummary:
    """Mean total BTMA weight on the under-fitted candidates at resample size m."""

    def run(rep: int) -> Optional[float]:
        rep_seeds = seeds.child(rep)
        dataset, _ = gen_ci_case(config, rep_seeds.generator(0, "data"))
        try:
            criterion = btma_criterion(dataset, config.models(), m, config.B, rep_seeds.child(1))
        except MabtError as exc:
            logger.warning("rep %d: BTMA failed with %s", rep, type(exc).__name__)
            return None
        return float(np.sum(solve_criterion(criterion).weights[:CI_CASE_M0]))

    masses = ordered_map(run, range(reps), workers)
    ok = [v for v in masses if v is not None]
    return _summary("BTMA", f"underfit_weight[m={m}]", ok, len(masses) - len(ok))
