"""Out-of-sample prediction study over repeated random train/test splits.

Standardization and variable ordering are estimated on each training split
alone and then applied to its test rows. MSPE is reported in the
standardized response scale.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from mabt.common.codec import to_plain
from mabt.common.config import DEFAULT_B, SCHEMA_VERSION, EngineConfig, MPolicy
from mabt.common.errors import ConfigError, MabtError
from mabt.common.hashing import config_digest
from mabt.common.parallel import ordered_map
from mabt.common.types import Dataset
from mabt.io.data import StandardizeTransform, fit_standardize, nested_from_order, order_variables_cp
from mabt.methods.registry import MethodContext, MethodRegistry, create_default_registry
from mabt.resampling.seeds import SeedSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitConfig:
    """Repeated random splits with ``train_n`` training rows each."""

    train_n: int
    splits: int = 1000
    methods: tuple[str, ...] = ("BTMA",)
    m: MPolicy = field(default_factory=MPolicy)
    B: int = DEFAULT_B
    seed: int = 0


def validate_split_config(
    config: SplitConfig, n_total: int, registry: Optional[MethodRegistry] = None
) -> list[str]:
    errors: list[str] = []
    if not 2 <= config.train_n < n_total:
        errors.append(f"train_n must lie in 2..{n_total - 1}, got {config.train_n}")
    if config.splits < 1:
        errors.append(f"splits must be at least 1, got {config.splits}")
    if config.B < 1:
        errors.append(f"B must be at least 1, got {config.B}")
    if not config.methods:
        errors.append("at least one method is required")
    if registry is not None:
        errors.extend(f"unknown method '{name}'" for name in registry.unknown(list(config.methods)))
    return errors


@dataclass(frozen=True)
class MspeSummary:
    method: str
    mean: float
    variance: float
    n_ok: int
    n_failed: int


@dataclass
class PredictionReport:
    """Per-method MSPE mean and variance across splits."""

    config: dict[str, Any]
    train_n: int
    splits: int
    summaries: list[MspeSummary] = field(default_factory=list)
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def config_digest(self) -> str:
        return config_digest(to_plain({"kind": "predict", "config": self.config}))

    def summary(self, method: str) -> MspeSummary:
        for row in self.summaries:
            if row.method == method:
                return row
        raise KeyError(method)

    def to_records(self) -> list[dict[str, Any]]:
        records = []
        for row in self.summaries:
            for metric, value in (("mspe_mean", row.mean), ("mspe_var", row.variance)):
                records.append(
                    {
                        "method": row.method,
                        "metric": metric,
                        "value": value,
                        "n_ok": row.n_ok,
                        "n_failed": row.n_failed,
                        "train_n": self.train_n,
                        "splits": self.splits,
                    }
                )
        return records

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "predict",
            "config": self.config,
            "config_digest": self.config_digest,
            "train_n": self.train_n,
            "splits": self.splits,
            "summaries": [asdict(row) for row in self.summaries],
            "failures": self.failures,
        }


def split_mspe(
    train: Dataset,
    test: Dataset,
    methods: Sequence[str],
    engine: EngineConfig = EngineConfig(),
    seeds: SeedSpec = SeedSpec(0),
    m_policy: MPolicy = MPolicy(),
    registry: Optional[MethodRegistry] = None,
    transform: Optional[StandardizeTransform] = None,
) -> tuple[dict[str, float], dict[str, MabtError]]:
    """Test MSPE of every method for one split.

    ``transform`` defaults to the one estimated on ``train``.

    Returns:
        ``(mspe, errors)`` keyed by method name.
    """
    registry = create_default_registry() if registry is None else registry
    transform = fit_standardize(train) if transform is None else transform
    train_std, test_std = transform.apply(train), transform.apply(test)
    models = nested_from_order(order_variables_cp(train_std))
    ctx = MethodContext.build(train_std, models, engine, seeds, m_policy)
    mspe: dict[str, float] = {}
    errors: dict[str, MabtError] = {}
    for name in methods:
        try:
            pred = registry.fit(name, ctx).predict(test_std.x)
        except MabtError as exc:
            errors[name] = exc
            continue
        mspe[name] = float(np.mean((test_std.y - pred) ** 2))
    return mspe, errors


def evaluate_splits(
    dataset: Dataset,
    config: SplitConfig,
    registry: Optional[MethodRegistry] = None,
    workers: int = 1,
) -> PredictionReport:
    """MSPE of each method over ``config.splits`` uniform random splits.

    Raises:
        ConfigError: Listing every configuration problem.
    """
    registry = create_default_registry() if registry is None else registry
    errors = validate_split_config(config, dataset.n, registry)
    if errors:
        raise ConfigError(errors)
    seeds = SeedSpec(config.seed)
    engine = EngineConfig(B=config.B)
    methods = list(config.methods)

    def run(s: int) -> tuple[dict[str, float], dict[str, str]]:
        split_seeds = seeds.child(s)
        perm = split_seeds.generator(0, "split").permutation(dataset.n)
        train = dataset.take(np.sort(perm[: config.train_n]))
        test = dataset.take(np.sort(perm[config.train_n :]))
        try:
            mspe, failed = split_mspe(
                train, test, methods, engine, split_seeds.child(1), config.m, registry
            )
        except MabtError as exc:
            logger.warning("split %d failed with %s", s, type(exc).__name__)
            return {}, {name: type(exc).__name__ for name in methods}
        return mspe, {name: type(exc).__name__ for name, exc in failed.items()}

    outcomes = ordered_map(run, range(config.splits), workers)
    echo = to_plain({**asdict(config), "m": config.m.label()})
    report = PredictionReport(config=echo, train_n=config.train_n, splits=config.splits)
    for name in methods:
        values = np.array([o[0][name] for o in outcomes if name in o[0]])
        failed = sum(1 for o in outcomes if name in o[1])
        ddof = 1 if values.size > 1 else 0
        mean = float(values.mean()) if values.size else float("nan")
        var = float(values.var(ddof=ddof)) if values.size else float("nan")
        report.summaries.append(MspeSummary(name, mean, var, int(values.size), failed))
    report.failures = [
        {"split": s, "method": name, "error": err}
        for s, o in enumerate(outcomes)
        for name, err in o[1].items()
    ]
    return report
