"""Subcommand dispatch for the command-line front end.

``RunConfig`` is the parsed command line. ``validate_run_config`` returns
every problem at once; ``dispatch`` runs one subcommand and writes its
report. ``run`` adds the error handling and exit codes used by ``main``.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import asdict, dataclass
from typing import Any, Callable, Optional, TextIO

from mabt.common.codec import to_plain
from mabt.common.config import (
    DEFAULT_B,
    DEFAULT_LEVEL,
    DEFAULT_U,
    SCHEMA_VERSION,
    EngineConfig,
    MPolicy,
    workers_from_env,
)
from mabt.common.errors import ConfigError, MabtError, UnknownSubcommand
from mabt.common.hashing import config_digest
from mabt.common.types import Dataset, LimitKind
from mabt.inference.intervals import ci_bms_bootstrap, ci_model_averaging
from mabt.io.data import load_csv, nested_from_order, order_variables_cp
from mabt.io.prediction import SplitConfig, evaluate_splits
from mabt.io.reports import render_json, write_report
from mabt.methods.registry import METHOD_NAMES, MethodContext, create_default_registry
from mabt.regression.ols import averaged_coefficients
from mabt.resampling.seeds import SeedSpec
from mabt.sim.designs import CICaseConfig, HansenConfig
from mabt.sim.experiments import (
    COVERAGE_METHODS,
    run_coverage_experiment,
    run_risk_experiment,
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("fit", "ci", "risk-sim", "coverage-sim", "predict")
CI_METHODS = ("BTMA", "MMA", "JMA", "BMS")
FORMATS = ("json", "csv")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    subcommand: str
    input: Optional[str] = None
    response: Optional[str] = None
    methods: Optional[tuple[str, ...]] = None
    m: Optional[str] = None
    B: int = DEFAULT_B
    U: int = DEFAULT_U
    seed: int = 0
    level: float = DEFAULT_LEVEL
    train_n: Optional[int] = None
    splits: int = 1000
    out: Optional[str] = None
    format: str = "json"
    coef: tuple[str, ...] = ()
    case: int = 1
    eta: float = 0.5
    n: Optional[int] = None
    alpha: float = 1.0
    r2: float = 0.5
    reps: int = 100

    def method_list(self) -> tuple[str, ...]:
        if self.methods:
            return self.methods
        if self.subcommand == "risk-sim":
            return METHOD_NAMES
        if self.subcommand == "coverage-sim":
            return COVERAGE_METHODS
        return ("BTMA",)

    def m_policy(self) -> MPolicy:
        if self.m is not None:
            return MPolicy.parse(self.m)
        return MPolicy("gcv") if self.subcommand == "coverage-sim" else MPolicy()


def _allowed_methods(subcommand: str) -> tuple[str, ...]:
    if subcommand == "coverage-sim":
        return COVERAGE_METHODS
    if subcommand == "ci":
        return CI_METHODS
    return METHOD_NAMES


def validate_run_config(config: RunConfig) -> list[str]:
    """All problems with a run configuration (empty when valid)."""
    errors: list[str] = []
    sub = config.subcommand
    if sub in ("fit", "ci", "predict"):
        if not config.input:
            errors.append(f"{sub} requires --input")
        if not config.response:
            errors.append(f"{sub} requires --response")
    if sub == "predict" and config.train_n is None:
        errors.append("predict requires --train-n")
    if sub == "ci" and not config.coef:
        errors.append("ci requires --coef")
    if sub in ("risk-sim", "coverage-sim") and config.n is None:
        errors.append(f"{sub} requires --n")

    allowed = _allowed_methods(sub)
    for name in config.method_list():
        if name not in allowed:
            errors.append(f"unknown method '{name}' for {sub}")
    try:
        policy = config.m_policy()
        if policy.kind == "fixed" and policy.value < 1:
            errors.append(f"--m must be positive, got {policy.value}")
        if any(m < 1 for m in policy.grid):
            errors.append(f"gcv grid entries must be positive: {policy.label()}")
    except ValueError:
        errors.append(f"--m must be N, half_n, gcv or gcv:a,b,c, got '{config.m}'")

    for flag, value in (("--B", config.B), ("--U", config.U), ("--splits", config.splits),
                        ("--reps", config.reps)):
        if value < 1:
            errors.append(f"{flag} must be at least 1, got {value}")
    if config.n is not None and config.n < 1:
        errors.append(f"--n must be at least 1, got {config.n}")
    if config.train_n is not None and config.train_n < 2:
        errors.append(f"--train-n must be at least 2, got {config.train_n}")
    if not 0.0 < config.level < 1.0:
        errors.append(f"--level must lie in (0, 1), got {config.level}")
    if config.format not in FORMATS:
        errors.append(f"--format must be one of {', '.join(FORMATS)}, got '{config.format}'")
    if config.case not in (1, 2):
        errors.append(f"--case must be 1 or 2, got {config.case}")
    if config.eta < 0:
        errors.append(f"--eta must be non-negative, got {config.eta}")
    if not 0.0 < config.r2 < 1.0:
        errors.append(f"--r2 must lie in (0, 1), got {config.r2}")
    if config.alpha <= 0:
        errors.append(f"--alpha must be positive, got {config.alpha}")
    return errors


def _echo(config: RunConfig) -> dict[str, Any]:
    echo = to_plain(asdict(config))
    echo["methods"] = list(config.method_list())
    echo["m"] = config.m_policy().label()
    return echo


def _payload(kind: str, config: RunConfig, body: dict[str, Any]) -> dict[str, Any]:
    echo = _echo(config)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "config": echo,
        "config_digest": config_digest(echo),
        **body,
    }


def _load(config: RunConfig) -> Dataset:
    assert config.input is not None and config.response is not None
    return load_csv(config.input, config.response)


def _resolve_coef(dataset: Dataset, token: str) -> int:
    names = dataset.column_names or ()
    if token in names:
        return names.index(token)
    try:
        j = int(token)
    except ValueError:
        raise ConfigError([f"unknown coefficient '{token}'"]) from None
    if not 0 <= j < dataset.p:
        raise ConfigError([f"coefficient index {j} outside 0..{dataset.p - 1}"])
    return j


def _cmd_fit(config: RunConfig, stream: Optional[TextIO]) -> None:
    dataset = _load(config)
    models = nested_from_order(order_variables_cp(dataset))
    engine = EngineConfig(B=config.B, workers=workers_from_env())
    ctx = MethodContext.build(dataset, models, engine, SeedSpec(config.seed), config.m_policy())
    registry = create_default_registry()
    names = dataset.column_names or ()
    results: dict[str, Any] = {}
    records: list[dict[str, Any]] = []
    for method in config.method_list():
        fit = registry.fit(method, ctx)
        entry: dict[str, Any] = {"fitted": fit.predict(dataset.x), "meta": fit.meta}
        if fit.weights is not None:
            beta = averaged_coefficients(ctx.bundle, fit.weights, dataset.p)
            entry["weights"] = fit.weights
            entry["coefficients"] = dict(zip(names, beta))
            records.extend(
                {"method": method, "metric": "weight", "coef": q, "value": w}
                for q, w in enumerate(fit.weights)
            )
            records.extend(
                {"method": method, "metric": "coefficient", "coef": j, "value": b}
                for j, b in enumerate(beta)
            )
        results[method] = entry
    body = {
        "n": dataset.n,
        "columns": list(names),
        "models": [[names[c] for c in cols] for cols in models.models],
        "m": ctx.resample_size(),
        "methods": results,
    }
    if ctx.gcv is not None:
        body["gcv_scores"] = ctx.gcv.scores
    write_report(_payload("fit", config, body), records, config.format, config.out, stream)


def _cmd_ci(config: RunConfig, stream: Optional[TextIO]) -> None:
    dataset = _load(config)
    models = nested_from_order(order_variables_cp(dataset))
    coefs = [_resolve_coef(dataset, token) for token in config.coef]
    workers = workers_from_env()
    seeds = SeedSpec(config.seed)
    ctx = MethodContext.build(dataset, models, EngineConfig(B=config.B, workers=workers),
                              seeds.child(0), config.m_policy())
    m = ctx.resample_size()
    intervals = []
    for method in config.method_list():
        for j in coefs:
            if method == "BMS":
                ci = ci_bms_bootstrap(dataset, models, m, config.B, j, config.level,
                                      seeds.child(0), workers=workers)
            else:
                ci = ci_model_averaging(dataset, models, LimitKind(method), j, config.level, m,
                                        config.B, config.U, seeds, workers=workers)
            intervals.append(
                {"method": ci.method, "coef": j, "name": dataset.column_label(j),
                 "lower": ci.lower, "upper": ci.upper, "level": ci.level}
            )
    records = [
        {"method": row["method"], "metric": bound, "coef": row["coef"], "value": row[bound]}
        for row in intervals
        for bound in ("lower", "upper")
    ]
    body = {"n": dataset.n, "m": m, "intervals": intervals}
    write_report(_payload("ci", config, body), records, config.format, config.out, stream)


def _cmd_risk(config: RunConfig, stream: Optional[TextIO]) -> None:
    assert config.n is not None
    hansen = HansenConfig(n=config.n, alpha=config.alpha, r2=config.r2, reps=config.reps,
                          B=config.B, m=config.m_policy())
    report = run_risk_experiment(hansen, config.method_list(), SeedSpec(config.seed),
                                 workers=workers_from_env())
    write_report(report.to_dict(), report.to_records(), config.format, config.out, stream)


def _cmd_coverage(config: RunConfig, stream: Optional[TextIO]) -> None:
    assert config.n is not None
    case = CICaseConfig(case=config.case, n=config.n, eta=config.eta, reps=config.reps,
                        U=config.U, B=config.B, level=config.level, m=config.m_policy())
    report = run_coverage_experiment(case, config.method_list(), SeedSpec(config.seed),
                                     workers=workers_from_env())
    write_report(report.to_dict(), report.to_records(), config.format, config.out, stream)


def _cmd_predict(config: RunConfig, stream: Optional[TextIO]) -> None:
    assert config.train_n is not None
    dataset = _load(config)
    split = SplitConfig(train_n=config.train_n, splits=config.splits,
                        methods=config.method_list(), m=config.m_policy(), B=config.B,
                        seed=config.seed)
    report = evaluate_splits(dataset, split, workers=workers_from_env())
    write_report(report.to_dict(), report.to_records(), config.format, config.out, stream)


COMMANDS: dict[str, Callable[[RunConfig, Optional[TextIO]], None]] = {
    "fit": _cmd_fit,
    "ci": _cmd_ci,
    "risk-sim": _cmd_risk,
    "coverage-sim": _cmd_coverage,
    "predict": _cmd_predict,
}


def dispatch(config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Validate and run one subcommand.

    Raises:
        UnknownSubcommand: If the subcommand is not known.
        ConfigError: Listing every configuration problem.
        MabtError: Whatever the subcommand raises.
    """
    if config.subcommand not in COMMANDS:
        raise UnknownSubcommand(config.subcommand)
    errors = validate_run_config(config)
    if errors:
        raise ConfigError(errors)
    logger.info("running %s (seed=%d)", config.subcommand, config.seed)
    COMMANDS[config.subcommand](config, stream)
    return EXIT_OK


def run(config: RunConfig, stream: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Dispatch and map failures to exit codes with a JSON error object on stderr."""
    err = sys.stderr if err is None else err
    try:
        return dispatch(config, stream)
    except ConfigError as exc:
        err.write(render_json(exc.to_dict()))
        return EXIT_CONFIG
    except MabtError as exc:
        err.write(render_json(exc.to_dict()))
        return EXIT_RUNTIME
    except OSError as exc:
        err.write(render_json({"error": type(exc).__name__, "message": str(exc), "details": {}}))
        return EXIT_RUNTIME
