"""Simulation designs: the infinite-order regression for risk and the two
coefficient cases for interval coverage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from mabt.common.config import DEFAULT_B, DEFAULT_LEVEL, DEFAULT_U, MPolicy
from mabt.common.errors import ConfigError, SigmaNotPD
from mabt.common.types import CandidateModelSet, Dataset

CI_CASE_K = 10
CI_CASE_M0 = 4


@dataclass(frozen=True)
class HansenConfig:
    """Infinite-order design: theta_j = c sqrt(2 alpha) j^(-alpha - 1/2)."""

    n: int
    alpha: float = 1.0
    r2: float = 0.5
    p: int = 100
    reps: int = 100
    B: int = DEFAULT_B
    m: MPolicy = field(default_factory=MPolicy)

    @property
    def c(self) -> float:
        return math.sqrt(self.r2 / (1.0 - self.r2))

    @property
    def num_models(self) -> int:
        """M = floor(3 n^(1/3))."""
        return int(math.floor(3.0 * self.n ** (1.0 / 3.0) + 1e-9))

    def theta(self) -> np.ndarray:
        j = np.arange(1, self.p + 1, dtype=float)
        return self.c * math.sqrt(2.0 * self.alpha) * j ** (-self.alpha - 0.5)

    def models(self) -> CandidateModelSet:
        return CandidateModelSet.prefixes(range(1, self.num_models + 1))


def validate_hansen_config(config: HansenConfig) -> list[str]:
    errors: list[str] = []
    if not 0.0 < config.r2 < 1.0:
        errors.append(f"r2 must lie in (0, 1), got {config.r2}")
    if config.alpha <= 0:
        errors.append(f"alpha must be positive, got {config.alpha}")
    if config.n < 2:
        errors.append(f"n must be at least 2, got {config.n}")
    if config.reps < 1:
        errors.append(f"reps must be at least 1, got {config.reps}")
    if config.B < 1:
        errors.append(f"B must be at least 1, got {config.B}")
    if config.n >= 2 and config.num_models > min(config.n - 1, config.p):
        errors.append(
            f"{config.num_models} nested models do not fit n={config.n}, p={config.p}"
        )
    return errors


def gen_hansen(
    config: HansenConfig, stream: np.random.Generator
) -> tuple[Dataset, np.ndarray, CandidateModelSet]:
    """One sample of the infinite-order design.

    Returns:
        ``(dataset, mu_true, models)`` with nested models of sizes 1..M.

    Raises:
        ConfigError: If the configuration is invalid.
    """
    errors = validate_hansen_config(config)
    if errors:
        raise ConfigError(errors)
    x = np.empty((config.n, config.p))
    x[:, 0] = 1.0
    x[:, 1:] = stream.standard_normal((config.n, config.p - 1))
    mu = x @ config.theta()
    y = mu + stream.standard_normal(config.n)
    return Dataset(y=y, x=x), mu, config.models()


@dataclass(frozen=True)
class CICaseConfig:
    """Coverage design with k = 10 regressors, six of them active.

    Case 1 has decaying coefficients (1, 1, c, c^2, c^3, c^4, 0, ...), Case 2
    the reversed tail (1, 1, c^4, c^3, c^2, c, 0, ...).
    """

    case: int = 1
    n: int = 100
    eta: float = 0.5
    rho: float = 0.7
    c: float = 0.5
    reps: int = 500
    U: int = DEFAULT_U
    B: int = DEFAULT_B
    level: float = DEFAULT_LEVEL
    m: MPolicy = field(default_factory=lambda: MPolicy("gcv"))
    coefs: tuple[int, ...] = (2, 3)

    def beta(self) -> np.ndarray:
        c = self.c
        tail = [c, c**2, c**3, c**4] if self.case == 1 else [c**4, c**3, c**2, c]
        return np.array([1.0, 1.0, *tail, 0.0, 0.0, 0.0, 0.0])

    def sigma_x(self) -> np.ndarray:
        size = CI_CASE_K - 1
        sigma = np.full((size, size), self.rho**2)
        np.fill_diagonal(sigma, self.rho)
        return sigma

    def models(self) -> CandidateModelSet:
        """Nested candidates of sizes 2..10; the first four are under-fitted."""
        return CandidateModelSet.prefixes(range(2, CI_CASE_K + 1))


def validate_ci_case_config(config: CICaseConfig) -> list[str]:
    errors: list[str] = []
    if config.case not in (1, 2):
        errors.append(f"case must be 1 or 2, got {config.case}")
    if config.n <= CI_CASE_K:
        errors.append(f"n must exceed {CI_CASE_K}, got {config.n}")
    if config.eta < 0:
        errors.append(f"eta must be non-negative, got {config.eta}")
    if config.reps < 1:
        errors.append(f"reps must be at least 1, got {config.reps}")
    if config.U < 1:
        errors.append(f"U must be at least 1, got {config.U}")
    if config.B < 1:
        errors.append(f"B must be at least 1, got {config.B}")
    if not 0.0 <= config.level <= 1.0:
        errors.append(f"level must lie in [0, 1], got {config.level}")
    bad = [j for j in config.coefs if not 0 <= j < CI_CASE_K]
    if bad:
        errors.append(f"coefficients outside 0..{CI_CASE_K - 1}: {bad}")
    return errors


def gen_ci_case(config: CICaseConfig, stream: np.random.Generator) -> tuple[Dataset, np.ndarray]:
    """One sample of the coverage design.

    Raises:
        ConfigError: If the configuration is invalid.
        SigmaNotPD: If the regressor covariance is not positive definite.
    """
    errors = validate_ci_case_config(config)
    if errors:
        raise ConfigError(errors)
    try:
        chol = linalg.cholesky(config.sigma_x(), lower=True)
    except linalg.LinAlgError as exc:
        raise SigmaNotPD(f"Regressor covariance with rho={config.rho} is not positive definite") from exc
    x = np.empty((config.n, CI_CASE_K))
    x[:, 0] = 1.0
    x[:, 1:] = stream.standard_normal((config.n, CI_CASE_K - 1)) @ chol.T
    beta = config.beta()
    y = x @ beta + config.eta * stream.standard_normal(config.n)
    return Dataset(y=y, x=x), beta
