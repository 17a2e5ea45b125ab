"""Configuration defaults, engine settings and resample-size policies."""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

DEFAULT_B = 500
DEFAULT_U = 500
DEFAULT_MAX_RETRIES = 100
DEFAULT_LEVEL = 0.95
DEFAULT_QP_TOL = 1e-8
SCHEMA_VERSION = 1

THREADS_ENV = "MABT_THREADS"


def workers_from_env(env: Optional[Mapping[str, str]] = None) -> int:
    """Resolve the worker cap from ``MABT_THREADS`` (0 or unset means auto)."""
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV, "").strip()
    try:
        requested = int(raw) if raw else 0
    except ValueError:
        requested = 0
    if requested <= 0:
        return max(1, os.cpu_count() or 1)
    return requested


@dataclass(frozen=True)
class EngineConfig:
    """Settings shared by every bootstrap-driven computation."""

    B: int = DEFAULT_B
    max_retries: int = DEFAULT_MAX_RETRIES
    qp_tol: float = DEFAULT_QP_TOL
    workers: int = 1


@dataclass(frozen=True)
class MPolicy:
    """Resample-size rule: ``fixed``, ``half_n`` or ``gcv`` over a grid.

    An empty gcv grid means the default grid n/4, n/2, 3n/4, n.
    """

    kind: str = "half_n"
    value: int = 0
    grid: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> MPolicy:
        """Parse ``N``, ``half_n``, ``gcv`` or ``gcv:a,b,c``.

        Raises:
            ValueError: If the text matches none of the forms.
        """
        text = text.strip()
        if text == "half_n":
            return cls("half_n")
        if text == "gcv":
            return cls("gcv")
        if text.startswith("gcv:"):
            grid = tuple(int(tok) for tok in text[4:].split(",") if tok.strip())
            if not grid:
                raise ValueError("gcv grid is empty")
            return cls("gcv", grid=grid)
        return cls("fixed", value=int(text))

    def label(self) -> str:
        if self.kind == "fixed":
            return str(self.value)
        if self.kind == "gcv" and self.grid:
            return "gcv:" + ",".join(str(m) for m in self.grid)
        return self.kind

    def candidates(self, n: int) -> tuple[int, ...]:
        """Candidate resample sizes for a sample of size ``n``."""
        if self.kind == "fixed":
            return (self.value,)
        if self.kind == "half_n":
            return (max(1, n // 2),)
        if self.grid:
            return tuple(sorted(set(self.grid)))
        return tuple(sorted({max(1, n // 4), max(1, n // 2), max(1, (3 * n) // 4), n}))
