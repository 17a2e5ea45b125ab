"""Validation utilities for mabt.

Validators return a list of problems (empty when valid) so callers can
report everything at once; the ``make_*`` helpers raise with the full list.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Optional

import numpy as np

from mabt.common.errors import DataError, DimensionMismatch
from mabt.common.types import CandidateModelSet, Dataset


def validate_arrays(y: np.ndarray, x: np.ndarray) -> list[str]:
    """Check shapes and finiteness of a response/regressor pair."""
    errors: list[str] = []
    if y.ndim != 1:
        errors.append(f"y must be one-dimensional, got shape {y.shape}")
    if x.ndim != 2:
        errors.append(f"x must be two-dimensional, got shape {x.shape}")
    if errors:
        return errors
    if y.shape[0] < 1:
        errors.append("n must be at least 1")
    if x.shape[1] < 1:
        errors.append("p must be at least 1")
    if x.shape[0] != y.shape[0]:
        errors.append(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
    if not np.all(np.isfinite(y)):
        errors.append("y contains non-finite values")
    if not np.all(np.isfinite(x)):
        errors.append("x contains non-finite values")
    return errors


def make_dataset(
    y: Any, x: Any, column_names: Optional[Sequence[str]] = None
) -> Dataset:
    """Build a validated ``Dataset``.

    Raises:
        DataError: Listing every shape or finiteness problem found.
    """
    y_arr = np.asarray(y, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim == 1:
        x_arr = x_arr.reshape(-1, 1)
    errors = validate_arrays(y_arr, x_arr)
    names = tuple(column_names) if column_names is not None else None
    if names is not None and x_arr.ndim == 2 and len(names) != x_arr.shape[1]:
        errors.append(f"{len(names)} column names for {x_arr.shape[1]} columns")
    if errors:
        raise DataError("Invalid dataset: " + "; ".join(errors), {"errors": errors})
    return Dataset(y=y_arr, x=x_arr, column_names=names)


def validate_candidates(models: CandidateModelSet, n: int, p: int) -> list[str]:
    """Check candidate models against a pool of ``p`` columns and ``n`` rows."""
    errors: list[str] = []
    if models.size == 0:
        errors.append("candidate set is empty")
    limit = min(n - 1, p)
    for q, cols in enumerate(models.models):
        if not cols:
            errors.append(f"model {q} is empty")
            continue
        if len(set(cols)) != len(cols):
            errors.append(f"model {q} repeats a column")
        bad = [c for c in cols if c < 0 or c >= p]
        if bad:
            errors.append(f"model {q} indexes columns outside 0..{p - 1}: {bad}")
        if len(cols) > limit:
            errors.append(f"model {q} has {len(cols)} columns, limit is min(n-1, p) = {limit}")
    if models.nested:
        for q in range(1, models.size):
            prev, cur = set(models.models[q - 1]), set(models.models[q])
            if not (prev < cur):
                errors.append(f"model {q - 1} is not a strict subset of model {q}")
    return errors


def check_candidates(models: CandidateModelSet, dataset: Dataset) -> None:
    """Raise ``DimensionMismatch`` if the candidate set does not fit the dataset."""
    errors = validate_candidates(models, dataset.n, dataset.p)
    if errors:
        raise DimensionMismatch("Invalid candidate set: " + "; ".join(errors), {"errors": errors})
