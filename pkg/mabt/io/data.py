"""CSV ingestion, standardization and Cp-based variable ordering."""

from __future__ import annotations

import csv
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from mabt.common.errors import MissingColumn, NonNumeric, ParseError, ZeroVariance
from mabt.common.types import CandidateModelSet, Dataset
from mabt.common.validate import make_dataset
from mabt.regression.ols import fit_ols
from mabt.regression.selection import tie_break_argmin

logger = logging.getLogger(__name__)

INTERCEPT = "(Intercept)"

_LINE_RE = re.compile(r"line (\d+)")


def load_csv(path: Union[str, Path], response_column: str) -> Dataset:
    """Read a numeric CSV with a header row into a dataset.

    The response is extracted, the other columns are kept in file order and
    an intercept column is prepended. Row numbers in errors count data rows
    from 1.

    Raises:
        ParseError: If the file cannot be tokenized or a row is short.
        MissingColumn: If ``response_column`` is not in the header.
        NonNumeric: If a cell is not a finite number.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as exc:
        raise ParseError(0, 0, "file is empty") from exc
    except pd.errors.ParserError as exc:
        match = _LINE_RE.search(str(exc))
        row = int(match.group(1)) - 1 if match else -1
        raise ParseError(row, -1, str(exc).strip()) from exc

    frame.columns = [str(c).strip() for c in frame.columns]
    if response_column not in frame.columns:
        raise MissingColumn(response_column)

    short = _first_short_record(path, len(frame.columns))
    if short is not None:
        raise ParseError(short[0], short[1], "missing field")

    values = np.empty(frame.shape, dtype=float)
    for col_idx, name in enumerate(frame.columns):
        raw = frame[name]
        parsed = pd.to_numeric(raw.str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(parsed)
        if bad.any():
            row = int(np.argmax(bad))
            raise NonNumeric(row + 1, name, raw.iloc[row])
        values[:, col_idx] = parsed

    regressors = [c for c in frame.columns if c != response_column]
    y = values[:, list(frame.columns).index(response_column)]
    x = np.column_stack(
        [np.ones(len(frame))] + [values[:, list(frame.columns).index(c)] for c in regressors]
    )
    logger.debug("loaded %d rows, %d regressors from %s", len(frame), len(regressors), path)
    return make_dataset(y, x, [INTERCEPT, *regressors])


def _first_short_record(path: Union[str, Path], width: int) -> Optional[tuple[int, int]]:
    """Data row and first absent column of the first record with fewer than
    ``width`` fields. pandas pads such records with empty strings.

    Blank lines are skipped, as the parser does, so row numbers line up.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        records = (record for record in csv.reader(fh) if record)
        next(records, None)
        for row, record in enumerate(records, start=1):
            if len(record) < width:
                return row, len(record)
    return None


@dataclass(frozen=True)
class StandardizeTransform:
    """Column means and sample standard deviations from a fitting sample.

    Intercept columns (all ones) keep mean 0 and scale 1.
    """

    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    y_scale: float

    def apply(self, dataset: Dataset) -> Dataset:
        return Dataset(
            y=(dataset.y - self.y_mean) / self.y_scale,
            x=(dataset.x - self.x_mean) / self.x_scale,
            column_names=dataset.column_names,
        )

    def inverse_response(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=float) * self.y_scale + self.y_mean


def intercept_columns(x: np.ndarray) -> np.ndarray:
    """Mask of columns that are identically one."""
    return np.all(x == 1.0, axis=0)


def fit_standardize(dataset: Dataset, response_name: str = "response") -> StandardizeTransform:
    """Estimate the transform (denominator n - 1).

    Raises:
        ZeroVariance: If the response or a non-intercept column is constant.
    """
    intercept = intercept_columns(dataset.x)
    ddof = 1 if dataset.n > 1 else 0
    x_mean = dataset.x.mean(axis=0)
    x_scale = dataset.x.std(axis=0, ddof=ddof)
    for j in np.flatnonzero(~intercept & ~(x_scale > 0)):
        raise ZeroVariance(dataset.column_label(int(j)))
    y_scale = float(dataset.y.std(ddof=ddof))
    if not y_scale > 0:
        raise ZeroVariance(response_name)
    x_mean[intercept] = 0.0
    x_scale[intercept] = 1.0
    return StandardizeTransform(x_mean, x_scale, float(dataset.y.mean()), y_scale)


def standardize(dataset: Dataset) -> tuple[Dataset, StandardizeTransform]:
    """Center and scale the response and non-intercept columns."""
    transform = fit_standardize(dataset)
    return transform.apply(dataset), transform


def order_variables_cp(dataset: Dataset, intercept: bool = True) -> tuple[int, ...]:
    """Greedy forward ordering of the regressors by Mallows' Cp.

    Each step adds the column whose inclusion gives the smallest Cp, with
    sigma2 from the full model. Equal Cp values go to the smaller index.

    Returns:
        Regressor column indices in inclusion order, intercept excluded.

    Raises:
        RankDeficient: If the full pool is rank deficient; the index is that of
            the full model among the nested candidates built from the order.
    """
    n = dataset.n
    base = [0] if intercept else []
    remaining = [j for j in range(dataset.p) if j not in base]
    full = fit_ols(dataset, range(dataset.p), model_index=dataset.p - 1)
    sigma2 = full.rss / (n - full.k) if n > full.k else 0.0

    order: list[int] = []
    while remaining:
        cp = []
        for j in remaining:
            cols = base + order + [j]
            fit = fit_ols(dataset, cols, model_index=len(cols) - 1)
            cp.append((fit.rss + 2.0 * sigma2 * fit.k) / n)
        pick = remaining[tie_break_argmin(cp, [0] * len(remaining))]
        order.append(pick)
        remaining.remove(pick)
    return tuple(order)


def nested_from_order(order: Sequence[int], intercept: bool = True) -> CandidateModelSet:
    """Prefix candidates of an ordering: intercept alone, then one more column each."""
    head = (0,) if intercept else ()
    start = 0 if intercept else 1
    models = tuple(head + tuple(order[:i]) for i in range(start, len(order) + 1))
    return CandidateModelSet(models=models, nested=True)
