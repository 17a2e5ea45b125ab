"""Report writers: deterministic JSON and tidy CSV."""

from __future__ import annotations

import io
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional, TextIO, Union

import pandas as pd

from mabt.common.codec import serialize_deterministic

FLOAT_FORMAT = "%.12g"

_LEADING = ("method", "metric", "coef", "value", "mc_se", "n_ok", "n_failed")


def _emit(text: str, out: Optional[Union[str, Path]], stream: Optional[TextIO]) -> None:
    if out is None:
        (stream or sys.stdout).write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="\n")


def render_json(payload: dict[str, Any]) -> str:
    return serialize_deterministic(payload) + "\n"


def render_csv(records: Sequence[dict[str, Any]]) -> str:
    """Tidy CSV with the summary columns first and the rest sorted."""
    frame = pd.DataFrame(list(records))
    leading = [c for c in _LEADING if c in frame.columns]
    frame = frame[leading + sorted(c for c in frame.columns if c not in leading)]
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n", float_format=FLOAT_FORMAT)
    return buffer.getvalue()


def write_report(
    payload: dict[str, Any],
    records: Sequence[dict[str, Any]],
    fmt: str = "json",
    out: Optional[Union[str, Path]] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """Write a report as JSON (full payload) or CSV (tidy records).

    Raises:
        ValueError: If ``fmt`` is neither ``json`` nor ``csv``.
    """
    if fmt == "json":
        _emit(render_json(payload), out, stream)
    elif fmt == "csv":
        _emit(render_csv(records), out, stream)
    else:
        raise ValueError(f"unknown output format '{fmt}'")
