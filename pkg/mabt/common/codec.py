"""Codec utilities for deterministic serialization.

All JSON output is produced with sorted keys and compact separators so a
rerun with the same inputs and seed is byte-identical. numpy scalars and
arrays are converted to plain Python values first.
"""

from __future__ import annotations

import json
import math
from enum import Enum
from typing import Any

import numpy as np


def to_plain(data: Any) -> Any:
    """Convert numpy values, enums and tuples into JSON-ready Python values.

    Non-finite floats become ``None`` so the output stays strict JSON.
    """
    if isinstance(data, dict):
        return {str(k): to_plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_plain(v) for v in data]
    if isinstance(data, np.ndarray):
        return [to_plain(v) for v in data.tolist()]
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, (np.integer,)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        return value if math.isfinite(value) else None
    if isinstance(data, np.bool_):
        return bool(data)
    return data


def serialize_deterministic(data: Any) -> str:
    """Serialize data to JSON with deterministic ordering.

    Args:
        data: Data to serialize; numpy content is converted first.

    Returns:
        JSON string with sorted keys and no extra whitespace.

    Raises:
        TypeError: If data is not JSON-serializable after conversion.
    """
    return json.dumps(to_plain(data), sort_keys=True, separators=(",", ":"), allow_nan=False)


def deserialize(data: str) -> Any:
    """Deserialize a JSON string.

    Raises:
        json.JSONDecodeError: If data is not valid JSON.
    """
    return json.loads(data)
