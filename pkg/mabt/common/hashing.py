"""Hashing utilities for mabt.

SHA-256 is used for two things: fingerprinting run configurations in
reports, and turning string tags ("btma", "data", ...) into the integer
words of a ``numpy.random.SeedSequence`` spawn key.
"""

from __future__ import annotations

import hashlib
from typing import Any

from mabt.common.codec import serialize_deterministic


def compute_hash(data: bytes, algorithm: str = "sha256") -> str:
    """Compute the hex digest of raw bytes.

    Raises:
        ValueError: If an unsupported algorithm is requested.
    """
    if algorithm != "sha256":
        raise ValueError(f"Unsupported hash algorithm: {algorithm}")
    return hashlib.sha256(data).hexdigest()


def compute_hash_str(text: str, algorithm: str = "sha256") -> str:
    """Compute the hex digest of a UTF-8 string."""
    return compute_hash(text.encode("utf-8"), algorithm)


def config_digest(data: dict[str, Any]) -> str:
    """Fingerprint a configuration mapping, independent of key order."""
    return compute_hash_str(serialize_deterministic(data))


def tag_key(tag: str) -> int:
    """Map a stream tag to a stable 32-bit word."""
    return int(compute_hash_str(tag)[:8], 16)
