"""Named weight-selection methods."""

from mabt.methods.registry import (
    METHOD_NAMES,
    Method,
    MethodContext,
    MethodFit,
    MethodRegistry,
    create_default_registry,
    weighted_fit,
)

__all__ = [
    "METHOD_NAMES",
    "Method",
    "MethodContext",
    "MethodFit",
    "MethodRegistry",
    "create_default_registry",
    "weighted_fit",
]
