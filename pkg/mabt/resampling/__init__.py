"""Resample plans and counter-derived random streams."""

from mabt.resampling.plans import (
    draw_fullrank_plan,
    draw_plan,
    guard_designs,
    identity_plan,
    resampled_fit,
)
from mabt.resampling.seeds import SeedSpec

__all__ = [
    "SeedSpec",
    "draw_fullrank_plan",
    "draw_plan",
    "guard_designs",
    "identity_plan",
    "resampled_fit",
]
