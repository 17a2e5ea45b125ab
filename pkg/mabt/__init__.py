"""mabt: bootstrap model averaging for linear regression.

Public API surface is defined in mabt.api. Only items exported there are
part of the supported interface.

Usage:
    from mabt import make_dataset, CandidateModelSet, btma_criterion, solve_criterion
"""

# Re-export the public API surface
from mabt.api import *  # noqa: F401, F403
from mabt.api import __all__ as _api_all

# Version
from mabt._version import __version__

# Errors (also part of public surface, but kept separate for clarity)
from mabt.common.errors import (
    ConfigError,
    DataError,
    FitError,
    MabtError,
    ResamplingError,
    SolverError,
)

__all__ = [
    "__version__",
    # Errors
    "MabtError",
    "DataError",
    "FitError",
    "ResamplingError",
    "SolverError",
    "ConfigError",
    # Plus everything from api.py
    *_api_all,
]
