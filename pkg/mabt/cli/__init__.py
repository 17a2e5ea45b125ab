"""Command-line front end."""

from mabt.cli.dispatch import (
    COMMANDS,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_RUNTIME,
    SUBCOMMANDS,
    RunConfig,
    dispatch,
    run,
    validate_run_config,
)

__all__ = [
    "COMMANDS",
    "EXIT_CONFIG",
    "EXIT_OK",
    "EXIT_RUNTIME",
    "SUBCOMMANDS",
    "RunConfig",
    "dispatch",
    "run",
    "validate_run_config",
]
