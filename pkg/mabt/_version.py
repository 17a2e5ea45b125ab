"""Version information for mabt."""

__version__ = "0.1.0"
