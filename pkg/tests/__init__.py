"""Unit tests for mabt."""
