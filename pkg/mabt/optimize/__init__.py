"""Simplex-constrained quadratic programming."""

from mabt.optimize.simplex_qp import kkt_residual, solve_simplex_qp

__all__ = ["kkt_residual", "solve_simplex_qp"]
