"""Tests for the simplex-constrained quadratic program."""

import itertools
import unittest

import numpy as np

from mabt.common.errors import NonFinite, SolverError
from mabt.common.types import QPStatus
from mabt.optimize import kkt_residual, solve_simplex_qp


def simplex_grid(size: int, steps: int) -> np.ndarray:
    """All points of the simplex with coordinates on a 1/steps lattice."""
    points = [
        combo + (steps - sum(combo),)
        for combo in itertools.product(range(steps + 1), repeat=size - 1)
        if sum(combo) <= steps
    ]
    return np.array(points, dtype=float) / steps


def grid_minimum(a: np.ndarray, b: np.ndarray, steps: int) -> float:
    w = simplex_grid(a.shape[0], steps)
    return float(np.min(np.einsum("ij,jk,ik->i", w, a, w) + w @ b))


class TestClosedForms(unittest.TestCase):
    """Problems with a known minimizer."""

    def test_identity(self) -> None:
        """Equal curvature splits the weight evenly."""
        sol = solve_simplex_qp(np.eye(2))
        np.testing.assert_allclose(sol.weights, [0.5, 0.5], atol=1e-10)
        self.assertAlmostEqual(sol.objective, 0.5, places=10)
        self.assertEqual(sol.status, QPStatus.CONVERGED)

    def test_diagonal(self) -> None:
        """Weights are inversely proportional to the diagonal."""
        sol = solve_simplex_qp(np.diag([1.0, 2.0]))
        np.testing.assert_allclose(sol.weights, [2.0 / 3.0, 1.0 / 3.0], atol=1e-10)

    def test_linear_on_simplex(self) -> None:
        """a1' + 1a' is indefinite but linear on the simplex; the smallest a wins."""
        a = np.array([1.0, 2.0, 3.0])
        ones = np.ones(3)
        sol = solve_simplex_qp(np.outer(a, ones) + np.outer(ones, a))
        np.testing.assert_array_equal(sol.weights, [1.0, 0.0, 0.0])
        self.assertAlmostEqual(sol.objective, 2.0, places=12)
        self.assertEqual(sol.active_set, (1, 2))

    def test_constant_matrix(self) -> None:
        """Identical candidates: any simplex point is optimal."""
        sol = solve_simplex_qp(np.ones((3, 3)))
        self.assertAlmostEqual(float(sol.weights.sum()), 1.0, places=12)
        self.assertAlmostEqual(sol.objective, 1.0, places=12)

    def test_single_model(self) -> None:
        """One candidate gets all the weight."""
        sol = solve_simplex_qp(np.array([[3.0]]), np.array([1.0]))
        np.testing.assert_array_equal(sol.weights, [1.0])
        self.assertEqual(sol.objective, 4.0)

    def test_linear_term_moves_mass(self) -> None:
        """A large linear penalty pushes the weight to the other vertex."""
        sol = solve_simplex_qp(np.eye(2), np.array([10.0, 0.0]))
        np.testing.assert_array_equal(sol.weights, [0.0, 1.0])


class TestNonconvex(unittest.TestCase):
    """Negative tangent curvature."""

    def test_ridge_logged_and_vertex_kept(self) -> None:
        """An indefinite objective logs the ridge and never loses to a vertex."""
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        with self.assertLogs("mabt.optimize", level="WARNING") as logs:
            sol = solve_simplex_qp(a)
        self.assertTrue(any("ridge" in line for line in logs.output))
        self.assertEqual(sol.objective, 0.0)
        self.assertEqual(sorted(sol.weights.tolist()), [0.0, 1.0])


class TestOracle(unittest.TestCase):
    """Agreement with brute-force grid search."""

    def _check(self, size: int, steps: int, seed: int) -> None:
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((size + 2, size))
        a = g.T @ g / (size + 2)
        b = rng.standard_normal(size) * 0.2
        sol = solve_simplex_qp(a, b)
        self.assertTrue(np.all(sol.weights >= 0.0))
        self.assertAlmostEqual(float(sol.weights.sum()), 1.0, places=12)
        self.assertLessEqual(sol.objective, grid_minimum(a, b, steps) + 1e-9)
        self.assertLessEqual(sol.kkt_residual, 1e-8)

    def test_two_models(self) -> None:
        """M = 2 on a fine grid."""
        for seed in range(5):
            self._check(2, 1000, seed)

    def test_three_models(self) -> None:
        """M = 3 on a fine grid."""
        for seed in range(3):
            self._check(3, 1000, seed)

    def test_four_models(self) -> None:
        """M = 4 on a coarser grid."""
        for seed in range(3):
            self._check(4, 60, seed)

    def test_never_worse_than_vertices(self) -> None:
        """The minimum is at most the best vertex value."""
        rng = np.random.default_rng(11)
        for _ in range(10):
            g = rng.standard_normal((4, 6))
            a = g.T @ g
            sol = solve_simplex_qp(a)
            self.assertLessEqual(sol.objective, float(np.min(np.diag(a))) + 1e-12)

    def test_kkt_residual_at_optimum(self) -> None:
        """The KKT residual vanishes at a known optimum and not elsewhere."""
        a = np.eye(2)
        self.assertAlmostEqual(kkt_residual(a, np.zeros(2), np.array([0.5, 0.5])), 0.0, places=12)
        self.assertGreater(kkt_residual(a, np.zeros(2), np.array([1.0, 0.0])), 0.1)


class TestInvariance(unittest.TestCase):
    """The minimizer does not depend on scale, reruns or model order."""

    def setUp(self) -> None:
        rng = np.random.default_rng(21)
        g = rng.standard_normal((7, 5))
        self.a = g.T @ g / 7
        self.b = rng.standard_normal(5) * 0.3
        self.reference = solve_simplex_qp(self.a, self.b)

    def test_scaling(self) -> None:
        """Multiplying A and b by c > 0 leaves the weights unchanged."""
        for c in (1e-6, 1e-2, 1e3):
            sol = solve_simplex_qp(c * self.a, c * self.b)
            np.testing.assert_allclose(sol.weights, self.reference.weights, atol=1e-7)
            self.assertAlmostEqual(sol.objective / c, self.reference.objective, places=8)

    def test_rerun_identical(self) -> None:
        """Solving the same problem again gives bit-identical weights."""
        again = solve_simplex_qp(self.a.copy(), self.b.copy())
        np.testing.assert_array_equal(again.weights, self.reference.weights)
        self.assertEqual(again.iterations, self.reference.iterations)

    def test_permuted_models(self) -> None:
        """Reordering the candidates reorders the weights and nothing else."""
        perm = np.array([3, 0, 4, 2, 1])
        sol = solve_simplex_qp(self.a[np.ix_(perm, perm)], self.b[perm])
        np.testing.assert_allclose(sol.weights, self.reference.weights[perm], atol=1e-7)


class TestInputs(unittest.TestCase):
    """Input validation and iteration limits."""

    def test_non_finite(self) -> None:
        """NaN in A or b is rejected."""
        with self.assertRaises(NonFinite):
            solve_simplex_qp(np.array([[np.nan, 0.0], [0.0, 1.0]]))
        with self.assertRaises(NonFinite):
            solve_simplex_qp(np.eye(2), np.array([np.inf, 0.0]))

    def test_bad_shapes(self) -> None:
        """Non-square A and wrong-length b are solver errors."""
        with self.assertRaises(SolverError):
            solve_simplex_qp(np.ones((2, 3)))
        with self.assertRaises(SolverError):
            solve_simplex_qp(np.eye(2), np.ones(3))

    def test_iteration_cap(self) -> None:
        """Hitting max_iter is reported, not raised."""
        with self.assertLogs("mabt.optimize", level="WARNING"):
            sol = solve_simplex_qp(np.eye(2), max_iter=1)
        self.assertEqual(sol.status, QPStatus.MAX_ITERATIONS)
        self.assertAlmostEqual(float(sol.weights.sum()), 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
