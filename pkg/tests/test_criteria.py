"""Tests for the weight criteria and resampling-based objectives."""

import dataclasses
import unittest

import numpy as np
from scipy import special

from mabt.common.config import MPolicy
from mabt.common.errors import DegenerateFit, InvalidSize, LeverageOne, RankRetryExhausted
from mabt.common.types import CandidateModelSet, InfoCriterion, QuadraticCriterion, ResampleKind
from mabt.common.validate import make_dataset
from mabt.criteria import (
    bagging_cp_predict,
    bms_select,
    btma_criterion,
    criterion_from_plans,
    default_subsample_sizes,
    gcv_score,
    gcv_select_m,
    half_n,
    jma_criterion,
    loo_residuals,
    mma_criterion,
    resolve_m,
    smoothed_ic_weights,
    solve_criterion,
    subsampling_criterion,
)
from mabt.criteria.bootstrap import bagged_prediction
from mabt.regression import (
    averaged_fit,
    criterion_scores,
    fit_all,
    hat_trace_squared,
    info_criterion,
)
from mabt.resampling import SeedSpec, draw_fullrank_plan, identity_plan


def regression_data(n: int = 40, p: int = 4, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
    y = x @ np.array([1.0, 0.8, 0.4, 0.1][:p]) + rng.standard_normal(n)
    return make_dataset(y, x)


class TestMallowsAveraging(unittest.TestCase):
    """MMA as a quadratic criterion."""

    def setUp(self) -> None:
        self.ds = regression_data()
        self.models = CandidateModelSet.prefixes([1, 2, 3, 4])
        self.bundle = fit_all(self.ds, self.models)
        self.crit = mma_criterion(self.bundle, self.ds.n)

    def test_vertices_are_cp(self) -> None:
        """At a vertex the criterion is Mallows' Cp of that model."""
        vertex = np.diag(self.crit.a) + self.crit.b
        np.testing.assert_allclose(
            vertex, criterion_scores(self.bundle, self.ds.n, InfoCriterion.CP), rtol=1e-12
        )

    def test_objective_matches_direct_evaluation(self) -> None:
        """w'Aw + b'w equals the averaged-fit form at random simplex points."""
        rng = np.random.default_rng(1)
        for w in rng.dirichlet(np.ones(4), size=5):
            resid = self.ds.y - averaged_fit(self.bundle, w)
            direct = resid @ resid / self.ds.n + 2 * self.bundle.sigma2_full * (self.bundle.dims @ w) / self.ds.n
            self.assertAlmostEqual(self.crit.objective(w), float(direct), places=10)

    def test_bms_picks_cp_model(self) -> None:
        """The best vertex is the Cp-selected model."""
        scores = criterion_scores(self.bundle, self.ds.n, InfoCriterion.CP)
        self.assertEqual(bms_select(self.crit), int(np.argmin(scores)))

    def test_solution_beats_every_vertex(self) -> None:
        """Averaging never loses to selection under its own criterion."""
        chosen = solve_criterion(self.crit)
        self.assertLessEqual(chosen.objective, float(np.min(np.diag(self.crit.a) + self.crit.b)) + 1e-12)
        self.assertAlmostEqual(float(chosen.weights.sum()), 1.0, places=12)


class TestJackknifeAveraging(unittest.TestCase):
    """Leave-one-out residuals and JMA."""

    def test_two_points_intercept(self) -> None:
        """With n = 2 and an intercept, LOO residuals are twice the residuals."""
        ds = make_dataset([1.0, 3.0], np.ones((2, 1)))
        bundle = fit_all(ds, CandidateModelSet(models=((0,),)))
        np.testing.assert_allclose(loo_residuals(bundle)[:, 0], 2 * bundle.fits[0].resid, atol=1e-12)

    def test_refit_oracle(self) -> None:
        """Shortcut residuals equal explicit leave-one-out refits."""
        ds = regression_data(n=15)
        models = CandidateModelSet.prefixes([2, 4])
        loo = loo_residuals(fit_all(ds, models))
        for q, cols in enumerate(models.models):
            for i in range(ds.n):
                keep = np.arange(ds.n) != i
                x = ds.x[np.ix_(keep, list(cols))]
                theta, *_ = np.linalg.lstsq(x, ds.y[keep], rcond=None)
                self.assertAlmostEqual(loo[i, q], ds.y[i] - ds.x[i, list(cols)] @ theta, places=9)

    def test_criterion_is_mean_square(self) -> None:
        """A is the LOO Gram matrix over n."""
        ds = regression_data(n=25)
        bundle = fit_all(ds, CandidateModelSet.prefixes([1, 3]))
        loo = loo_residuals(bundle)
        crit = jma_criterion(bundle, ds)
        np.testing.assert_allclose(crit.a, loo.T @ loo / 25, rtol=1e-12)
        np.testing.assert_array_equal(crit.b, np.zeros(2))

    def test_leverage_one(self) -> None:
        """An indicator column fits its row exactly."""
        ds = regression_data(n=10, p=2)
        dummy = np.zeros(10)
        dummy[0] = 1.0
        ds = make_dataset(ds.y, np.column_stack([ds.x, dummy]))
        bundle = fit_all(ds, CandidateModelSet(models=((0,), (0, 2)), nested=True))
        with self.assertRaises(LeverageOne) as ctx:
            jma_criterion(bundle, ds)
        self.assertEqual((ctx.exception.row, ctx.exception.model_index), (0, 1))


class TestSmoothedWeights(unittest.TestCase):
    """Exponentially smoothed AIC and BIC."""

    def test_matches_longhand(self) -> None:
        """w_q is proportional to exp(-IC_q / 2)."""
        ds = regression_data()
        bundle = fit_all(ds, CandidateModelSet.prefixes([1, 2, 3]))
        for kind in (InfoCriterion.AIC, InfoCriterion.BIC):
            ic = np.array([info_criterion(f, ds.n, kind) for f in bundle.fits])
            raw = np.exp(-0.5 * (ic - ic.min()))
            result = smoothed_ic_weights(bundle, ds.n, kind)
            np.testing.assert_allclose(result.weights, raw / raw.sum(), rtol=1e-12)
            self.assertEqual(result.method, f"S-{kind.value}")

    def test_softmax_is_shift_free(self) -> None:
        """Huge criterion values do not overflow."""
        self.assertTrue(np.all(np.isfinite(special.softmax(-0.5 * np.array([1e6, 1e6 + 2.0])))))

    def test_zero_rss_rejected(self) -> None:
        """A perfect fit has no finite criterion and cannot be smoothed."""
        ds = regression_data()
        bundle = fit_all(ds, CandidateModelSet.prefixes([1, 2]))
        perfect = dataclasses.replace(bundle.fits[1], rss=0.0)
        bundle = dataclasses.replace(bundle, fits=(bundle.fits[0], perfect))
        with self.assertRaises(DegenerateFit):
            smoothed_ic_weights(bundle, ds.n, InfoCriterion.BIC)


class TestSelectionOnCriterion(unittest.TestCase):
    """Best single model under a criterion."""

    def test_tie_goes_to_smaller_model(self) -> None:
        """Equal vertex values pick the smaller dimension."""
        crit = QuadraticCriterion(
            a=np.diag([3.0, 1.0, 1.0]), b=np.zeros(3), c=0.0, method="t", dims=(1, 2, 3)
        )
        self.assertEqual(bms_select(crit), 1)

    def test_linear_term_counts(self) -> None:
        """The linear term shifts the vertex values."""
        crit = QuadraticCriterion(
            a=np.diag([1.0, 2.0]), b=np.array([2.0, 0.0]), c=0.0, method="t", dims=(1, 2)
        )
        self.assertEqual(bms_select(crit), 1)


class TestBootstrapCriterion(unittest.TestCase):
    """BTMA and subsampling criteria."""

    def setUp(self) -> None:
        self.ds = regression_data(n=20, p=3, seed=4)
        self.models = CandidateModelSet.prefixes([1, 2, 3])

    def test_identity_plan_gives_residual_gram(self) -> None:
        """Refitting on the original sample reproduces the OLS residual Gram."""
        crit = criterion_from_plans(self.ds, self.models, [identity_plan(20)])
        bundle = fit_all(self.ds, self.models)
        resid = bundle.residual_matrix
        np.testing.assert_allclose(crit.a, resid.T @ resid / 20, rtol=1e-10, atol=1e-12)

    def test_matches_explicit_accumulation(self) -> None:
        """A equals the longhand average of replicate residual Gram matrices."""
        seeds = SeedSpec(5)
        crit = btma_criterion(self.ds, self.models, m=10, B=50, seeds=seeds)
        total = np.zeros((3, 3))
        for b in range(50):
            plan = draw_fullrank_plan(
                self.ds, self.models, 10, ResampleKind.WITH_REPLACEMENT, seeds.generator(b, "btma")
            )
            sample = self.ds.take(plan.indices)
            cols = []
            for model in self.models.models:
                theta, *_ = np.linalg.lstsq(sample.x[:, list(model)], sample.y, rcond=None)
                cols.append(self.ds.y - self.ds.x[:, list(model)] @ theta)
            resid = np.column_stack(cols)
            total += resid.T @ resid
        np.testing.assert_allclose(crit.a, total / (20 * 50), rtol=1e-8)
        self.assertEqual(crit.meta["m"], 10)
        self.assertEqual(crit.meta["B"], 50)

    def test_default_m_is_half_n(self) -> None:
        """Without m the resample size is n/2."""
        crit = btma_criterion(self.ds, self.models, B=3)
        self.assertEqual(crit.meta["m"], 10)
        self.assertEqual(half_n(7), 3)

    def test_worker_count_invariant(self) -> None:
        """Parallel replicates reduce to the same matrix."""
        one = btma_criterion(self.ds, self.models, m=12, B=40, seeds=SeedSpec(8), workers=1)
        many = btma_criterion(self.ds, self.models, m=12, B=40, seeds=SeedSpec(8), workers=4)
        np.testing.assert_allclose(one.a, many.a, rtol=1e-14)

    def test_single_candidate(self) -> None:
        """One model receives weight one."""
        crit = btma_criterion(self.ds, CandidateModelSet.prefixes([2]), m=10, B=5)
        np.testing.assert_array_equal(solve_criterion(crit).weights, [1.0])

    def test_invalid_b(self) -> None:
        """B must be positive."""
        with self.assertRaises(InvalidSize):
            btma_criterion(self.ds, self.models, m=10, B=0)

    def test_full_subsample_is_ols(self) -> None:
        """Subsampling every row reproduces the OLS residual Gram."""
        crit = subsampling_criterion(self.ds, self.models, m=20, B=3)
        resid = fit_all(self.ds, self.models).residual_matrix
        np.testing.assert_allclose(crit.a, resid.T @ resid / 20, rtol=1e-10, atol=1e-12)
        self.assertEqual(crit.method, "Sub")

    def test_subsample_sizes(self) -> None:
        """floor(0.632 n) and floor(n^(2/3))."""
        self.assertEqual(default_subsample_sizes(47), (29, 13))
        self.assertEqual(default_subsample_sizes(100), (63, 21))

    def test_subsample_too_large(self) -> None:
        """Without replacement m cannot exceed n."""
        with self.assertRaises(InvalidSize):
            subsampling_criterion(self.ds, self.models, m=21, B=2)

    def test_risk_expansion_low_dimension(self) -> None:
        """The criterion tracks in-sample error plus (sigma2 / m) tr H(w)^2.

        Low-dimensional true model (intercept only, candidates of one and two
        columns), n = 200, m = 20, B = 5000; at least four of five weight
        vectors fall within a quarter of the bootstrap penalty.
        """
        rng = np.random.default_rng(31)
        n, m = 200, 20
        x = np.column_stack([np.ones(n), rng.standard_normal(n)])
        ds = make_dataset(1.0 + rng.standard_normal(n), x)
        models = CandidateModelSet.prefixes([1, 2])
        bundle = fit_all(ds, models)
        crit = btma_criterion(ds, models, m=m, B=5000, seeds=SeedSpec(32))
        grid = [(1.0, 0.0), (0.0, 1.0), (0.5, 0.5), (0.25, 0.75), (0.75, 0.25)]
        within = 0
        for point in grid:
            w = np.array(point)
            penalty = bundle.sigma2_full / m * hat_trace_squared(ds, models, w)
            resid = ds.y - averaged_fit(bundle, w)
            expansion = float(resid @ resid) / n + penalty
            if abs(crit.objective(w) - expansion) <= 0.25 * penalty:
                within += 1
        self.assertGreaterEqual(within, 4)


class TestBagging(unittest.TestCase):
    """Bagged Cp selection."""

    def test_constant_response(self) -> None:
        """Every replicate predicts the constant."""
        rng = np.random.default_rng(3)
        x = np.column_stack([np.ones(30), rng.standard_normal(30)])
        ds = make_dataset(np.full(30, 5.0), x)
        pred = bagging_cp_predict(ds, CandidateModelSet.prefixes([1, 2]), x[:4], B=10)
        np.testing.assert_allclose(pred, np.full(4, 5.0), atol=1e-10)

    def test_single_replicate_oracle(self) -> None:
        """B = 1 is the Cp-selected prediction on that replicate's rows."""
        ds = regression_data(n=30)
        models = CandidateModelSet.prefixes([1, 2, 4])
        seeds = SeedSpec(2)
        pred = bagging_cp_predict(ds, models, ds.x[:5], B=1, seeds=seeds)
        plan = draw_fullrank_plan(
            ds, models, 30, ResampleKind.WITH_REPLACEMENT, seeds.generator(0, "bagging")
        )
        expected = bagged_prediction(ds.take(plan.indices), models, ds.x[:5])
        np.testing.assert_allclose(pred, expected, rtol=1e-12)

    def test_m_must_exceed_largest_model(self) -> None:
        """sigma2 needs more rows than the largest model has columns."""
        ds = regression_data(n=30)
        with self.assertRaises(InvalidSize):
            bagging_cp_predict(ds, CandidateModelSet.prefixes([1, 4]), ds.x[:2], B=2, m=4)


class TestGcv(unittest.TestCase):
    """Choosing m by generalized cross-validation."""

    def setUp(self) -> None:
        self.ds = regression_data(n=40, p=4, seed=6)
        self.models = CandidateModelSet.prefixes([1, 2, 3, 4])

    def test_score_formula(self) -> None:
        """Mean squared residual over (1 - effective dimension / n)^2."""
        bundle = fit_all(self.ds, self.models)
        w = np.array([0.1, 0.2, 0.3, 0.4])
        resid = self.ds.y - averaged_fit(bundle, w)
        expected = (resid @ resid / 40) / (1 - 3.0 / 40) ** 2
        self.assertAlmostEqual(gcv_score(bundle, self.ds, w), float(expected), places=12)

    def test_single_candidate_returned(self) -> None:
        """A one-point grid selects that point."""
        selection = gcv_select_m(self.ds, self.models, [20], B=10)
        self.assertEqual(selection.selected_m, 20)
        self.assertIn(20, selection.scores)

    def test_selected_has_smallest_score(self) -> None:
        """The chosen m minimizes the recorded scores."""
        selection = gcv_select_m(self.ds, self.models, [10, 20, 30, 40], B=20)
        best = min(selection.scores.values())
        self.assertEqual(selection.scores[selection.selected_m], best)

    def test_infeasible_size_skipped(self) -> None:
        """An m below the model width scores infinity."""
        selection = gcv_select_m(self.ds, self.models, [2, 20], B=10)
        self.assertEqual(selection.scores[2], float("inf"))
        self.assertEqual(selection.selected_m, 20)

    def test_all_sizes_infeasible(self) -> None:
        """No feasible size is an error."""
        with self.assertRaises(RankRetryExhausted):
            gcv_select_m(self.ds, self.models, [2, 3], B=5)

    def test_empty_grid(self) -> None:
        """An empty grid is rejected."""
        with self.assertRaises(InvalidSize):
            gcv_select_m(self.ds, self.models, [], B=5)

    def test_resolve_m_policies(self) -> None:
        """Fixed and half_n policies skip GCV; gcv reports its selection."""
        self.assertEqual(resolve_m(MPolicy("fixed", value=15), self.ds, self.models), (15, None))
        self.assertEqual(resolve_m(MPolicy("half_n"), self.ds, self.models), (20, None))
        m, selection = resolve_m(MPolicy.parse("gcv:20,30"), self.ds, self.models, B=10)
        self.assertIn(m, (20, 30))
        self.assertEqual(selection.selected_m, m)

    def test_selected_criterion_rebuilds(self) -> None:
        """BTMA under the same seeds and the selected m reproduces the stored criterion."""
        seeds = SeedSpec(12)
        selection = gcv_select_m(self.ds, self.models, [10, 20, 30], B=15, seeds=seeds)
        rebuilt = btma_criterion(self.ds, self.models, selection.selected_m, 15, seeds)
        np.testing.assert_array_equal(rebuilt.a, selection.criterion.a)
        np.testing.assert_array_equal(
            solve_criterion(rebuilt).weights, selection.weights[selection.selected_m].weights
        )

    def test_small_m_does_not_abort_selection(self) -> None:
        """A size that exhausts its redraws is skipped, later sizes still run."""
        seeds = SeedSpec(13)
        selection = gcv_select_m(self.ds, self.models, [3, 20], B=10, seeds=seeds)
        self.assertEqual(selection.scores[3], float("inf"))
        self.assertNotIn(3, selection.criteria)
        self.assertIs(selection.criterion, selection.criteria[20])

    def test_no_finite_score_is_an_error(self) -> None:
        """A saturated candidate scores infinity at every m and no m is returned."""
        ds = make_dataset(np.arange(4.0), np.eye(4))
        models = CandidateModelSet.prefixes([4])
        with self.assertRaises(InvalidSize) as ctx:
            gcv_select_m(ds, models, [40, 60], B=3)
        self.assertEqual(ctx.exception.details, {"candidate_ms": [40, 60]})


if __name__ == "__main__":
    unittest.main()
