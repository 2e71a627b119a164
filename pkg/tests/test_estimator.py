import numpy as np
import pytest
from hypothesis import given, settings

from helpers import EXAMPLE_SIGMA, random_feasible, random_pd, seeds
from wkf.errors import InvalidInputError
from wkf.estimator import AffineEstimator, apply, bayes_estimator, mse_under, solve_robust_mmse
from wkf.frank_wolfe import FWConfig
from wkf.gaussian import Gaussian, gelbrich_distance
from wkf.objective import estimator_gain
from wkf.oracles import mse_monte_carlo

ZERO2 = np.zeros(2)


class TestSolveRobust:
    def test_zero_radius(self):
        eq = solve_robust_mmse(ZERO2, EXAMPLE_SIGMA, 1, 1, FWConfig(rho=0.0))
        assert eq.estimator.G[0, 0] == pytest.approx(1 / 1.1, abs=1e-15)
        assert eq.estimator.g[0] == 0.0

    def test_intercept(self):
        eq = solve_robust_mmse([1.0, 2.0], EXAMPLE_SIGMA, 1, 1, FWConfig(rho=0.0))
        G = eq.estimator.G[0, 0]
        assert eq.estimator.g[0] == pytest.approx(1 - 2 * G)

    def test_gain_shrinks(self):
        gains = [solve_robust_mmse(ZERO2, EXAMPLE_SIGMA, 1, 1, FWConfig(rho=r)).estimator.G[0, 0]
                 for r in (0.0, 0.1, 0.5, 1.0)]
        assert np.all(np.diff(gains) < 0) and gains[-1] > 0

    def test_mean_length(self):
        with pytest.raises(InvalidInputError):
            solve_robust_mmse(np.zeros(3), EXAMPLE_SIGMA, 1, 1, FWConfig(rho=0.1))

    def test_equilibrium_invariants(self):
        rng = np.random.default_rng(4)
        mu = rng.standard_normal(5)
        Sigma = random_pd(5, rng)
        eq = solve_robust_mmse(mu, Sigma, 3, 2, FWConfig(rho=0.8))
        center = Gaussian(mu, Sigma)
        assert gelbrich_distance(eq.least_favorable, center) <= 0.8 + 1e-6
        assert eq.worst_case_mse == pytest.approx(np.trace(eq.posterior_cov), abs=1e-9)
        # the robust estimator is Bayesian for its least favorable prior
        np.testing.assert_allclose(eq.estimator.G, estimator_gain(eq.least_favorable.cov, n=3))
        assert mse_under(eq.estimator, eq.least_favorable) == pytest.approx(eq.worst_case_mse,
                                                                           rel=1e-10)

    def test_monotone_in_radius(self):
        Sigma = random_pd(4, np.random.default_rng(8))
        vals = [solve_robust_mmse(np.zeros(4), Sigma, 2, 2, FWConfig(rho=r)).worst_case_mse
                for r in (0.0, 0.1, 0.5, 1.0)]
        assert np.all(np.diff(vals) > 0)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_translation_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        Sigma = random_pd(4, rng)
        shift = rng.standard_normal(4) * 3
        a = solve_robust_mmse(np.zeros(4), Sigma, 2, 2, FWConfig(rho=0.5))
        b = solve_robust_mmse(shift, Sigma, 2, 2, FWConfig(rho=0.5))
        np.testing.assert_array_equal(a.estimator.G, b.estimator.G)
        np.testing.assert_array_equal(a.report.S_star.S, b.report.S_star.S)
        assert a.worst_case_mse == b.worst_case_mse
        np.testing.assert_allclose(b.estimator.g, shift[:2] - b.estimator.G @ shift[2:])


class TestSaddle:
    @pytest.mark.parametrize("seed", range(5))
    def test_nature_cannot_improve(self, seed):
        rng = np.random.default_rng(100 + seed)
        d, n = 4, 2
        mu = rng.standard_normal(d)
        Sigma = random_pd(d, rng)
        rho = float(rng.uniform(0.2, 1.5))
        cfg = FWConfig(rho=rho)
        eq = solve_robust_mmse(mu, Sigma, n, d - n, cfg)
        f_star = mse_under(eq.estimator, eq.least_favorable)
        for _ in range(50):
            S_alt = random_feasible(Sigma, rho, rng)
            val = mse_under(eq.estimator, Gaussian(mu, S_alt))
            assert val <= f_star + cfg.rel_gap_tol * eq.worst_case_mse + 1e-6


class TestApply:
    def test_zero(self):
        assert np.all(apply(AffineEstimator(np.zeros((2, 3)), np.zeros(2)), np.ones(3)) == 0)

    def test_identity(self):
        y = np.array([1.0, -2.0])
        np.testing.assert_array_equal(apply(AffineEstimator(np.eye(2), np.zeros(2)), y), y)

    def test_example(self):
        est = bayes_estimator(Gaussian(ZERO2, EXAMPLE_SIGMA), 1)
        assert est([1.1])[0] == pytest.approx(1.0)

    def test_batch(self):
        est = AffineEstimator([[2.0]], [1.0])
        np.testing.assert_array_equal(est(np.array([[1.0], [3.0]])), [[3.0], [7.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            apply(AffineEstimator(np.eye(2), np.zeros(2)), np.ones(3))

    def test_bad_intercept(self):
        with pytest.raises(InvalidInputError):
            AffineEstimator(np.eye(2), np.zeros(3))


class TestMse:
    def test_bayes_on_nominal(self):
        q = Gaussian(ZERO2, EXAMPLE_SIGMA)
        assert mse_under(bayes_estimator(q, 1), q) == pytest.approx(1 / 11, abs=1e-14)

    def test_zero_gain(self):
        rng = np.random.default_rng(1)
        S = random_pd(4, rng)
        mu = rng.standard_normal(4)
        est = AffineEstimator(np.zeros((2, 2)), mu[:2])
        assert mse_under(est, Gaussian(mu, S)) == pytest.approx(np.trace(S[:2, :2]))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            mse_under(AffineEstimator(np.eye(2), np.zeros(2)), Gaussian(ZERO2, np.eye(2)))

    @pytest.mark.parametrize("seed", range(4))
    def test_monte_carlo(self, seed):
        rng = np.random.default_rng(seed)
        q = Gaussian(rng.standard_normal(3), random_pd(3, rng))
        est = AffineEstimator(rng.standard_normal((1, 2)), rng.standard_normal(1))
        mean, se = mse_monte_carlo(est, q, 100_000, np.random.default_rng(1000 + seed))
        assert abs(mean - mse_under(est, q)) <= 3 * se
