import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EXAMPLE_SIGMA, dims, random_pd, seeds
from wkf.errors import InvalidInputError, SingularBlockError
from wkf.objective import (
    BlockCovariance,
    estimator_gain,
    mmse_gradient,
    mmse_objective,
    posterior_cov,
)
from wkf.oracles import finite_difference_gradient


def _block(seed, d, cond=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, d))
    return BlockCovariance(random_pd(d, rng, cond=cond), n, d - n)


class TestBlockCovariance:
    def test_blocks(self):
        S = BlockCovariance(np.arange(9.0).reshape(3, 3) + np.arange(9.0).reshape(3, 3).T, 1, 2)
        assert S.xx.shape == (1, 1) and S.xy.shape == (1, 2) and S.yy.shape == (2, 2)
        assert S.d == 3

    def test_size_mismatch(self):
        with pytest.raises(InvalidInputError):
            BlockCovariance(np.eye(3), 1, 1)

    def test_empty_block(self):
        with pytest.raises(InvalidInputError):
            BlockCovariance(np.eye(2), 2, 0)


class TestObjective:
    def test_example(self):
        assert mmse_objective(EXAMPLE_SIGMA, 1, 1) == pytest.approx(1 / 11, abs=1e-14)

    def test_block_diagonal(self):
        S = np.diag([2.0, 3.0, 5.0])
        assert mmse_objective(S, 2, 1) == pytest.approx(5.0)

    def test_identity(self):
        assert mmse_objective(np.eye(5), 3, 2) == pytest.approx(3.0)

    def test_singular_yy(self):
        S = np.zeros((2, 2))
        S[0, 0] = 1.0
        with pytest.raises(SingularBlockError):
            mmse_objective(S, 1, 1)

    def test_jitter_rescues_roundoff(self):
        # S_yy with one eigenvalue at -1e-18 relative scale passes after the retry
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        Syy = np.outer(v, v) + 1e-20 * np.eye(2)
        S = np.eye(3)
        S[1:, 1:] = Syy
        S[0, 1:] = 0.0
        S[1:, 0] = 0.0
        assert np.isfinite(mmse_objective(S, 1, 2))

    @settings(max_examples=50, deadline=None)
    @given(seeds, dims)
    def test_nonnegative(self, seed, d):
        assert mmse_objective(_block(seed, d)) >= -1e-9


class TestGradient:
    def test_example(self):
        D, G = mmse_gradient(EXAMPLE_SIGMA, 1, 1)
        np.testing.assert_allclose(G, [[1 / 1.1]], rtol=1e-14)
        np.testing.assert_allclose(D, [[1, -1 / 1.1], [-1 / 1.1, 1 / 1.21]], rtol=1e-14)

    def test_uncorrelated(self):
        D, G = mmse_gradient(np.diag([1.0, 2.0, 3.0, 4.0]), 2, 2)
        np.testing.assert_array_equal(G, np.zeros((2, 2)))
        np.testing.assert_allclose(D, np.diag([1.0, 1.0, 0.0, 0.0]))

    def test_example_vs_finite_differences(self):
        D, _ = mmse_gradient(EXAMPLE_SIGMA, 1, 1)
        fd = finite_difference_gradient(BlockCovariance(EXAMPLE_SIGMA, 1, 1))
        np.testing.assert_allclose(fd, D, atol=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(seeds, dims)
    def test_psd_rank_and_top_eigenvalue(self, seed, d):
        S = _block(seed, d)
        D, _ = mmse_gradient(S)
        w = np.linalg.eigvalsh(D)
        assert w[0] >= -1e-10 * w[-1]
        assert w[-1] >= 1 - 1e-12
        assert np.sum(w > 1e-9 * w[-1]) <= S.n

    @settings(max_examples=100, deadline=None)
    @given(seeds, dims)
    def test_unit_total_elasticity(self, seed, d):
        S = _block(seed, d)
        D, _ = mmse_gradient(S)
        f = mmse_objective(S)
        assert abs(f - np.sum(S.S * D)) <= 1e-9 * max(1.0, abs(f))

    @settings(max_examples=30, deadline=None)
    @given(seeds, st.integers(2, 8), st.sampled_from([10.0, 1e2, 1e3]))
    def test_finite_differences(self, seed, d, cond):
        S = _block(seed, d, cond=cond)
        D, _ = mmse_gradient(S)
        fd = finite_difference_gradient(S, step=1e-5)
        assert np.max(np.abs(fd - D) / np.maximum(np.abs(D), 1.0)) <= 1e-5


class TestPosterior:
    def test_example(self):
        np.testing.assert_allclose(posterior_cov(EXAMPLE_SIGMA, 1, 1), [[1 / 11]], rtol=1e-13)

    def test_block_diagonal(self):
        S = np.diag([2.0, 3.0, 5.0])
        np.testing.assert_allclose(posterior_cov(S, 2, 1), np.diag([2.0, 3.0]))

    @settings(max_examples=50, deadline=None)
    @given(seeds, dims)
    def test_trace_is_objective(self, seed, d):
        S = _block(seed, d)
        assert abs(np.trace(posterior_cov(S)) - mmse_objective(S)) <= 1e-10 * (1 + mmse_objective(S))

    @settings(max_examples=50, deadline=None)
    @given(seeds, dims)
    def test_inherits_eigenvalue_floor(self, seed, d):
        S = _block(seed, d)
        lo = np.linalg.eigvalsh(S.S)[0]
        V = posterior_cov(S)
        assert np.linalg.eigvalsh(V)[0] >= lo - 1e-9 * np.max(np.abs(S.S))

    def test_gain_formula(self):
        S = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert estimator_gain(S, 1, 1)[0, 0] == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_concavity(seed, d):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, d))
    S1, S2 = random_pd(d, rng), random_pd(d, rng)
    f1, f2 = mmse_objective(S1, n=n), mmse_objective(S2, n=n)
    for a in (0.25, 0.5, 0.75):
        assert mmse_objective(a * S1 + (1 - a) * S2, n=n) >= a * f1 + (1 - a) * f2 - 1e-8
