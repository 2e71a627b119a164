"""Shared generators for the test suite."""

import numpy as np
from hypothesis import strategies as st

from wkf.gaussian import cov_transport_cost

EXAMPLE_SIGMA = np.array([[1.0, 1.0], [1.0, 1.1]])


def random_pd(d, rng, cond=None, scale=1.0):
    """Random symmetric PD matrix; with `cond`, eigenvalues span [1, cond]."""
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    if cond is None:
        lam = rng.uniform(0.1, 10.0, d)
    else:
        lam = np.exp(rng.uniform(0.0, np.log(cond), d))
        lam[0], lam[-1] = 1.0, cond
    M = (Q * (scale * lam)) @ Q.T
    return 0.5 * (M + M.T)


def random_psd(d, rng, rank=None):
    rank = d if rank is None else rank
    W = rng.standard_normal((d, rank))
    return W @ W.T


def random_feasible(Sigma, rho, rng, spread=4.0):
    """A random covariance in the Gelbrich ball: shrink a random PSD draw toward Sigma."""
    d = Sigma.shape[0]
    P = random_psd(d, rng) * spread * rng.uniform(0.1, 1.0)
    t = 1.0
    while cov_transport_cost(Sigma + t * (P - Sigma), Sigma) > rho**2:
        t *= 0.5
    # push part of the way back out toward the boundary
    lo, hi = t, min(1.0, 2 * t)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if cov_transport_cost(Sigma + mid * (P - Sigma), Sigma) <= rho**2:
            lo = mid
        else:
            hi = mid
    return Sigma + lo * (P - Sigma)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=20)
