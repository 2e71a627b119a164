"""Distributionally robust MMSE estimators and exact Gaussian MSE evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import frank_wolfe
from .errors import InvalidInputError
from .frank_wolfe import FWConfig, FWReport
from .gaussian import Gaussian
from .objective import estimator_gain, gradient_from_gain, posterior_cov


@dataclass(frozen=True)
class AffineEstimator:
    """The estimator y -> G y + g."""

    G: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        g = np.atleast_1d(np.asarray(self.g, dtype=float)).ravel()
        if g.shape[0] != G.shape[0]:
            raise InvalidInputError(f"G is {G.shape} but g has length {g.shape[0]}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "g", g)

    @property
    def n(self):
        return self.G.shape[0]

    @property
    def m(self):
        return self.G.shape[1]

    def __call__(self, y):
        return apply(self, y)


@dataclass(frozen=True)
class NashEquilibrium:
    """Robust estimator paired with its least favorable prior."""

    estimator: AffineEstimator
    least_favorable: Gaussian
    worst_case_mse: float
    posterior_cov: np.ndarray
    report: FWReport


def apply(est: AffineEstimator, y):
    """Evaluate ``G y + g``. A 2-d `y` is treated as one observation per row."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != est.m:
        raise InvalidInputError(f"observation has length {y.shape[-1]}, expected {est.m}")
    return y @ est.G.T + est.g


def bayes_estimator(q: Gaussian, n: int) -> AffineEstimator:
    """Conditional-mean estimator of x given y when (x, y) ~ q."""
    G = estimator_gain(q.cov, n=n)
    return AffineEstimator(G, q.mean[:n] - G @ q.mean[n:])


def mse_under(est: AffineEstimator, q: Gaussian, n=None, m=None) -> float:
    """Exact ``E_q ||x - G y - g||^2``.

    Equals ``<D(G), cov> + ||mu_x - G mu_y - g||^2`` with
    ``D(G) = [I, -G]^T [I, -G]``.
    """
    n = est.n if n is None else n
    m = est.m if m is None else m
    if q.dim != n + m or est.n != n or est.m != m:
        raise InvalidInputError(f"distribution has dimension {q.dim}, expected {n}+{m}")
    bias = q.mean[:n] - est.G @ q.mean[n:] - est.g
    return float(np.sum(gradient_from_gain(est.G) * q.cov) + bias @ bias)


def solve_robust_mmse(mu, Sigma, n, m, config: FWConfig, S0=None) -> NashEquilibrium:
    """Robust MMSE estimator over the Gelbrich ball of radius ``config.rho``.

    The worst-case mean is the nominal mean, so only the covariance is
    optimized; the intercept follows as ``g = mu_x - G mu_y``.

    Parameters
    ----------
    mu : array_like, shape (n + m,)
        Nominal mean of (x, y).
    Sigma : array_like, shape (n + m, n + m)
        Nominal covariance, positive definite.
    n, m : int
        Signal and observation dimensions.
    config : FWConfig
        Solver settings including the radius.

    Returns
    -------
    NashEquilibrium
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float)).ravel()
    if mu.shape[0] != n + m:
        raise InvalidInputError(f"mean has length {mu.shape[0]}, expected {n}+{m}")
    report = frank_wolfe.solve(Sigma, n, m, config, S0=S0)
    S = report.S_star
    G = estimator_gain(S)
    est = AffineEstimator(G, mu[:n] - G @ mu[n:])
    V = posterior_cov(S)
    return NashEquilibrium(
        estimator=est,
        least_favorable=Gaussian(mu, S.S),
        worst_case_mse=float(np.trace(V)),
        posterior_cov=V,
        report=report,
    )
