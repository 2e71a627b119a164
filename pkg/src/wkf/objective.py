"""The worst-case MMSE objective f(S) = Tr(S_xx - S_xy S_yy^{-1} S_yx) and
its gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import InvalidInputError, SingularBlockError
from .gaussian import check_symmetric, sym

JITTER = 1e-10


@dataclass(frozen=True)
class BlockCovariance:
    """A (n+m)x(n+m) covariance split into signal and observation blocks."""

    S: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        S = check_symmetric(self.S, "S")
        n, m = int(self.n), int(self.m)
        if n < 1 or m < 1 or S.shape[0] != n + m:
            raise InvalidInputError(f"S is {S.shape[0]}x{S.shape[0]}, expected n+m = {n}+{m}")
        S.flags.writeable = False
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @property
    def d(self):
        return self.n + self.m

    @property
    def xx(self):
        return self.S[: self.n, : self.n]

    @property
    def xy(self):
        return self.S[: self.n, self.n :]

    @property
    def yy(self):
        return self.S[self.n :, self.n :]


def _as_block(S, n=None, m=None):
    if isinstance(S, BlockCovariance):
        return S
    S = np.asarray(S, dtype=float)
    if n is None and m is None:
        raise InvalidInputError("block sizes are required for a raw matrix")
    if n is None:
        n = S.shape[0] - m
    if m is None:
        m = S.shape[0] - n
    return BlockCovariance(S, n, m)


def _factor_yy(Syy):
    try:
        return cho_factor(Syy, lower=True, check_finite=False)
    except LinAlgError:
        pass
    m = Syy.shape[0]
    scale = np.trace(Syy) / m
    if not scale > 0:
        raise SingularBlockError("S_yy is singular")
    bump = JITTER * scale
    try:
        return cho_factor(Syy + bump * np.eye(m), lower=True, check_finite=False)
    except LinAlgError as exc:
        raise SingularBlockError("S_yy is singular") from exc


def estimator_gain(S, n=None, m=None):
    """Gain G = S_xy S_yy^{-1} of the Bayesian estimator under covariance S."""
    S = _as_block(S, n, m)
    fac = _factor_yy(S.yy)
    return cho_solve(fac, S.xy.T, check_finite=False).T


def posterior_cov(S, n=None, m=None):
    """Schur complement S_xx - S_xy S_yy^{-1} S_yx (the conditional covariance of x)."""
    S = _as_block(S, n, m)
    fac = _factor_yy(S.yy)
    return sym(S.xx - S.xy @ cho_solve(fac, S.xy.T, check_finite=False))


def mmse_objective(S, n=None, m=None):
    """Minimum mean square error of estimating x from y when z ~ N(., S).

    Accepts either a `BlockCovariance` or a raw matrix plus block sizes.
    """
    return float(np.trace(posterior_cov(S, n, m)))


def gradient_from_gain(G):
    """D = [I, -G]^T [I, -G] for a gain matrix G of shape (n, m)."""
    G = np.atleast_2d(G)
    B = np.hstack([np.eye(G.shape[0]), -G])
    return sym(B.T @ B)


def mmse_gradient(S, n=None, m=None):
    """Gradient of the MMSE objective.

    Returns
    -------
    D : ndarray, shape (d, d)
        The gradient ``[I, -G; -G^T, G^T G]``; PSD with rank at most n.
    G : ndarray, shape (n, m)
        The gain ``S_xy S_yy^{-1}`` both the estimator and the solver reuse.
    """
    G = estimator_gain(S, n, m)
    return gradient_from_gain(G), G
