"""Symmetric matrix helpers and the Gelbrich (type-2 Wasserstein) distance
between normal distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SYM_TOL = 1e-10
PSD_TOL = 1e-10


def sym(M):
    """Return the symmetric part (M + M^T) / 2."""
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def check_symmetric(M, name="matrix"):
    """Validate that `M` is square and symmetric, and return it symmetrized.

    The tolerance is ``1e-10 * (1 + max|M_ij|)``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    scale = 1.0 + (np.max(np.abs(M)) if M.size else 0.0)
    if np.max(np.abs(M - M.T), initial=0.0) > SYM_TOL * scale:
        raise InvalidInputError(f"{name} is not symmetric")
    return sym(M)


def psd_sqrt(M):
    """Principal square root of a symmetric PSD matrix.

    Computed from a symmetric eigendecomposition with eigenvalues clamped
    at zero, so small negative roundoff eigenvalues are absorbed.

    Parameters
    ----------
    M : array_like, shape (d, d)
        Symmetric positive semidefinite matrix.

    Returns
    -------
    R : ndarray, shape (d, d)
        Symmetric PSD matrix with ``R @ R == M`` up to roundoff.
    """
    M = check_symmetric(M)
    w, V = np.linalg.eigh(M)
    w = np.sqrt(np.maximum(w, 0.0))
    return sym((V * w) @ V.T)


def min_eigenvalue(M):
    """Smallest eigenvalue of a symmetric matrix."""
    M = check_symmetric(M)
    return float(np.linalg.eigvalsh(M)[0])


def _trace_sqrt(M):
    # Tr(M^{1/2}) for symmetric PSD M, without forming the root.
    return float(np.sum(np.sqrt(np.maximum(np.linalg.eigvalsh(sym(M)), 0.0))))


@dataclass(frozen=True)
class Gaussian:
    """A normal distribution N(mean, cov).

    The covariance is symmetrized on construction, and eigenvalues that are
    negative only by roundoff (above ``-1e-10 * lambda_max``) are clamped to 0.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = check_symmetric(self.cov, "cov")
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float)).ravel()
        if mean.shape[0] != cov.shape[0]:
            raise InvalidInputError(
                f"mean has length {mean.shape[0]} but cov is {cov.shape[0]}x{cov.shape[0]}"
            )
        w, V = np.linalg.eigh(cov)
        lam_max = max(w[-1], 0.0) if w.size else 0.0
        if w.size and w[0] < -PSD_TOL * max(lam_max, 1e-300):
            raise InvalidInputError(f"cov is not PSD (min eigenvalue {w[0]:.3e})")
        if w.size and w[0] < 0:
            cov = sym((V * np.maximum(w, 0.0)) @ V.T)
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.shape[0]

    def __repr__(self):
        return f"Gaussian(dim={self.dim})"


def cov_transport_cost(S, Sigma):
    """Covariance part of the squared Gelbrich distance.

    ``Tr(S + Sigma - 2 (Sigma^{1/2} S Sigma^{1/2})^{1/2})``

    Parameters
    ----------
    S : array_like, shape (d, d)
        Symmetric PSD matrix.
    Sigma : array_like, shape (d, d)
        Symmetric positive definite reference covariance.
    """
    S = check_symmetric(S, "S")
    Sigma = check_symmetric(Sigma, "Sigma")
    if S.shape != Sigma.shape:
        raise InvalidInputError(f"shape mismatch {S.shape} vs {Sigma.shape}")
    w = np.linalg.eigvalsh(Sigma)
    if w[0] <= 0:
        raise InvalidInputError("Sigma must be positive definite")
    root = psd_sqrt(Sigma)
    return float(np.trace(S) + np.trace(Sigma) - 2.0 * _trace_sqrt(root @ S @ root))


def gelbrich_distance(q1: Gaussian, q2: Gaussian) -> float:
    """Type-2 Wasserstein distance between two normal distributions."""
    if q1.dim != q2.dim:
        raise InvalidInputError(f"dimension mismatch {q1.dim} vs {q2.dim}")
    root = psd_sqrt(q2.cov)
    inner = np.trace(q1.cov) + np.trace(q2.cov) - 2.0 * _trace_sqrt(root @ q1.cov @ root)
    mean_term = float(np.sum((q1.mean - q2.mean) ** 2))
    return float(np.sqrt(mean_term + max(inner, 0.0)))


def ball_membership(q: Gaussian, center: Gaussian, rho: float, slack: float = 0.0) -> bool:
    """True iff ``gelbrich_distance(q, center) <= rho + slack``."""
    return gelbrich_distance(q, center) <= rho + slack
