"""Brute-force reference computations used to audit the solvers.

None of these share a code path with the solvers they check: the gamma grid
inverts ``gamma I - D`` directly instead of working in D's eigenbasis, the
2x2 search evaluates the Gelbrich cost with the closed form for 2x2 matrix
square roots, and gradients come from central differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import Gaussian, check_symmetric, psd_sqrt
from .objective import BlockCovariance, mmse_objective


@dataclass(frozen=True)
class GridOracleResult:
    """Primal/dual sandwich from a gamma grid.

    The subproblem optimum lies in ``[value, dual_value]`` up to the
    floating-point error of the grid evaluations; `resolution` is the width
    of that interval plus a bound on the evaluation error.
    """

    value: float
    gamma: float
    dual_value: float
    resolution: float


def grid_gamma_oracle(D, Sigma, rho, grid_size=10_000, chunk=2048) -> GridOracleResult:
    """Dense search for the subproblem optimum over the dual variable.

    Evaluates ``<L(gamma), D>`` for gamma on a uniform grid over the a priori
    bracket, keeping only feasible points (``h(gamma) >= 0``), together with
    the dual value at every grid point.
    """
    D = check_symmetric(D, "D")
    Sigma = check_symmetric(Sigma, "Sigma")
    d = D.shape[0]
    lam, V = np.linalg.eigh(D)
    lam1 = lam[-1]
    top = V[:, lam >= lam1 * (1 - 1e-10)]
    vsv = np.max(np.einsum("ij,ik,kj->j", top, Sigma, top))
    lo = lam1 * (1 + np.sqrt(vsv) / rho)
    hi = lam1 * (1 + np.sqrt(np.trace(Sigma)) / rho)
    gammas = np.linspace(lo, hi, grid_size) if hi > lo else np.array([hi])

    eye = np.eye(d)
    tr = np.trace(Sigma)
    # feasibility slack absorbs roundoff when the grid hits the root exactly
    slack = 1e-12 * (1 + rho**2)
    best, best_gamma, dual_min = -np.inf, np.nan, np.inf
    for start in range(0, gammas.size, chunk):
        g = gammas[start : start + chunk]
        R = np.linalg.inv(g[:, None, None] * eye - D)
        L = g[:, None, None] ** 2 * (R @ Sigma @ R)
        primal = np.einsum("kij,ij->k", L, D)
        M = eye - g[:, None, None] * R
        h = rho**2 - np.einsum("kij,ij->k", M @ M, Sigma)
        dual = g * (rho**2 - tr) + g**2 * np.einsum("kij,ij->k", R, Sigma)
        dual_min = min(dual_min, float(np.min(dual)))
        ok = h >= -slack
        if np.any(ok):
            i = int(np.argmax(np.where(ok, primal, -np.inf)))
            if primal[i] > best:
                best, best_gamma = float(primal[i]), float(g[i])
    # roundoff in the direct inversions, relative to the size of the values
    cond = float(np.max(np.linalg.cond(gammas[[0, -1], None, None] * eye - D)))
    roundoff = 16 * d * np.finfo(float).eps * cond * max(abs(best), abs(dual_min), 1.0)
    return GridOracleResult(best, best_gamma, dual_min, max(dual_min - best, 0.0) + roundoff)


def _cost_2x2(a, b, c, Sigma):
    # Tr(S) + Tr(Sigma) - 2 Tr((Sigma^1/2 S Sigma^1/2)^1/2) using
    # Tr(sqrt(M)) = sqrt(Tr M + 2 sqrt(det M)) for 2x2 PSD M.
    inner = Sigma[0, 0] * a + 2 * Sigma[0, 1] * b + Sigma[1, 1] * c
    det = np.linalg.det(Sigma) * np.maximum(a * c - b * b, 0.0)
    tr_sqrt = np.sqrt(np.maximum(inner + 2 * np.sqrt(det), 0.0))
    return a + c + np.trace(Sigma) - 2 * tr_sqrt


def tiny_instance_search(Sigma, rho, grid_size=60, rounds=8):
    """Brute-force maximization of f over the feasible set for d = 2, n = m = 1.

    Parametrizes ``S = [[a, b], [b, c]]`` with ``b = t sqrt(a c)`` and scans
    a grid over (a, t, c), then repeatedly re-grids a shrinking box around
    the incumbent.

    Returns
    -------
    best_f : float
    best_S : ndarray, shape (2, 2)
    resolution : float
        Improvement made by the final refinement round.
    """
    Sigma = check_symmetric(Sigma, "Sigma")
    if Sigma.shape != (2, 2):
        raise ValueError("tiny_instance_search needs a 2x2 covariance")
    if rho == 0:
        return mmse_objective(Sigma, 1, 1), Sigma.copy(), 0.0
    s_lo = np.linalg.eigvalsh(Sigma)[0]
    s_hi = (rho + np.sqrt(np.trace(Sigma))) ** 2

    box = np.array([[s_lo, s_hi], [-1.0, 1.0], [s_lo, s_hi]])
    best_f, best = -np.inf, None
    prev_f = -np.inf
    for _ in range(rounds):
        axes = [np.linspace(lo, hi, grid_size) for lo, hi in box]
        a, t, c = np.meshgrid(*axes, indexing="ij")
        b = t * np.sqrt(a * c)
        lam_min = 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b * b)
        ok = (_cost_2x2(a, b, c, Sigma) <= rho**2) & (lam_min >= s_lo)
        f = np.where(ok, a - b * b / c, -np.inf)
        i = np.unravel_index(np.argmax(f), f.shape)
        if f[i] > best_f:
            prev_f, best_f = best_f, float(f[i])
            best = np.array([a[i], t[i], c[i]])
        width = (box[:, 1] - box[:, 0]) * 4.0 / grid_size
        lower = np.array([s_lo, -1.0, s_lo])
        upper = np.array([s_hi, 1.0, s_hi])
        box = np.stack([np.maximum(best - width, lower), np.minimum(best + width, upper)], axis=1)
    a, t, c = best
    b = t * np.sqrt(a * c)
    return best_f, np.array([[a, b], [b, c]]), abs(best_f - prev_f)


def finite_difference_gradient(S: BlockCovariance, step=1e-5):
    """Central-difference gradient of the MMSE objective.

    Each independent coordinate of the symmetric matrix is perturbed. An
    off-diagonal perturbation moves both S_ij and S_ji, so its derivative is
    halved to match the trace inner product.
    """
    base = np.array(S.S)
    d = base.shape[0]
    grad = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            E = np.zeros((d, d))
            E[i, j] = E[j, i] = step
            fp = mmse_objective(base + E, S.n, S.m)
            fm = mmse_objective(base - E, S.n, S.m)
            deriv = (fp - fm) / (2 * step)
            if i == j:
                grad[i, i] = deriv
            else:
                grad[i, j] = grad[j, i] = 0.5 * deriv
    return grad


def mse_monte_carlo(est, q: Gaussian, N, rng):
    """Monte Carlo estimate of ``E_q ||x - G y - g||^2``.

    Returns
    -------
    mean : float
    stderr : float
    """
    n = est.G.shape[0]
    root = psd_sqrt(q.cov)
    z = q.mean + rng.standard_normal((int(N), q.dim)) @ root
    err = z[:, :n] - z[:, n:] @ est.G.T - est.g
    sq = np.sum(err * err, axis=1)
    return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(sq.size))
