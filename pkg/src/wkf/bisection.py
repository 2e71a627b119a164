"""Bisection solver for the linearized direction-finding subproblem

    max <L, D>  s.t.  Tr(L + Sigma - 2 (Sigma^{1/2} L Sigma^{1/2})^{1/2}) <= rho^2.

For a dual variable gamma > lambda_max(D) the maximizer of the Lagrangian is
known in closed form,

    L(gamma) = gamma^2 (gamma I - D)^{-1} Sigma (gamma I - D)^{-1},

so the problem reduces to finding the root of the scalar function
``h(gamma) = rho^2 - <Sigma, (I - gamma (gamma I - D)^{-1})^2>``. The solver
diagonalizes D once; afterwards every bisection step costs O(d).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateGradientError, DomainError, InvalidInputError
from .gaussian import check_symmetric, sym

# relative width under which eigenvalues of D count as equal
EIG_TIE = 1e-10


@dataclass(frozen=True)
class SubproblemResult:
    """Output of :func:`solve_subproblem`.

    Attributes
    ----------
    L : ndarray
        Feasible direction matrix.
    gamma : float
        Dual variable at which `L` was formed.
    dual_gap : float
        Certified gap between the dual bound at `gamma` and ``<L, D>``.
    iterations : int
        Bisection steps taken (0 for the closed-form path).
    bounds_used : tuple of float
        Initial bracket (LB, UB).
    value : float
        Primal objective ``<L, D>``.
    dual_value : float
        Dual objective at `gamma`; an upper bound on the subproblem optimum.
    """

    L: np.ndarray
    gamma: float
    dual_gap: float
    iterations: int
    bounds_used: tuple
    value: float
    dual_value: float


def _check_gamma(gamma, D):
    lam_max = np.linalg.eigvalsh(D)[-1]
    if not gamma > lam_max:
        raise DomainError(f"gamma={gamma!r} must exceed lambda_max(D)={lam_max!r}")


def _resolvent(gamma, D):
    d = D.shape[0]
    return sym(np.linalg.inv(gamma * np.eye(d) - D))


def h_value(gamma, D, Sigma, rho):
    """Constraint slack ``rho^2 - <Sigma, (I - gamma (gamma I - D)^{-1})^2>``.

    Evaluated by direct inversion; strictly increasing in gamma above
    lambda_max(D).
    """
    D = check_symmetric(D, "D")
    Sigma = check_symmetric(Sigma, "Sigma")
    _check_gamma(gamma, D)
    d = D.shape[0]
    M = np.eye(d) - gamma * _resolvent(gamma, D)
    return float(rho**2 - np.sum(Sigma * (M @ M)))


def candidate_L(gamma, D, Sigma):
    """Lagrangian maximizer ``gamma^2 (gamma I - D)^{-1} Sigma (gamma I - D)^{-1}``."""
    D = check_symmetric(D, "D")
    Sigma = check_symmetric(Sigma, "Sigma")
    _check_gamma(gamma, D)
    R = _resolvent(gamma, D)
    return sym(gamma**2 * R @ Sigma @ R)


def dual_objective(gamma, D, Sigma, rho):
    """Lagrangian dual ``gamma (rho^2 - Tr Sigma) + gamma^2 <(gamma I - D)^{-1}, Sigma>``.

    By weak duality this bounds ``<L, D>`` from above for every feasible L.
    """
    D = check_symmetric(D, "D")
    Sigma = check_symmetric(Sigma, "Sigma")
    _check_gamma(gamma, D)
    R = _resolvent(gamma, D)
    return float(gamma * (rho**2 - np.trace(Sigma)) + gamma**2 * np.sum(R * Sigma))


class _EigenForm:
    """D in its eigenbasis together with the rotated diagonal of Sigma."""

    def __init__(self, D, Sigma, rho):
        lam, V = np.linalg.eigh(D)
        self.lam = np.maximum(lam, 0.0)
        self.V = V
        self.Sigma = Sigma
        # diag(V^T Sigma V)
        self.sdiag = np.sum(V * (Sigma @ V), axis=0)
        self.trace = float(np.trace(Sigma))
        self.rho2 = rho**2
        self.rho = rho

    def h(self, gamma):
        q = self.lam / (gamma - self.lam)
        return self.rho2 - float(np.dot(q * q, self.sdiag))

    def value(self, gamma):
        r = 1.0 / (gamma - self.lam)
        return gamma**2 * float(np.dot(self.lam * r * r, self.sdiag))

    def dual(self, gamma):
        r = 1.0 / (gamma - self.lam)
        return gamma * (self.rho2 - self.trace) + gamma**2 * float(np.dot(r, self.sdiag))

    def L(self, gamma):
        W = self.V * (gamma / (gamma - self.lam))
        R = W @ self.V.T
        return sym(R @ self.Sigma @ R)

    def bounds(self):
        lam1 = self.lam[-1]
        top = self.lam >= lam1 * (1.0 - EIG_TIE)
        v_sigma_v = float(np.max(self.sdiag[top]))
        lb = lam1 * (1.0 + np.sqrt(v_sigma_v) / self.rho)
        ub = lam1 * (1.0 + np.sqrt(self.trace) / self.rho)
        return lb, ub


def _prepare(D, Sigma, rho):
    D = check_symmetric(D, "D")
    Sigma = check_symmetric(Sigma, "Sigma")
    if D.shape != Sigma.shape:
        raise InvalidInputError(f"shape mismatch {D.shape} vs {Sigma.shape}")
    if not rho > 0:
        raise InvalidInputError(f"rho must be positive, got {rho!r}")
    if not np.any(D):
        raise DegenerateGradientError("D = 0 has no bisection bracket")
    form = _EigenForm(D, Sigma, float(rho))
    if form.lam[-1] <= 0:
        raise DegenerateGradientError("D has no positive eigenvalue")
    return form


def bisection_bounds(D, Sigma, rho):
    """A priori bracket [LB, UB] for the root of h.

    ``LB = lambda_1 (1 + sqrt(v_1^T Sigma v_1) / rho)`` and
    ``UB = lambda_1 (1 + sqrt(Tr Sigma) / rho)``, where lambda_1 is the top
    eigenvalue of D. When lambda_1 is repeated, the eigenvector maximizing
    ``v^T Sigma v`` is used.
    """
    return _prepare(D, Sigma, rho).bounds()


def solve_subproblem_isotropic(lam, Sigma, rho):
    """Closed-form solution for D = lam * I.

    Here ``gamma* = lam (1 + sqrt(Tr Sigma) / rho)`` and
    ``L* = ((rho + sqrt(Tr Sigma))^2 / Tr Sigma) Sigma``.
    """
    Sigma = check_symmetric(Sigma, "Sigma")
    tr = float(np.trace(Sigma))
    root = np.sqrt(tr)
    gamma = lam * (1.0 + root / rho)
    L = sym(((rho + root) ** 2 / tr) * Sigma)
    value = lam * float(np.trace(L))
    return SubproblemResult(
        L=L, gamma=gamma, dual_gap=0.0, iterations=0,
        bounds_used=(gamma, gamma), value=value, dual_value=value,
    )


def solve_subproblem(D, Sigma, rho, eps, max_iter=200):
    """Solve the direction-finding subproblem to accuracy `eps` by bisection.

    Parameters
    ----------
    D : array_like, shape (d, d)
        Nonzero PSD gradient matrix.
    Sigma : array_like, shape (d, d)
        Nominal covariance, positive definite.
    rho : float
        Wasserstein radius, positive.
    eps : float
        Target dual gap.
    max_iter : int
        Bisection cap.

    Returns
    -------
    SubproblemResult
        A feasible `L` whose value is within `dual_gap < eps` of optimal.

    Raises
    ------
    DegenerateGradientError
        If D is zero.
    ConvergenceError
        If the gap is not certified within `max_iter` steps.
    """
    form = _prepare(D, Sigma, rho)
    lam = form.lam
    if lam[0] >= lam[-1] * (1.0 - EIG_TIE):
        return solve_subproblem_isotropic(float(lam[-1]), form.Sigma, form.rho)

    lb0, ub0 = form.bounds()
    lb, ub = lb0, ub0
    # roundoff guards: keep the bracket valid
    lam1 = lam[-1]
    for _ in range(60):
        if form.h(ub) >= 0:
            break
        ub = lam1 + 2.0 * (ub - lam1)
    for _ in range(60):
        if form.h(lb) <= 0:
            break
        lb = lam1 + 0.5 * (lb - lam1)

    best_gap = np.inf
    for it in range(1, max_iter + 1):
        gamma = 0.5 * (lb + ub)
        collapsed = not (lb < gamma < ub)
        if collapsed:
            gamma = ub
        hval = form.h(gamma)
        if hval < 0:
            lb = gamma
            continue
        ub = gamma
        gap = gamma * hval
        best_gap = min(best_gap, gap)
        if gap < eps or collapsed:
            if gap >= eps:
                break
            value = form.value(gamma)
            return SubproblemResult(
                L=form.L(gamma), gamma=float(gamma), dual_gap=float(gap),
                iterations=it, bounds_used=(float(lb0), float(ub0)),
                value=value, dual_value=value + gap,
            )
    raise ConvergenceError(
        f"bisection did not reach gap {eps:.3e} in {max_iter} steps",
        last_gap=float(best_gap),
    )
