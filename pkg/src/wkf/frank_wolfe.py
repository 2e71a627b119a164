"""Frank-Wolfe method for the robust MMSE program

    max f(S)  s.t.  Tr(S + Sigma - 2 (Sigma^{1/2} S Sigma^{1/2})^{1/2}) <= rho^2,
                    S >= lambda_min(Sigma) I.

Starts from S = Sigma and uses the step size 2 / (k + 2). The linear
oracle is :func:`wkf.bisection.solve_subproblem`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bisection import solve_subproblem
from .errors import ConvergenceError, InvalidInputError
from .gaussian import check_symmetric, cov_transport_cost, sym
from .objective import BlockCovariance, mmse_gradient, mmse_objective

TRACE_FIELDS = ("k", "objective", "abs_gap", "rel_gap", "gamma", "dual_gap", "bisection_iters")


@dataclass(frozen=True)
class FWConfig:
    """Solver settings.

    `delta` scales the subproblem accuracy; `rel_gap_tol` is the stopping
    threshold on ``<L - S, D> / f(S)``. With `trace` set, one record per
    iteration is kept on the report. `check_feasibility` re-verifies every
    iterate against the constraints (slow; meant for tests).
    """

    rho: float
    delta: float = 1e-3
    rel_gap_tol: float = 1e-4
    max_iter: int = 10000
    subproblem_max_iter: int = 200
    trace: bool = False
    check_feasibility: bool = False

    def __post_init__(self):
        if not self.rho >= 0:
            raise InvalidInputError(f"rho must be nonnegative, got {self.rho!r}")
        for name in ("delta", "rel_gap_tol", "max_iter", "subproblem_max_iter"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")


@dataclass(frozen=True)
class FWReport:
    """Result of :func:`solve`.

    `objective_history[k]` is f at the k-th iterate and `gap_history[k]` the
    relative duality gap measured there. `dual_upper_bound` is the smallest
    subproblem dual value seen, which bounds the optimal f from above.
    """

    S_star: BlockCovariance
    objective: float
    iterations: int
    gap_history: tuple
    objective_history: tuple
    sigma_lower: float
    sigma_upper: float
    curvature_bound: float
    dual_upper_bound: float
    truncated: bool = False
    trace: tuple = field(default=(), repr=False)


def spectral_bounds(Sigma, rho):
    """``(lambda_min(Sigma), (rho + sqrt(Tr Sigma))^2)``: eigenvalue bounds on feasible S."""
    Sigma = check_symmetric(Sigma, "Sigma")
    lo = float(np.linalg.eigvalsh(Sigma)[0])
    hi = float((rho + np.sqrt(np.trace(Sigma))) ** 2)
    return lo, hi


def curvature_bound(Sigma, rho):
    """Upper bound ``2 sigma_up^4 / sigma_low^3`` on the curvature constant of -f."""
    lo, hi = spectral_bounds(Sigma, rho)
    if lo <= 0:
        raise InvalidInputError("Sigma must be positive definite")
    return 2.0 * hi**4 / lo**3


def rate_bound(k, sigma_lower, sigma_upper, delta):
    """Suboptimality guarantee ``4 sigma_up^4 (1 + delta) / (sigma_low^3 (k + 2))`` at iterate k."""
    return 4.0 * sigma_upper**4 * (1.0 + delta) / (sigma_lower**3 * (k + 2))


def relative_duality_gap(S: BlockCovariance, L, D):
    """``<L - S, D> / f(S)``; raises if f(S) is not positive."""
    f = mmse_objective(S)
    if not f > 0:
        raise InvalidInputError(f"objective is not positive ({f!r})")
    return float(np.sum((np.asarray(L) - S.S) * D)) / f


def _check_iterate(S, Sigma, rho, sigma_lower, k):
    cost = cov_transport_cost(S, Sigma)
    low = np.linalg.eigvalsh(S)[0]
    if cost > rho**2 + 1e-7 or low < sigma_lower - 1e-7:
        raise AssertionError(
            f"iterate {k} infeasible: cost {cost:.3e} vs {rho**2:.3e}, "
            f"lambda_min {low:.3e} vs {sigma_lower:.3e}"
        )


def solve(Sigma, n, m, config: FWConfig, S0=None) -> FWReport:
    """Maximize the worst-case MMSE over the Gelbrich ball around `Sigma`.

    Parameters
    ----------
    Sigma : array_like, shape (n + m, n + m)
        Nominal covariance, positive definite.
    n, m : int
        Signal and observation dimensions.
    config : FWConfig
        Radius and tolerances.
    S0 : array_like, optional
        Feasible starting point; defaults to `Sigma`.

    Returns
    -------
    FWReport

    Notes
    -----
    The subproblem at iteration k is solved to accuracy
    ``min(alpha_k * delta * C, delta * rel_gap_tol * f(S_k))`` where C is
    :func:`curvature_bound`. The first term alone is far too loose for the
    gap measurement to be meaningful, and tightening it keeps the rate
    guarantee intact.
    """
    Sigma = check_symmetric(Sigma, "Sigma")
    if Sigma.shape[0] != n + m:
        raise InvalidInputError(f"Sigma is {Sigma.shape[0]}-dimensional, expected {n}+{m}")
    rho = float(config.rho)
    sigma_lower, sigma_upper = spectral_bounds(Sigma, rho)
    if sigma_lower <= 0:
        raise InvalidInputError("Sigma must be positive definite")
    c_bar = 2.0 * sigma_upper**4 / sigma_lower**3

    if rho == 0:
        S = BlockCovariance(Sigma, n, m)
        f = mmse_objective(S)
        return FWReport(
            S_star=S, objective=f, iterations=0, gap_history=(), objective_history=(f,),
            sigma_lower=sigma_lower, sigma_upper=sigma_upper, curvature_bound=c_bar,
            dual_upper_bound=f,
        )

    if S0 is None:
        S = Sigma.copy()
    else:
        S = check_symmetric(S0, "S0")
        if (cov_transport_cost(S, Sigma) > rho**2 + 1e-9
                or np.linalg.eigvalsh(S)[0] < sigma_lower - 1e-9):
            raise InvalidInputError("S0 is not feasible")

    gaps, objectives, trace = [], [], []
    dual_best = np.inf
    truncated = True
    k = 0
    f = np.nan
    while k < config.max_iter:
        alpha = 2.0 / (k + 2)
        D, _ = mmse_gradient(S, n, m)
        # unit total elasticity: f(S) = <S, grad f(S)>
        f = float(np.sum(S * D))
        objectives.append(f)
        eps = alpha * config.delta * c_bar
        if f > 0:
            eps = min(eps, config.delta * config.rel_gap_tol * f)
        try:
            sub = solve_subproblem(D, Sigma, rho, eps, max_iter=config.subproblem_max_iter)
        except ConvergenceError as exc:
            raise ConvergenceError(
                "subproblem failed", last_gap=exc.last_gap, context=f"Frank-Wolfe iteration {k}"
            ) from exc
        dual_best = min(dual_best, sub.dual_value)
        abs_gap = sub.value - f
        rel_gap = abs_gap / f if f > 0 else abs_gap
        gaps.append(rel_gap)
        if config.trace:
            trace.append((k, f, abs_gap, rel_gap, sub.gamma, sub.dual_gap, sub.iterations))
        if rel_gap <= config.rel_gap_tol:
            truncated = False
            break
        S = sym(S + alpha * (sub.L - S))
        k += 1
        if config.check_feasibility:
            _check_iterate(S, Sigma, rho, sigma_lower, k)

    if truncated:
        objectives.append(mmse_objective(S, n, m))
    S_star = BlockCovariance(S, n, m)
    return FWReport(
        S_star=S_star, objective=objectives[-1], iterations=k,
        gap_history=tuple(gaps), objective_history=tuple(objectives),
        sigma_lower=sigma_lower, sigma_upper=sigma_upper, curvature_bound=c_bar,
        dual_upper_bound=float(dual_best), truncated=truncated, trace=tuple(trace),
    )


def write_trace(report: FWReport, path):
    """Write the per-iteration trace of `report` as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_FIELDS)
        for row in report.trace:
            writer.writerow([row[0], *(repr(float(v)) for v in row[1:6]), row[6]])
