"""Wasserstein distributionally robust Kalman filter and the classical baseline.

The state-space model is

    x_t = A_t x_{t-1} + B_t v_t,    y_t = C_t x_t + D_t v_t,    v_t ~ N(0, I).

Each step forms the pseudo-nominal Gaussian of z_t = (x_t, y_t) given the
past observations and then replaces the usual conditioning by the robust
MMSE update over a Gelbrich ball of radius rho_t.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .errors import ConvergenceError, InvalidInputError, ModelDegeneracyError
from .estimator import solve_robust_mmse
from .frank_wolfe import FWConfig, FWReport
from .gaussian import check_symmetric, cov_transport_cost, sym
from .objective import estimator_gain, posterior_cov


@dataclass(frozen=True)
class StateSpaceModel:
    """Linear Gaussian model with a time-indexed matrix provider.

    `matrices(t)` returns ``(A_t, B_t, C_t, D_t)`` for t = 1, 2, ...
    """

    matrices: Callable[[int], tuple]
    x0: np.ndarray
    V0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))
        object.__setattr__(self, "V0", check_symmetric(self.V0, "V0"))

    @classmethod
    def time_invariant(cls, A, B, C, D, x0, V0):
        mats = tuple(np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, C, D))
        return cls(lambda t: mats, x0, V0)

    def at(self, t):
        A, B, C, D = (np.atleast_2d(np.asarray(M, dtype=float)) for M in self.matrices(t))
        return A, B, C, D

    @property
    def n(self):
        return self.x0.shape[0]

    @property
    def m(self):
        return self.at(1)[2].shape[0]


def noise_loadings(BBt, DDt):
    """Loadings (B, D) with the given B B^T and D D^T and B D^T = 0.

    Process and measurement noise get separate channels of v, so the noise
    dimension is n + m.
    """
    BBt = check_symmetric(BBt, "BBt")
    DDt = check_symmetric(DDt, "DDt")
    n, m = BBt.shape[0], DDt.shape[0]
    B = np.hstack([cholesky(BBt, lower=True), np.zeros((n, m))])
    D = np.hstack([np.zeros((m, n)), cholesky(DDt, lower=True)])
    return B, D


@dataclass(frozen=True)
class FilterState:
    """Estimate and posterior covariance after processing y_1, ..., y_t."""

    t: int
    x_hat: np.ndarray
    V: np.ndarray
    last_report: Optional[FWReport] = None


def initial_state(model: StateSpaceModel) -> FilterState:
    return FilterState(0, model.x0.copy(), model.V0.copy())


def predict(state: FilterState, model: StateSpaceModel):
    """Pseudo-nominal mean and covariance of z_t given Y_{t-1}.

    Returns
    -------
    mu : ndarray, shape (n + m,)
    Sigma : ndarray, shape (n + m, n + m)

    Raises
    ------
    ModelDegeneracyError
        If Sigma is not positive definite.
    """
    t = state.t + 1
    A, B, C, D = model.at(t)
    H = np.vstack([A, C @ A])
    N = np.vstack([B, C @ B + D])
    mu = H @ state.x_hat
    Sigma = sym(H @ state.V @ H.T + N @ N.T)
    try:
        cholesky(Sigma, lower=True)
    except LinAlgError as exc:
        raise ModelDegeneracyError(f"pseudo-nominal covariance at t={t} is singular") from exc
    return mu, Sigma


def update(mu, Sigma, y, rho, config: FWConfig, t=None, S0=None) -> FilterState:
    """Robust measurement update at radius `rho`.

    With ``rho = 0`` this is the classical Kalman update.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    mu = np.asarray(mu, dtype=float)
    m = y.shape[0]
    n = mu.shape[0] - m
    if n < 1:
        raise InvalidInputError(f"observation length {m} leaves no state dimensions")
    cfg = config if config.rho == rho else _with_rho(config, rho)
    try:
        eq = solve_robust_mmse(mu, Sigma, n, m, cfg, S0=S0)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), last_gap=exc.last_gap, context=f"time step {t}") from exc
    x_hat = eq.estimator.G @ y + eq.estimator.g
    return FilterState(t if t is not None else 0, x_hat, eq.posterior_cov, eq.report)


def _with_rho(config, rho):
    return replace(config, rho=float(rho))


def step(state: FilterState, model: StateSpaceModel, y, rho, config: FWConfig,
         warm_start=False) -> FilterState:
    """One predict/observe/update cycle of the robust filter."""
    mu, Sigma = predict(state, model)
    S0 = None
    if warm_start and state.last_report is not None:
        prev = state.last_report.S_star.S
        lo = np.linalg.eigvalsh(Sigma)[0]
        if (prev.shape == Sigma.shape and cov_transport_cost(prev, Sigma) <= rho**2
                and np.linalg.eigvalsh(prev)[0] >= lo):
            S0 = prev
    return update(mu, Sigma, y, rho, config, t=state.t + 1, S0=S0)


def classical_kalman_step(state: FilterState, model: StateSpaceModel, y) -> FilterState:
    """Classical Kalman filter step (conditioning under the pseudo-nominal prior)."""
    mu, Sigma = predict(state, model)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = mu.shape[0] - y.shape[0]
    G = estimator_gain(Sigma, n=n)
    x_hat = mu[:n] + G @ (y - mu[n:])
    return FilterState(state.t + 1, x_hat, posterior_cov(Sigma, n=n))


def run_filter(model: StateSpaceModel, ys, rho, config: FWConfig, warm_start=False):
    """Run the robust filter over observations `ys` (one row per step).

    `rho` may be a scalar or one radius per step. Returns the list of states
    for t = 1, ..., T.
    """
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    rhos = np.broadcast_to(np.asarray(rho, dtype=float), (ys.shape[0],))
    state = initial_state(model)
    out = []
    for y, r in zip(ys, rhos):
        state = step(state, model, y, float(r), config, warm_start=warm_start)
        out.append(state)
    return out


def run_kalman(model: StateSpaceModel, ys):
    """Classical Kalman filter over `ys`; returns states for t = 1, ..., T."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    state = initial_state(model)
    out = []
    for y in ys:
        state = classical_kalman_step(state, model, y)
        out.append(state)
    return out


@dataclass(frozen=True)
class GainSchedule:
    """Data-independent part of a filter run.

    The covariance recursion never looks at the observations, so the gains
    ``G_t`` and posteriors ``V_t`` can be computed once and reused across
    Monte Carlo runs.
    """

    gains: tuple
    posteriors: tuple
    reports: tuple


def gain_schedule(model: StateSpaceModel, horizon: int, rho, config: FWConfig) -> GainSchedule:
    """Precompute the robust (or, for rho = 0, classical) gain sequence."""
    rhos = np.broadcast_to(np.asarray(rho, dtype=float), (horizon,))
    state = initial_state(model)
    gains, posts, reports = [], [], []
    for t in range(1, horizon + 1):
        mu, Sigma = predict(state, model)
        n = model.n
        m = Sigma.shape[0] - n
        if rhos[t - 1] == 0:
            G = estimator_gain(Sigma, n=n)
            V = posterior_cov(Sigma, n=n)
            rep = None
        else:
            upd = update(mu, Sigma, np.zeros(m), float(rhos[t - 1]), config, t=t)
            rep = upd.last_report
            G = estimator_gain(rep.S_star)
            V = upd.V
        gains.append(G)
        posts.append(V)
        reports.append(rep)
        state = FilterState(t, np.zeros(n), V)
    return GainSchedule(tuple(gains), tuple(posts), tuple(reports))


def apply_schedule(model: StateSpaceModel, schedule: GainSchedule, ys):
    """Run the mean recursion for a batch of observation sequences.

    Parameters
    ----------
    ys : ndarray, shape (runs, T, m)

    Returns
    -------
    x_hat : ndarray, shape (runs, T, n)
    """
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 2:
        ys = ys[None]
    runs, T, _ = ys.shape
    x = np.broadcast_to(model.x0, (runs, model.n)).copy()
    out = np.empty((runs, T, model.n))
    for t in range(1, T + 1):
        A, _, C, _ = model.at(t)
        x_pred = x @ A.T
        innov = ys[:, t - 1] - x_pred @ C.T
        x = x_pred + innov @ schedule.gains[t - 1].T
        out[:, t - 1] = x
    return out


def write_trajectory(path, states, ys, x_true=None):
    """Write one CSV row per step: t, y, x_hat, V (row-major), optional x_true.

    `path` may also be an open text file.
    """
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    n = states[0].x_hat.shape[0]
    m = ys.shape[1]
    header = ["t"] + [f"y{i}" for i in range(m)] + [f"xhat{i}" for i in range(n)]
    header += [f"V{i}{j}" for i in range(n) for j in range(n)]
    if x_true is not None:
        header += [f"x{i}" for i in range(n)]
    own = not hasattr(path, "write")
    fh = open(path, "w", newline="") if own else path
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k, st in enumerate(states):
            row = [st.t, *ys[k], *st.x_hat, *st.V.ravel()]
            if x_true is not None:
                row += list(np.asarray(x_true)[k])
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
    finally:
        if own:
            fh.close()


def read_observations(path):
    """Read the ``y*`` columns of a trajectory CSV into a (T, m) array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [i for i, h in enumerate(header) if h.startswith("y")]
        if not cols:
            raise InvalidInputError(f"{path} has no y columns")
        rows = [[float(r[i]) for i in cols] for r in reader if r]
    return np.array(rows).reshape(len(rows), len(cols))
