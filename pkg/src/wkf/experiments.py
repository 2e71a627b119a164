"""Experiment drivers: the robust MMSE benchmark, the filter comparison on the
standard two-state tracking instance, static-versus-sequential estimation
and samples of the Gelbrich ball surface.

All randomness flows from a single integer seed through
``numpy.random.SeedSequence(seed).spawn(runs)``, one PCG64 stream per run,
so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, InvalidInputError
from .estimator import bayes_estimator, mse_under, solve_robust_mmse
from .frank_wolfe import FWConfig
from .gaussian import Gaussian, cov_transport_cost, psd_sqrt, sym
from .kalman import StateSpaceModel, apply_schedule, gain_schedule, noise_loadings

DEFAULT_RHO_GRID = tuple(round(a * 0.01, 2) for a in range(10, 21))

BBT = np.array([[1.9608, 0.0195], [0.0195, 1.9605]])
DDT = np.array([[1.0]])
C_OBS = np.array([[1.0, -1.0]])


def transition(delta):
    """State matrix of the tracking instance for uncertainty `delta`."""
    return np.array([[0.9802, 0.0196 + 0.099 * delta], [0.0, 0.9802]])


def benchmark_model(delta=0.0) -> StateSpaceModel:
    """Two-state, one-output tracking model; `delta` is a scalar or a callable of t."""
    B, D = noise_loadings(BBT, DDT)
    delta_at = delta if callable(delta) else (lambda t: delta)
    return StateSpaceModel(
        lambda t: (transition(delta_at(t)), B, C_OBS, D), np.zeros(2), np.eye(2)
    )


def run_streams(seed, runs):
    """Independent per-run generators derived from one seed."""
    return [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(seed).spawn(runs)]


def to_db(mse):
    mse = np.asarray(mse, dtype=float)
    if np.any(mse <= 0):
        raise InvalidInputError("MSE must be positive before conversion to dB")
    return 10.0 * np.log10(mse)


def steady_state(curve, window=0.2):
    """Mean of the final `window` fraction of a curve."""
    curve = np.asarray(curve, dtype=float)
    k = max(1, int(math.ceil(window * curve.size)))
    return float(np.mean(curve[-k:]))


@dataclass(frozen=True)
class ScenarioConfig:
    """Settings of a filter experiment.

    `mode` is ``"time-invariant"`` (one uncertainty draw per run) or
    ``"time-varying"`` (a fresh draw per step).
    """

    delta_bar: float = 10.0
    mode: str = "time-invariant"
    runs: int = 100
    horizon: int = 300
    rho_grid: tuple = DEFAULT_RHO_GRID
    seed: int = 0
    window: float = 0.2

    def __post_init__(self):
        if self.delta_bar < 0:
            raise InvalidInputError("delta_bar must be nonnegative")
        if self.mode not in ("time-invariant", "time-varying"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.runs < 1 or self.horizon < 1 or not self.rho_grid:
            raise InvalidInputError("runs, horizon and rho_grid must be nonempty")
        object.__setattr__(self, "rho_grid", tuple(float(r) for r in self.rho_grid))


@dataclass(frozen=True)
class BenchmarkRecord:
    """One output row. `run` is None for across-run aggregates."""

    method: str
    run: object
    index: int
    rho: float
    value: float
    iterations: object = None
    seconds: object = None


# ----------------------------------------------------------------------------
# robust MMSE benchmark

def generate_random_cov_pair(d, rng, zero_perturbation=False):
    """Draw a (true, nominal) covariance pair at Gelbrich distance <= sqrt(d).

    The nominal covariance has a random eigenbasis and eigenvalues uniform on
    [0.1, 10]; the true one is ``(Sigma^{1/2} + P^{1/2})^2`` for a random
    perturbation P with eigenvalues uniform on [0, 1].

    Returns
    -------
    sigma_true, sigma_nominal : ndarray, shape (d, d)
    rho : float
        ``sqrt(d)``.
    """
    if d < 2:
        raise InvalidInputError("d must be at least 2")
    A_true = rng.standard_normal((d, d))
    A_nom = rng.standard_normal((d, d))
    _, R_true = np.linalg.eigh(A_true + A_true.T)
    _, R_nom = np.linalg.eigh(A_nom + A_nom.T)
    lam_true = rng.uniform(0.0, 1.0, d)
    lam_nom = rng.uniform(0.1, 10.0, d)
    if zero_perturbation:
        lam_true = np.zeros(d)
    P = sym((R_true * lam_true) @ R_true.T)
    Sigma = sym((R_nom * lam_nom) @ R_nom.T)
    root = psd_sqrt(Sigma) + psd_sqrt(P)
    return sym(root @ root), Sigma, math.sqrt(d)


def mmse_benchmark(d, runs, seed=0, config=None, timing=False, zero_perturbation=False):
    """Regret of the robust and Bayesian MMSE estimators against the ideal one.

    For every run the regret is the MSE under the true distribution minus
    that of the Bayesian estimator built from the true covariance. The
    signal takes ``4d/5`` coordinates and the observation ``d/5``.

    Parameters
    ----------
    d : int
        Dimension, divisible by 5.
    runs : int
    seed : int
    config : FWConfig, optional
        Solver settings; the radius is overridden by ``sqrt(d)``.
    timing : bool
        Record wall-clock solve times (makes output non-reproducible).

    Returns
    -------
    list of BenchmarkRecord
    """
    if d % 5:
        raise InvalidInputError("d must be divisible by 5")
    n, m = 4 * d // 5, d // 5
    config = config or FWConfig(rho=math.sqrt(d))
    records = []
    for j, rng in enumerate(run_streams(seed, runs)):
        sigma_true, sigma_nom, rho = generate_random_cov_pair(d, rng, zero_perturbation)
        truth = Gaussian(np.zeros(d), sigma_true)
        t0 = time.perf_counter()
        eq = solve_robust_mmse(np.zeros(d), sigma_nom, n, m, replace(config, rho=rho))
        elapsed = time.perf_counter() - t0
        bayes = bayes_estimator(Gaussian(np.zeros(d), sigma_nom), n)
        ideal = bayes_estimator(truth, n)
        base = mse_under(ideal, truth)
        records.append(BenchmarkRecord(
            "robust", j, d, rho, mse_under(eq.estimator, truth) - base,
            iterations=eq.report.iterations, seconds=elapsed if timing else None,
        ))
        records.append(BenchmarkRecord("bayes", j, d, rho, mse_under(bayes, truth) - base))
    return records


# ----------------------------------------------------------------------------
# filter benchmark

def simulate(config: ScenarioConfig, horizon=None):
    """Simulate the true tracking system for every run.

    Returns
    -------
    xs : ndarray, shape (runs, T, 2)
    ys : ndarray, shape (runs, T, 1)
    deltas : ndarray, shape (runs, T)
    """
    T = horizon or config.horizon
    B, D = noise_loadings(BBT, DDT)
    xs = np.empty((config.runs, T, 2))
    ys = np.empty((config.runs, T, 1))
    deltas = np.empty((config.runs, T))
    for j, rng in enumerate(run_streams(config.seed, config.runs)):
        if config.mode == "time-invariant":
            deltas[j] = rng.uniform(-config.delta_bar, config.delta_bar)
        else:
            deltas[j] = rng.uniform(-config.delta_bar, config.delta_bar, T)
        x = rng.standard_normal(2)
        v = rng.standard_normal((T, B.shape[1]))
        for t in range(T):
            x = transition(deltas[j, t]) @ x + B @ v[t]
            xs[j, t] = x
            ys[j, t] = C_OBS @ x + D @ v[t]
    return xs, ys, deltas


@dataclass
class KalmanBenchmarkResult:
    """Per-step dB curves of the classical and robust filters."""

    records: list
    curves: dict
    steady: dict
    best_rho: float
    failures: int = 0
    schedules: dict = field(default_factory=dict, repr=False)

    @property
    def kf_steady(self):
        return self.steady[("kf", 0.0)]

    @property
    def wkf_steady(self):
        return self.steady[("wkf", self.best_rho)]


def filter_errors(model, schedule, xs, ys):
    """Across-run MSE per time step of a filter given by its gain schedule."""
    est = apply_schedule(model, schedule, ys)
    return np.mean(np.sum((xs - est) ** 2, axis=2), axis=0)


def kalman_benchmark(config: ScenarioConfig, fw_config=None) -> KalmanBenchmarkResult:
    """Compare the classical and robust filters on the tracking instance.

    Both filters use the nominal model (uncertainty 0) while the data come
    from the perturbed system. The robust filter is run for every radius on
    the grid and the one with the lowest steady-state error is reported.
    """
    fw_config = fw_config or FWConfig(rho=0.0)
    model = benchmark_model(0.0)
    xs, ys, _ = simulate(config)
    T = config.horizon
    curves, steady, schedules = {}, {}, {}
    failures = 0
    for method, rho in [("kf", 0.0)] + [("wkf", r) for r in config.rho_grid]:
        try:
            sched = gain_schedule(model, T, rho, fw_config)
        except ConvergenceError as exc:
            failures += 1
            warnings.warn(f"radius {rho} skipped: {exc}")
            continue
        schedules[(method, rho)] = sched
        curve = to_db(filter_errors(model, sched, xs, ys))
        curves[(method, rho)] = curve
        steady[(method, rho)] = steady_state(curve, config.window)
    wkf = [k for k in steady if k[0] == "wkf"]
    if not wkf:
        raise ConvergenceError("every radius on the grid failed")
    best = min(wkf, key=lambda k: (steady[k], k[1]))[1]
    records = [
        BenchmarkRecord(method, None, t + 1, rho, float(v))
        for (method, rho), curve in sorted(curves.items())
        for t, v in enumerate(curve)
    ]
    return KalmanBenchmarkResult(records, curves, steady, best, failures, schedules)


# ----------------------------------------------------------------------------
# static versus sequential estimation

def joint_history_covariance(model: StateSpaceModel, t):
    """Nominal covariance of (x_t, y_1, ..., y_t), observations in time order."""
    n = model.n
    _, B0, _, _ = model.at(1)
    k = B0.shape[1]
    width = n + t * k
    base = np.zeros((width, width))
    base[:n, :n] = model.V0
    base[n:, n:] = np.eye(t * k)
    X = np.hstack([np.eye(n), np.zeros((n, t * k))])
    rows = []
    for s in range(1, t + 1):
        A, B, C, D = model.at(s)
        E = np.zeros((k, width))
        E[:, n + (s - 1) * k : n + s * k] = np.eye(k)
        X = A @ X + B @ E
        rows.append(C @ X + D @ E)
    M = np.vstack([X] + rows)
    return sym(M @ base @ M.T), M[:, :n] @ model.x0


@dataclass
class StaticResult:
    """Static and sequential errors (dB) at the requested time points."""

    records: list
    static_db: dict
    best_static_rho: dict
    sequential_db: dict
    kf_db: dict
    sequential_rho: float


def static_estimation_experiment(config: ScenarioConfig, times=(1, 5, 10, 20, 50, 100),
                                 fw_config=None, static_grid=None) -> StaticResult:
    """Treat the whole history Y_t as one observation and solve one robust problem.

    The static estimator is evaluated on the same simulated runs as the
    sequential robust filter (whose radius is picked by steady-state error).
    """
    fw_config = fw_config or FWConfig(rho=0.0)
    grid = tuple(sorted({0.0, *(static_grid or config.rho_grid)}))
    times = tuple(sorted(set(int(t) for t in times)))
    if max(times) > config.horizon:
        config = replace(config, horizon=max(times))
    seq = kalman_benchmark(config, fw_config)
    model = benchmark_model(0.0)
    xs, ys, _ = simulate(config)
    records, static_db, best_static, seq_db, kf_db = [], {}, {}, {}, {}
    for t in times:
        Sigma, mu = joint_history_covariance(model, t)
        n = model.n
        m = Sigma.shape[0] - n
        Y = ys[:, :t, :].reshape(config.runs, -1)
        x_t = xs[:, t - 1]
        errs = {}
        for rho in grid:
            eq = solve_robust_mmse(mu, Sigma, n, m, replace(fw_config, rho=rho))
            est = eq.estimator.G @ Y.T
            x_hat = est.T + eq.estimator.g
            errs[rho] = float(to_db(np.mean(np.sum((x_t - x_hat) ** 2, axis=1))))
            records.append(BenchmarkRecord("static", None, t, rho, errs[rho]))
        static_db[t] = errs
        best_static[t] = min(grid, key=lambda r: (errs[r], r))
        seq_db[t] = float(seq.curves[("wkf", seq.best_rho)][t - 1])
        kf_db[t] = float(seq.curves[("kf", 0.0)][t - 1])
        records.append(BenchmarkRecord("sequential", None, t, seq.best_rho, seq_db[t]))
        records.append(BenchmarkRecord("kf", None, t, 0.0, kf_db[t]))
    return StaticResult(records, static_db, best_static, seq_db, kf_db, seq.best_rho)


# ----------------------------------------------------------------------------
# Gelbrich ball surface

def ball_surface_samples(rho, resolution=32):
    """Boundary points of the Gelbrich ball of radius `rho` around I_2.

    Rays ``I + r U`` are cast along directions U on the unit sphere of
    (S11, S22, S12); the crossing ``cost(I + r U, I) = rho^2`` is located by
    bisection. Rays that leave the PSD cone before crossing are dropped.

    Returns
    -------
    points : ndarray, shape (k, 3)
        Columns S11, S22, S12.
    """
    if not rho > 0:
        raise InvalidInputError("rho must be positive")
    n_theta = 4 * max(1, int(math.ceil(resolution / 4)))
    n_phi = max(3, resolution // 2 + 1)
    eye = np.eye(2)
    target = rho**2
    points = []
    dirs = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]
    for phi in np.linspace(-np.pi / 2, np.pi / 2, n_phi)[1:-1]:
        for theta in 2 * np.pi * np.arange(n_theta) / n_theta:
            dirs.append((np.cos(phi) * np.cos(theta), np.cos(phi) * np.sin(theta), np.sin(phi)))
    for u1, u2, u3 in dirs:
        U = np.array([[u1, u3], [u3, u2]])
        lam_min = np.linalg.eigvalsh(U)[0]
        r_psd = -1.0 / lam_min if lam_min < 0 else np.inf
        cost = lambda r: cov_transport_cost(eye + r * U, eye)
        hi = 1.0
        while hi < r_psd and cost(hi) < target:
            hi *= 2.0
        if hi >= r_psd:
            hi = r_psd
            if cost(hi) < target:
                continue
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            if cost(mid) < target:
                lo = mid
            else:
                hi = mid
        r = hi if abs(cost(hi) - target) <= abs(cost(lo) - target) else lo
        if abs(cost(r) - target) <= 1e-8:
            S = eye + r * U
            points.append((S[0, 0], S[1, 1], S[0, 1]))
    return np.array(points)
