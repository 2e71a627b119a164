"""Command-line entry point: ``wkf <subcommand> [flags]``.

Every subcommand writes delimited text, to ``--out`` if given and to stdout
otherwise. Benchmark outputs are byte-identical for a fixed seed and flag
set unless ``--timing`` is on.
"""

from __future__ import annotations

import argparse
import csv
import sys
import numpy as np

from . import experiments as ex
from .errors import InvalidInputError
from .estimator import solve_robust_mmse
from .frank_wolfe import FWConfig, write_trace
from .io import read_matrix, write_records
from .kalman import read_observations, run_filter, run_kalman, write_trajectory


def _floats(text):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _ints(text):
    return tuple(int(v) for v in _floats(text))


def _common(p, runs=None, horizon=None, rho=None):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=rho)
    p.add_argument("--rho-grid", type=_floats, default=ex.DEFAULT_RHO_GRID,
                   help="comma-separated radii")
    p.add_argument("--runs", type=int, default=runs)
    p.add_argument("--horizon", type=int, default=horizon)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--tol", type=float, default=1e-4, help="relative duality gap")
    p.add_argument("--delta", type=float, default=1e-3, help="subproblem accuracy factor")
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--trace", default=None, help="write the Frank-Wolfe trace here")


def _scenario(p):
    p.add_argument("--delta-bar", type=float, default=10.0)
    p.add_argument("--mode", choices=("time-invariant", "time-varying"), default="time-invariant")
    p.add_argument("--window", type=float, default=0.2, help="steady-state fraction")


def build_parser():
    parser = argparse.ArgumentParser(prog="wkf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="robust MMSE estimator from a covariance file")
    _common(p, rho=1.0)
    p.add_argument("cov", help="covariance matrix file")
    p.add_argument("--mean", default=None, help="mean vector file (default zero)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("filter", help="run the robust filter on the tracking model")
    _common(p, horizon=300, rho=0.1)
    _scenario(p)
    p.add_argument("--observations", default=None,
                   help="trajectory CSV with y columns; simulate when omitted")
    p.add_argument("--classical", action="store_true", help="run the classical filter")
    p.add_argument("--warm-start", action="store_true")

    p = sub.add_parser("bench-mmse", help="robust vs Bayesian MMSE regret")
    _common(p, runs=200)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--timing", action="store_true", help="record solve times")

    p = sub.add_parser("bench-kalman", help="classical vs robust filter error curves")
    _common(p, runs=100, horizon=300)
    _scenario(p)

    p = sub.add_parser("bench-static", help="static vs sequential estimation")
    _common(p, runs=50, horizon=100)
    _scenario(p)
    p.add_argument("--times", type=_ints, default=(1, 5, 10, 20, 50, 100))

    p = sub.add_parser("ball-surface", help="boundary of the Gelbrich ball around I_2")
    _common(p, rho=1.0)
    p.add_argument("--resolution", type=int, default=32)
    return parser


def _fw(args, rho=0.0):
    return FWConfig(rho=rho, delta=args.delta, rel_gap_tol=args.tol, max_iter=args.max_iter,
                    trace=args.trace is not None)


def _scenario_config(args, runs=None):
    return ex.ScenarioConfig(delta_bar=args.delta_bar, mode=args.mode, runs=runs or args.runs,
                             horizon=args.horizon, rho_grid=args.rho_grid, seed=args.seed,
                             window=args.window)


def _write_rows(path, header, rows):
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, (str, int)) else repr(float(v)) for v in row])
    finally:
        if path:
            fh.close()


def cmd_estimate(args):
    Sigma = read_matrix(args.cov)
    d = args.n + args.m
    if Sigma.shape != (d, d):
        raise InvalidInputError(f"covariance is {Sigma.shape}, expected {d}x{d}")
    mu = np.zeros(d) if args.mean is None else read_matrix(args.mean).ravel()
    eq = solve_robust_mmse(mu, Sigma, args.n, args.m, _fw(args, args.rho))
    if args.trace:
        write_trace(eq.report, args.trace)
    rows = []
    for name, M in (("G", eq.estimator.G), ("g", eq.estimator.g[:, None]),
                    ("S_star", eq.report.S_star.S), ("V", eq.posterior_cov)):
        rows += [(name, i, j, M[i, j]) for i in range(M.shape[0]) for j in range(M.shape[1])]
    rows.append(("worst_case_mse", 0, 0, eq.worst_case_mse))
    rows.append(("dual_upper_bound", 0, 0, eq.report.dual_upper_bound))
    rows.append(("iterations", 0, 0, eq.report.iterations))
    _write_rows(args.out, ["quantity", "i", "j", "value"], rows)


def cmd_filter(args):
    model = ex.benchmark_model(0.0)
    x_true = None
    if args.observations:
        ys = read_observations(args.observations)
    else:
        xs, ys3, _ = ex.simulate(_scenario_config(args, runs=1))
        ys, x_true = ys3[0], xs[0]
    if args.classical:
        states = run_kalman(model, ys)
    else:
        states = run_filter(model, ys, args.rho, _fw(args, args.rho), warm_start=args.warm_start)
        if args.trace and states[-1].last_report is not None:
            write_trace(states[-1].last_report, args.trace)
    write_trajectory(args.out or sys.stdout, states, ys, x_true)


def cmd_bench_mmse(args):
    recs = ex.mmse_benchmark(args.dim, args.runs, seed=args.seed, config=_fw(args, 1.0),
                             timing=args.timing)
    write_records(recs, args.out, index_name="d", value_name="regret",
                  iterations=True, seconds=args.timing)


def cmd_bench_kalman(args):
    res = ex.kalman_benchmark(_scenario_config(args), _fw(args))
    write_records(res.records, args.out, index_name="t", value_name="value_db")
    print(f"kf steady {res.kf_steady!r} dB, wkf steady {res.wkf_steady!r} dB "
          f"at rho={res.best_rho!r}, failures={res.failures}", file=sys.stderr)


def cmd_bench_static(args):
    res = ex.static_estimation_experiment(_scenario_config(args), times=args.times,
                                          fw_config=_fw(args))
    write_records(res.records, args.out, index_name="t", value_name="value_db")
    for t in sorted(res.best_static_rho):
        print(f"t={t}: best static rho={res.best_static_rho[t]!r}", file=sys.stderr)


def cmd_ball_surface(args):
    pts = ex.ball_surface_samples(args.rho, args.resolution)
    _write_rows(args.out, ["S11", "S22", "S12"], pts)


COMMANDS = {
    "estimate": cmd_estimate,
    "filter": cmd_filter,
    "bench-mmse": cmd_bench_mmse,
    "bench-kalman": cmd_bench_kalman,
    "bench-static": cmd_bench_static,
    "ball-surface": cmd_ball_surface,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValueError, RuntimeError) as exc:
        print(f"wkf {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
