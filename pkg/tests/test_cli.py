import csv

import numpy as np
import pytest

from helpers import EXAMPLE_SIGMA
from wkf.cli import build_parser, main
from wkf.io import read_matrix, write_matrix


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_subcommands_registered():
    parser = build_parser()
    for cmd in ("estimate", "filter", "bench-mmse", "bench-kalman", "bench-static", "ball-surface"):
        argv = [cmd, "cov.txt", "--n", "1", "--m", "1"] if cmd == "estimate" else [cmd]
        args = parser.parse_args(argv)
        assert args.command == cmd
        for flag in ("seed", "rho", "rho_grid", "runs", "horizon", "out", "tol", "delta",
                     "max_iter", "trace"):
            assert hasattr(args, flag)


def test_estimate(tmp_path):
    cov = tmp_path / "cov.txt"
    write_matrix(cov, EXAMPLE_SIGMA)
    out, trace = tmp_path / "est.csv", tmp_path / "trace.csv"
    assert main(["estimate", str(cov), "--n", "1", "--m", "1", "--rho", "0.5",
                 "--out", str(out), "--trace", str(trace)]) == 0
    rows = {(r[0], r[1], r[2]): r[3] for r in _rows(out)[1:]}
    G = float(rows[("G", "0", "0")])
    assert 0 < G < 1 / 1.1
    assert len(_rows(trace)) > 1


def test_estimate_whitespace_matrix(tmp_path):
    cov = tmp_path / "cov.txt"
    cov.write_text("# nominal\n1 1\n1 1.1\n")
    np.testing.assert_array_equal(read_matrix(cov), EXAMPLE_SIGMA)
    assert main(["estimate", str(cov), "--n", "1", "--m", "1", "--rho", "0",
                 "--out", str(tmp_path / "o.csv")]) == 0


def test_estimate_bad_shape(tmp_path, capsys):
    cov = tmp_path / "cov.txt"
    write_matrix(cov, np.eye(3))
    assert main(["estimate", str(cov), "--n", "1", "--m", "1"]) == 1
    assert "expected" in capsys.readouterr().err


def test_filter_simulate_and_replay(tmp_path):
    sim = tmp_path / "sim.csv"
    assert main(["filter", "--horizon", "8", "--rho", "0.1", "--out", str(sim)]) == 0
    rows = _rows(sim)
    assert rows[0][-2:] == ["x0", "x1"] and len(rows) == 9
    replay = tmp_path / "replay.csv"
    assert main(["filter", "--observations", str(sim), "--rho", "0.1", "--out", str(replay)]) == 0
    # same observations, same filter: identical estimates; no truth columns
    a, b = _rows(sim), _rows(replay)
    assert b[0][-1] == "V11"
    assert [r[:8] for r in a] == [r[:8] for r in b]


def test_filter_classical(tmp_path):
    out = tmp_path / "kf.csv"
    assert main(["filter", "--horizon", "5", "--classical", "--out", str(out)]) == 0
    assert len(_rows(out)) == 6


def test_bench_mmse(tmp_path):
    out = tmp_path / "mmse.csv"
    assert main(["bench-mmse", "--dim", "5", "--runs", "3", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["method", "run", "d", "rho", "regret", "iterations"]
    assert [r[0] for r in rows[1:]] == ["bayes"] * 3 + ["robust"] * 3


def test_bench_mmse_timing(tmp_path):
    out = tmp_path / "mmse.csv"
    assert main(["bench-mmse", "--dim", "5", "--runs", "1", "--timing", "--out", str(out)]) == 0
    assert _rows(out)[0][-1] == "seconds"


def test_bench_kalman(tmp_path):
    out = tmp_path / "kal.csv"
    assert main(["bench-kalman", "--runs", "3", "--horizon", "10", "--rho-grid", "0.1,0.2",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["method", "run", "t", "rho", "value_db"]
    assert len(rows) == 1 + 3 * 10


def test_bench_static(tmp_path):
    out = tmp_path / "static.csv"
    assert main(["bench-static", "--runs", "3", "--times", "1,3", "--rho-grid", "0.1",
                 "--out", str(out)]) == 0
    methods = {r[0] for r in _rows(out)[1:]}
    assert methods == {"static", "sequential", "kf"}


def test_ball_surface_stdout(capsys):
    assert main(["ball-surface", "--rho", "1", "--resolution", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "S11,S22,S12" and len(lines) > 2


def test_bad_rho_grid():
    with pytest.raises(SystemExit):
        main(["bench-kalman", "--rho-grid", "a,b"])
