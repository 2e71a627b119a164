"""Delimited-text readers and writers for matrices and benchmark records."""

from __future__ import annotations

import csv
import io as _io
import sys

import numpy as np


def read_matrix(path):
    """Read a matrix with one row per line, comma- or whitespace-separated."""
    with open(path) as fh:
        text = fh.read()
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([float(tok) for tok in line.replace(",", " ").split()])
    if not rows:
        raise ValueError(f"{path} contains no numbers")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path} has ragged rows")
    return np.array(rows)


def write_matrix(path, M):
    M = np.atleast_2d(M)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in M:
            writer.writerow([repr(float(v)) for v in row])


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _sort_key(rec):
    run = -1 if rec.run is None else rec.run
    return (rec.method, run, rec.index, rec.rho)


def write_records(records, path=None, index_name="t", value_name="value",
                  iterations=False, seconds=False):
    """Write benchmark records as CSV sorted by (method, run, index, rho).

    Columns are ``method, run, <index_name>, rho, <value_name>`` plus the
    optional iteration and timing columns. Writes to stdout when `path` is
    None.
    """
    header = ["method", "run", index_name, "rho", value_name]
    if iterations:
        header.append("iterations")
    if seconds:
        header.append("seconds")
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in sorted(records, key=_sort_key):
        row = [rec.method, rec.run, rec.index, rec.rho, rec.value]
        if iterations:
            row.append(rec.iterations)
        if seconds:
            row.append(rec.seconds)
        writer.writerow([_fmt(v) for v in row])
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
