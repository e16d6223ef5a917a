"""CSV writers and readers for time series, snapshots and sweep tables."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..diagnostics import COLUMNS


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return "%.17g" % v


def write_timeseries(path, series, extra=None):
    """Write the diagnostic columns plus any ``extra`` columns (name -> per-row values)."""
    extra = dict(extra or {})
    names = list(COLUMNS) + list(extra)
    cols = [series.column(c) for c in COLUMNS] + [np.asarray(v, dtype=float) for v in extra.values()]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([_fmt(float(x)) for x in row])
    return path


def read_csv_columns(path):
    """Read a CSV into ``{column: array}``.

    Numeric columns become float arrays with empty cells as ``nan``; a column
    holding any non-numeric text is returned as a list of strings.
    """
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out = {}
    for i, name in enumerate(header):
        cells = [r[i] for r in body]
        try:
            out[name] = np.array([float(c) if c != "" else math.nan for c in cells])
        except ValueError:
            out[name] = cells
    return out


read_timeseries = read_csv_columns


def write_snapshot(path, state):
    grid = state.grid
    coords = grid.mesh()
    names = ["x", "y"][:grid.dim] + ["u", "v", "cu", "cv"]
    data = np.column_stack([c.ravel() for c in coords]
                           + [f.values.ravel() for f in (state.u, state.v, state.cu, state.cv)])
    path = Path(path)
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(names), comments="")
    return path


read_snapshot = read_csv_columns


def write_table(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) if isinstance(x, float) else x for x in r])
    return path
