"""CSV ingest of external traces and CSV export of traces and diagrams."""

from __future__ import annotations

import csv
import math

import numpy as np

from .diagram import ScalingDiagram
from .errors import EmptyInputError, ParseError, SpacingError
from .synthesis import INCREMENTS, TraceSeries

SPACING_RTOL = 1e-9
DIAGRAM_COLUMNS = ("scale_index", "log2_statistic", "weight", "stderr")


def _parse_row(fields):
    try:
        vals = [float(f) for f in fields]
    except ValueError:
        return None
    return vals


def ingest_trace(path):
    """Read a counts-per-bin trace from CSV.

    One column holds counts; two columns hold ``timestamp,count`` with
    uniformly spaced timestamps. A non-numeric first line is a header.
    """
    rows = []
    ncols = None
    with open(path, newline="") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            fields = [f.strip() for f in fields]
            if not fields or all(f == "" for f in fields):
                continue
            vals = _parse_row(fields)
            if vals is None:
                if lineno == 1:
                    continue
                raise ParseError(f"{path}: non-numeric value at line {lineno}", lineno)
            if ncols is None:
                ncols = len(vals)
                if ncols not in (1, 2):
                    raise ParseError(
                        f"{path}: expected 1 or 2 columns, got {ncols} at line {lineno}", lineno
                    )
            elif len(vals) != ncols:
                raise ParseError(f"{path}: expected {ncols} columns at line {lineno}", lineno)
            if not all(math.isfinite(v) for v in vals):
                raise ParseError(f"{path}: non-finite value at line {lineno}", lineno)
            rows.append((lineno, vals))
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    if ncols == 2:
        times = [v[0] for _, v in rows]
        if len(times) >= 2:
            step = times[1] - times[0]
            if step <= 0:
                raise SpacingError(
                    f"{path}: timestamps must increase (line {rows[0][0]})", rows[0][0]
                )
            for (line, _), t0, t1 in zip(rows, times, times[1:]):
                if abs((t1 - t0) - step) > SPACING_RTOL * abs(step):
                    raise SpacingError(
                        f"{path}: non-uniform timestamp spacing at line {line}: "
                        f"gap {t1 - t0:g} to the next sample, expected {step:g}",
                        line,
                    )
        values = [v[1] for _, v in rows]
        meta = {"source": str(path), "bin_width": times[1] - times[0] if len(times) > 1 else None}
    else:
        values = [v[0] for _, v in rows]
        meta = {"source": str(path)}
    return TraceSeries(np.array(values), INCREMENTS, meta)


def write_trace(series, path):
    with open(path, "w", newline="") as fh:
        fh.write("value\n")
        for v in series.values.tolist():
            fh.write(f"{v!r}\n")


def write_diagram(diagram, stderr, path):
    """Diagram points with per-point standard error as CSV."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DIAGRAM_COLUMNS) + "\n")
        for (x, y, w), e in zip(diagram.points, np.asarray(stderr, dtype=float).tolist()):
            fh.write(f"{x!r},{y!r},{w!r},{e!r}\n")


def read_diagram(path, **kwargs):
    """Inverse of :func:`write_diagram`; returns ``(diagram, stderr)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = np.empty((0, 4))
    return ScalingDiagram(data[:, 0], data[:, 1], data[:, 2], **kwargs), data[:, 3]


def emit_plot_data(diagram, fit, path, stderr=None):
    """Observed points and both fitted lines sampled at every scale.

    The file starts with ``#`` comment lines giving the break abscissa and
    index, then a ``series,scale_index,log2_statistic,stderr`` table whose
    ``series`` column is ``observed``, ``low_fit`` or ``high_fit``.
    """
    x = diagram.log2_scale
    if stderr is None:
        stderr = np.zeros(len(diagram))
    lines = {
        "observed": diagram.log2_statistic,
        "low_fit": fit.intercept_low + fit.slope_low * x,
        "high_fit": fit.intercept_high + fit.slope_high * x,
    }
    with open(path, "w", newline="") as fh:
        fh.write(f"# log2_break={fit.log2_break!r}\n")
        fh.write(f"# break_index={fit.break_index}\n")
        fh.write("series,scale_index,log2_statistic,stderr\n")
        for name, ys in lines.items():
            errs = stderr if name == "observed" else np.zeros(len(diagram))
            for xi, yi, ei in zip(x.tolist(), ys.tolist(), np.asarray(errs, float).tolist()):
                fh.write(f"{name},{xi!r},{yi!r},{ei!r}\n")


def read_plot_data(path):
    """Parse :func:`emit_plot_data` output into ``(header, {series: (x, y, stderr)})``."""
    header = {}
    cols = {}
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                header[key] = float(val)
                continue
            break
        for row in csv.reader(fh):
            name, x, y, e = row
            cols.setdefault(name, ([], [], []))
            for lst, v in zip(cols[name], (x, y, e)):
                lst.append(float(v))
    return header, {k: tuple(np.array(c) for c in v) for k, v in cols.items()}
