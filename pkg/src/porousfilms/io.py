"""CSV output for snapshots, diagnostics series and sweep summaries."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import DiagnosticsRecord, Grid, State

SNAPSHOT_HEADER = "x,f,g,h"
DIAGNOSTICS_HEADER = ",".join(DiagnosticsRecord.CSV_FIELDS)


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_lines(path, lines):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_snapshot(state: State, grid: Grid, path) -> None:
    h = state.f + state.g
    lines = [SNAPSHOT_HEADER]
    lines += [",".join(map(_fmt, row)) for row in zip(grid.cell_centers, state.f, state.g, h)]
    _write_lines(path, lines)


def read_snapshot(path):
    """Return ``(x, f, g, h)`` arrays from a snapshot file."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2], data[:, 3]


def write_diagnostics(series, path) -> None:
    lines = [DIAGNOSTICS_HEADER]
    lines += [",".join(map(_fmt, r.csv_values())) for r in series]
    _write_lines(path, lines)


def read_diagnostics(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_table(rows: list, columns: list, path) -> None:
    """Plain CSV table; floats at full precision, other values verbatim."""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for c in columns:
            v = row.get(c, "")
            if isinstance(v, float):
                cells.append(_fmt(v))
            else:
                cells.append(str(v).replace(",", ";").replace("\n", " "))
        lines.append(",".join(cells))
    _write_lines(path, lines)
