"""CSV output: 17 significant digits, '.' decimal point, LF line endings."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np


def format_number(v: float) -> str:
    return "%.17g" % v


def csv_text(header, columns) -> str:
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("CSV columns differ in length")
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*cols):
        buf.write(",".join(format_number(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, header, columns) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(csv_text(header, columns))
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data
