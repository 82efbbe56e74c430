"""Deterministic CSV output: header row, ``%.12e`` floats, plain integers."""

from __future__ import annotations

import csv
import io
import sys
from typing import Iterable, Sequence

FLOAT_FMT = "%.12e"


def format_cell(value) -> str:
    if isinstance(value, (bool,)):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if hasattr(value, "dtype") and value.dtype.kind in "iub":
        return str(int(value))
    return FLOAT_FMT % float(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write ``rows`` under ``header`` to ``path`` (``"-"`` means stdout)."""
    text = render_csv(header, rows)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
