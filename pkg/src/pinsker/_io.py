"""Locale-independent CSV reading and writing with round-trippable floats."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

__all__ = ["format_value", "write_csv", "read_xy"]


def format_value(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return "" if value is None else str(value)


def write_csv(path, columns, rows) -> None:
    """Write dict rows with a fixed column order."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c, "")) for c in columns])


def read_xy(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``x,y`` file; raises ``ValueError`` on a bad header or row."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("input file is empty")
        if [h.strip() for h in header[:2]] != ["x", "y"]:
            raise ValueError(f"expected header 'x,y', got {','.join(header)!r}")
        xs, ys = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except (ValueError, IndexError):
                raise ValueError(f"line {lineno}: cannot parse {','.join(row)!r}") from None
    return np.asarray(xs), np.asarray(ys)
