"""CSV readers and writers for point sets, coverings and result tables."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import InputDomainError


def fmt(value) -> str:
    """Render a cell: shortest round-trip repr for floats, '-' for missing or non-finite."""
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "-"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(value)


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_points_csv(path):
    """Read ``x,y[,value]`` rows. Returns ``(points, values)``; ``values`` is None without a third column."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise InputDomainError(f"{path}: empty file") from None
        if header[:2] != ["x", "y"] or len(header) > 3 or (len(header) == 3 and header[2] != "value"):
            raise InputDomainError(f"{path}: expected header 'x,y' or 'x,y,value', got {','.join(header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputDomainError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise InputDomainError(f"{path}:{lineno}: {exc}") from None
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    values = arr[:, 2].copy() if len(header) == 3 else None
    return arr[:, :2].copy(), values


def write_points_csv(path, points, values=None):
    points = np.asarray(points, dtype=float)
    if values is None:
        return write_rows(path, ["x", "y"], points.tolist())
    values = np.asarray(values, dtype=float)
    return write_rows(path, ["x", "y", "value"], (list(p) + [v] for p, v in zip(points.tolist(), values.tolist())))


COVERING_HEADER = ["center_x", "center_y", "radius", "count", "indicator", "contaminated"]


def covering_rows(covering, indicators=None, contaminated=None):
    counts = covering.counts
    for j, c in enumerate(covering.centers):
        yield [
            float(c[0]),
            float(c[1]),
            covering.radius,
            int(counts[j]),
            None if indicators is None else float(indicators[j]),
            None if contaminated is None else bool(contaminated[j]),
        ]


def write_covering_csv(path, covering, indicators=None, contaminated=None):
    return write_rows(path, COVERING_HEADER, covering_rows(covering, indicators, contaminated))
