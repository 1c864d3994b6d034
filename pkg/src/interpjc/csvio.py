"""Delimited output: fixed 17-significant-digit CSV with empty fields for undefined values."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .observables import ObservableSeries

SERIES_COLUMNS = ("lambda_t", "n_total", "n_g", "n_e", "p_e", "q_mandel")
SERIES_HEADER = ",".join(SERIES_COLUMNS)
SCAN_HEADER = "xi,delta," + SERIES_HEADER


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def series_rows(ser: ObservableSeries, time_scale: float = 1.0):
    cols = [ser.lambda_t * time_scale, ser.n_total, ser.n_g, ser.n_e, ser.p_e, ser.q_mandel]
    for row in zip(*cols):
        yield [fmt(v) for v in row]


def write_series_csv(path, ser: ObservableSeries, time_scale: float = 1.0):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(SERIES_HEADER + "\n")
        for row in series_rows(ser, time_scale):
            fh.write(",".join(row) + "\n")
    return path


def write_columns_csv(path, header, columns):
    """Write parallel numeric columns under ``header``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _parse(field: str) -> float:
    return float(field) if field != "" else float("nan")


def read_series_csv(path) -> ObservableSeries:
    """Load a series CSV; the result carries no initial state."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SERIES_COLUMNS:
            raise ValueError(f"unexpected header {','.join(header)!r}")
        data = np.array([[_parse(f) for f in row] for row in reader], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no rows")
    t, n_total, n_g, n_e, p_e, q = data.T
    return ObservableSeries(t, n_total, n_g, n_e, p_e, q, 1.0 - p_e)


def write_json(path, payload: dict):
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
