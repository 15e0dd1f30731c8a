"""On-disk artifact formats: curve CSV, matrix CSV + sidecar, heatmap grid.

Every artifact is plain CSV or JSON, reproducible byte for byte from its
inputs: floats are written with repr (shortest round-trip form), missing
values as empty fields, JSON with sorted keys, and nothing time-stamped.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os

import numpy as np

from .errors import DataError
from .estimators import LagCurve, ResponseMatrix
from .fitting import FitResult
from .returns import MidpointSeries
from .signing import SignSeries

CURVE_HEADER = ("tau", "value", "count")


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; empty for missing."""
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _json_safe(obj):
    """Recursively map non-finite floats to None (JSON null)."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def stable_json(obj) -> str:
    return json.dumps(_json_safe(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(stable_json(obj))


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_curve_csv(curve: LagCurve, path: str) -> None:
    """Write a lag curve as `tau,value,count` rows; NaN becomes empty."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER)
        for tau, value, count in zip(curve.lags, curve.values, curve.counts):
            w.writerow([int(tau), _fmt(value), int(count)])


def read_curve_csv(
    path: str,
    kind: str = "response",
    stock_i: str = "",
    stock_j: str = "",
) -> LagCurve:
    """Read a `tau,value,count` file back into a LagCurve.

    Kind and pair tags are not stored in the CSV and must be supplied by
    the caller when they matter.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read curve {path}: {exc}") from None
    if not rows or tuple(rows[0]) != CURVE_HEADER:
        raise DataError(f"{path}: expected header {','.join(CURVE_HEADER)}")
    lags, values, counts = [], [], []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"{path}:{ln}: expected 3 fields, got {len(row)}")
        try:
            lags.append(int(row[0]))
            values.append(float(row[1]) if row[1] != "" else math.nan)
            counts.append(int(row[2]))
        except ValueError as exc:
            raise DataError(f"{path}:{ln}: {exc}") from None
    return LagCurve(
        kind=kind,
        stock_i=stock_i,
        stock_j=stock_j,
        lags=np.asarray(lags, dtype=np.int64),
        values=np.asarray(values, dtype=np.float64),
        counts=np.asarray(counts, dtype=np.int64),
    )


def write_matrix_csv(matrix: ResponseMatrix, path: str) -> None:
    """Normalized matrix with a symbol header row and column."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", *matrix.symbols])
        for i, sym in enumerate(matrix.symbols):
            w.writerow([sym, *(_fmt(v) for v in matrix.normalized[i])])


def matrix_sidecar(matrix: ResponseMatrix) -> dict:
    return {
        "tau": matrix.tau,
        "normalizer": matrix.normalizer,
        "symbols": list(matrix.symbols),
        "sectors": list(matrix.sectors),
        "sector_boundaries": list(matrix.sector_boundaries),
        "degenerate": matrix.degenerate,
    }


def write_matrix_sidecar(matrix: ResponseMatrix, path: str) -> None:
    write_json(matrix_sidecar(matrix), path)


def emit_heatmap_data(matrix: ResponseMatrix) -> str:
    """Dense whitespace grid of the normalized matrix for generic plotters.

    Header lines carry the lag, normalizer, symbol order, and the row/column
    indices where a new sector starts.

    Raises:
        DataError: On an empty matrix.
    """
    if len(matrix.symbols) == 0:
        raise DataError("cannot emit heatmap data for an empty matrix")
    out = io.StringIO()
    out.write(f"# tau {matrix.tau}\n")
    out.write(f"# normalizer {repr(matrix.normalizer)}\n")
    out.write(f"# symbols {' '.join(matrix.symbols)}\n")
    out.write(
        "# sector_boundaries "
        + " ".join(str(b) for b in matrix.sector_boundaries)
        + "\n"
    )
    for row in matrix.normalized:
        out.write(" ".join("nan" if math.isnan(v) else repr(float(v)) for v in row))
        out.write("\n")
    return out.getvalue()


def write_heatmap_data(matrix: ResponseMatrix, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(emit_heatmap_data(matrix))


def write_signs_csv(series: SignSeries, grid_start: int, path: str) -> None:
    """Sparse per-second signs: `second,sign` rows for nonzero seconds only.

    Seconds are wall-clock seconds of day (slot + grid start), so the file
    is meaningful without knowing the grid.
    """
    _ensure_parent(path)
    nz = np.nonzero(series.values)[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["second", "sign"])
        for slot in nz:
            w.writerow([int(grid_start + slot), int(series.values[slot])])


def write_midpoints_csv(series: MidpointSeries, grid_start: int, path: str) -> None:
    """Dense per-second midpoints: `second,midpoint`, empty while undefined."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["second", "midpoint"])
        for slot, value in enumerate(series.values):
            w.writerow([int(grid_start + slot), _fmt(value)])


def write_fit_json(fit: FitResult, path: str) -> None:
    write_json(fit.to_dict(), path)
