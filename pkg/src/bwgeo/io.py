"""Matrix file reading and writing.

JSON files hold ``{"shape": [rows, cols], "rows": [[...], ...]}``; files
ending in ``.csv`` hold one comma-separated row per line. Values are written
with 17 significant digits so a write/read cycle is lossless.
"""

import json
import math
from pathlib import Path

import numpy as np

__all__ = ["MatrixFormatError", "read_matrix", "write_matrix", "format_float", "matrix_to_obj", "dumps", "to_csv"]


class MatrixFormatError(ValueError):
    """A matrix file could not be parsed or violates its declared shape."""


def format_float(x):
    """17 significant digits, always readable back as a float."""
    x = float(x)
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = f"{x:.17g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _check_finite(a):
    if not np.all(np.isfinite(a)):
        raise MatrixFormatError("matrix has non-finite entries")
    return a


def _from_obj(obj):
    if not isinstance(obj, dict) or "shape" not in obj or "rows" not in obj:
        raise MatrixFormatError("expected an object with 'shape' and 'rows'")
    shape = obj["shape"]
    rows = obj["rows"]
    if not (isinstance(shape, list) and len(shape) == 2 and all(isinstance(s, int) and s >= 0 for s in shape)):
        raise MatrixFormatError(f"invalid shape {shape!r}")
    if not isinstance(rows, list) or len(rows) != shape[0]:
        raise MatrixFormatError("row count does not match shape")
    for row in rows:
        if not isinstance(row, list) or len(row) != shape[1]:
            raise MatrixFormatError("row length does not match shape")
    try:
        a = np.array(rows, dtype=np.float64).reshape(shape)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"non-numeric entry: {exc}") from exc
    return _check_finite(a)


def _from_csv(text):
    rows = [line for line in text.splitlines() if line.strip()]
    try:
        data = [[float(v) for v in line.split(",")] for line in rows]
    except ValueError as exc:
        raise MatrixFormatError(f"non-numeric entry: {exc}") from exc
    if len({len(r) for r in data}) > 1:
        raise MatrixFormatError("ragged CSV rows")
    a = np.array(data, dtype=np.float64).reshape(len(data), len(data[0]) if data else 0)
    return _check_finite(a)


def read_matrix(path):
    """Read a matrix from a JSON or CSV file (chosen by extension)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        return _from_csv(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON in {path}: {exc}") from exc
    return _from_obj(obj)


def matrix_to_obj(m):
    m = np.asarray(m, dtype=np.float64)
    return {"shape": list(m.shape), "rows": m.tolist()}


def _emit(o):
    if isinstance(o, dict):
        items = (f"{json.dumps(str(k))}: {_emit(o[k])}" for k in sorted(o))
        return "{" + ", ".join(items) + "}"
    if isinstance(o, np.ndarray):
        return _emit(matrix_to_obj(o))
    if isinstance(o, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in o) + "]"
    if o is None or isinstance(o, (bool, np.bool_)):
        return json.dumps(None if o is None else bool(o))
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return format_float(o)
    return json.dumps(o)


def dumps(obj):
    """Deterministic JSON text with 17-digit floats and sorted keys."""
    return _emit(obj)


def to_csv(m):
    m = np.asarray(m, dtype=np.float64)
    return "".join(",".join(format_float(v) for v in row) + "\n" for row in m)


def write_matrix(path, m):
    path = Path(path)
    text = to_csv(m) if path.suffix.lower() == ".csv" else dumps(matrix_to_obj(m)) + "\n"
    path.write_text(text, encoding="utf-8")
