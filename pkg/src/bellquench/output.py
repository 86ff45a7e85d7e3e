"""Deterministic CSV/JSON serialization and checksums.

All floating-point values are written with 17 significant digits so a
double round-trips exactly; JSON objects are emitted with
lexicographically sorted keys.  Identical inputs therefore produce
byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def _json_value(obj) -> str:
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",".join(f"{json.dumps(str(k))}:{_json_value(v)}"
                         for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_value(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def json_text(obj) -> str:
    return _json_value(obj) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json_text(obj))


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(str(h) for h in header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def write_matrix_csv(path, matrix, axis, corner="q_i\\q_f") -> None:
    """Matrix with the grid values as row/column labels."""
    header = [corner] + [fmt_float(q) for q in axis]
    rows = ([fmt_float(axis[i])] + [fmt_float(v) for v in matrix[i]]
            for i in range(len(axis)))
    write_csv(path, header, rows)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
