# cutloci/serialize.py
"""JSON/CSV wire formats.

Matrices travel as ``{"rows": r, "cols": c, "field": "real"|"complex",
"data": [...row-major...]}`` with complex scalars as ``[re, im]`` pairs.
All floating-point numbers are rendered with 17 significant digits so that
output is byte-stable and round-trips exactly.
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _render(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _render(obj)


def scalar_to_json(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return float(x)


def array_to_flat(a: np.ndarray) -> list:
    return [scalar_to_json(x) for x in np.asarray(a).ravel(order="C")]


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    field = "complex" if np.iscomplexobj(m) else "real"
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "field": field,
        "data": array_to_flat(m),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    field = obj.get("field", "real")
    data = obj["data"]
    if field == "complex":
        vals = [complex(re, im) for re, im in data]
        arr = np.array(vals, dtype=complex)
    else:
        arr = np.array([float(x) for x in data], dtype=float)
    if arr.size != rows * cols:
        raise ValueError(f"data length {arr.size} != {rows}x{cols}")
    return arr.reshape(rows, cols)


def vector_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        m = matrix_from_json(obj)
        return m.ravel() if 1 in m.shape else m
    arr = obj
    if arr and isinstance(arr[0], (list, tuple)) and len(arr[0]) == 2 and not isinstance(arr[0][0], (list, tuple)):
        # ambiguous: could be a 2-column real matrix or complex pairs; treat
        # bare nested pairs as complex only when tagged via dict form
        return np.array(arr, dtype=float)
    return np.array(arr, dtype=float)


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file + rename so failures leave no partial output."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cutloci-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def samples_to_json(submanifold: str, ambient: str, seed: int, samples) -> dict:
    return {
        "submanifold": submanifold,
        "ambient": ambient,
        "seed": int(seed),
        "samples": [
            {
                "foot": array_to_flat(s.foot.coords),
                "dir": array_to_flat(s.direction.vec),
                "rho": float(s.rho),
                "cut": array_to_flat(s.cut_point.coords),
                "mult": int(s.multiplicity),
                "saturated": bool(s.saturated),
                "class": s.classification,
            }
            for s in samples
        ],
    }


def samples_to_csv(samples) -> str:
    # family_tag is dropped here, hence the lossy-format header note.
    lines = ["# lossy CSV export (no family_tag); JSON is canonical",
             "foot,dir,rho,cut,mult,saturated,class"]
    for s in samples:
        foot = ";".join(fmt_float(x) for x in np.asarray(s.foot.coords, dtype=float).ravel())
        dvec = ";".join(fmt_float(x) for x in np.asarray(s.direction.vec, dtype=float).ravel())
        cut = ";".join(fmt_float(x) for x in np.asarray(s.cut_point.coords, dtype=float).ravel())
        lines.append(
            f"{foot},{dvec},{fmt_float(s.rho)},{cut},{int(s.multiplicity)},"
            f"{str(bool(s.saturated)).lower()},{s.classification}"
        )
    return "\n".join(lines) + "\n"
