"""JSON helpers for real and complex matrices.

Matrices are row-major arrays of arrays.  Complex entries are written as
``[re, im]`` pairs; a matrix is decoded as complex as soon as one entry is a
pair.
"""
import json

import numpy as np


def encode_matrix(M):
    M = np.atleast_2d(np.asarray(M))
    if np.iscomplexobj(M):
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return [[float(x) for x in row] for row in M]


def decode_matrix(data):
    if isinstance(data, dict):
        # tolerate {"A": ...}, {"a": ...}, {"R": ...} wrappers
        for key in ("matrix", "A", "a", "R", "omega", "frame"):
            if key in data:
                return decode_matrix(data[key])
        raise ValueError("no matrix entry found in object")
    rows = list(data)
    if not rows:
        return np.zeros((0, 0))
    if not isinstance(rows[0], (list, tuple)):
        rows = [rows]
    is_complex = any(isinstance(x, (list, tuple)) for row in rows for x in row)
    if is_complex:
        out = np.array(
            [[complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in row] for row in rows],
            dtype=complex,
        )
    else:
        out = np.array(rows, dtype=float)
    return out.reshape(len(rows), -1)


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def dump_json(obj, path=None):
    """Serialize ``obj`` deterministically; write to ``path`` or return the text."""
    text = json.dumps(obj, sort_keys=True, indent=2, default=_default)
    if path is None:
        return text
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def _default(obj):
    if isinstance(obj, np.ndarray):
        return encode_matrix(obj) if obj.ndim == 2 else [_default(x) for x in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    raise TypeError(f"cannot serialize {type(obj).__name__}")
