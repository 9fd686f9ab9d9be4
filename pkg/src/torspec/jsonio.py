"""Deterministic JSON and CSV writers.

Floats are emitted with 17 significant digits, which round-trips doubles
exactly; key order is insertion order, so identical inputs produce byte
identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad_in}{json.dumps(str(key))}: {_render(value, indent, level + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad_in}{_render(value, indent, level + 1)}" for value in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _render(obj, indent, 0) + "\n"


def dump(obj, path) -> None:
    with open(path, "w") as handle:
        handle.write(dumps(obj))


def write_trace_csv(trace, path) -> None:
    """Trace history as `t,l2,sup,mass` rows at full double precision."""
    with open(path, "w") as handle:
        handle.write("t,l2,sup,mass\n")
        for t, l2, sup, mass in zip(trace.times, trace.l2_norms, trace.sup_norms, trace.masses):
            handle.write(
                f"{format_float(t)},{format_float(l2)},{format_float(sup)},{format_float(mass)}\n"
            )
