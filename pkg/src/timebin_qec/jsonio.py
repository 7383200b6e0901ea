"""JSON and CSV text emission with fixed 17-significant-digit floats.

``json.dumps`` writes the shortest round-trip repr of a float, which is not
a fixed width.  Reports are compared byte-for-byte, so every float goes
through :func:`format_float` instead.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from typing import Any


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if text == "-0":
        text = "0"
    return text


def _emit(obj: Any, indent: int, level: int, out: list[str]) -> None:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, str)):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(int(obj)))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, Mapping):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(pad)
            out.append(json.dumps(str(key)) + ": ")
            _emit(value, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, Sequence):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(sep)
            out.append(pad)
            _emit(value, indent, level + 1, out)
        out.append(end + "]")
    elif hasattr(obj, "item"):  # numpy scalars
        _emit(obj.item(), indent, level, out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize ``obj`` to JSON text with 17-digit floats and stable layout."""
    out: list[str] = []
    _emit(obj, indent, 0, out)
    return "".join(out)


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(csv_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"
