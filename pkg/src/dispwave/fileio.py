"""Deterministic text artifacts: 17-significant-digit CSV and JSON helpers.

Identical inputs must produce byte-identical files, so every float goes
through the same fixed formatting and nothing time- or locale-dependent is
ever written.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x: float) -> str:
    """Full round-trip decimal text (17 significant digits)."""
    return format(float(x), ".17g")


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence],
              preamble: str | None = None) -> None:
    lines = []
    if preamble is not None:
        lines.append(preamble)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    Path(path).write_text("\n".join(lines) + "\n")


def jsonable(obj):
    """Recursively convert to JSON-safe values; infinities become 'infinite'."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "infinite" if obj > 0 else "-infinite"
        if math.isnan(obj):
            return "nan"
        return obj
    return obj


def write_json(path: Path | str, payload: dict) -> None:
    Path(path).write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n")
