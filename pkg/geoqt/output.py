# SPDX-License-Identifier: BUSL-1.1
"""CSV and JSON rendering of command results.

Floats are written with 17 significant digits so every value reads back
to the same double. Non-finite values become empty CSV cells or JSON null.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from geoqt import __version__
from geoqt.errors import DomainError
from geoqt.utils import atomic_write_text

FORMATS = ("csv", "json")

# private-use code point, never produced by config strings
_FLOAT_MARK = "\ue000"
_FLOAT_TOKEN = re.compile('"' + _FLOAT_MARK + r'(\d+)"')


def format_float(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        return ""
    return format(value, ".17g")


def to_jsonable(obj: Any) -> Any:
    """Plain Python structure for json: numpy scalars and arrays, tuples, complex, enums."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return to_jsonable(obj._asdict())
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def render_json(meta: dict, data: Any) -> str:
    floats: list[str] = []

    def mark(obj):
        if isinstance(obj, dict):
            return {k: mark(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [mark(v) for v in obj]
        if isinstance(obj, float):
            text = format_float(obj)
            if not text:
                return None
            floats.append(text)
            return f"{_FLOAT_MARK}{len(floats) - 1}"
        return obj

    payload = mark(to_jsonable({"meta": meta, "data": data}))
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    return _FLOAT_TOKEN.sub(lambda m: floats[int(m.group(1))], text) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def render_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise DomainError(f"row has {len(row)} cells, header has {len(columns)}")
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


@dataclass
class CommandResult:
    """What a command produced: a table for CSV and a payload for JSON."""

    command: str
    columns: tuple
    rows: list
    data: Any = None
    meta: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def json_data(self) -> Any:
        if self.data is not None:
            return self.data
        return [dict(zip(self.columns, row)) for row in self.rows]


def build_meta(command: str, config: dict, seed: Optional[int], extra: Optional[dict] = None) -> dict:
    meta = {"command": command, "version": __version__, "seed": seed, "config": config}
    if extra:
        meta.update(extra)
    return meta


def render(result: CommandResult, fmt: str) -> str:
    if fmt not in FORMATS:
        raise DomainError(f"unknown output format {fmt!r} (valid: {', '.join(FORMATS)})")
    if fmt == "json":
        return render_json(result.meta, result.json_data())
    return render_csv(result.columns, result.rows)


def meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_result(result: CommandResult, fmt: str, path=None, stream=None) -> Optional[Path]:
    """Write to path atomically, or to stream when no path is given.

    CSV output to a file gets a ``<path>.meta.json`` sidecar with the run
    metadata, since the table itself has no place for it.
    """
    text = render(result, fmt)
    if path is None:
        stream.write(text)
        stream.flush()
        return None
    written = atomic_write_text(path, text)
    if fmt == "csv":
        atomic_write_text(meta_path(written), render_json(result.meta, None))
    return written


def write_table(path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    return atomic_write_text(path, render_csv(columns, rows))
