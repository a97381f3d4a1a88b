"""Run records (JSON) and dense series (CSV)."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence

from .errors import SchemaError

SCHEMA_VERSION = 1
SERIES_COLUMNS = ("t", "sup_norm", "I", "dt")
DETERMINISM_NOTE = "no random seeds; identical arguments reproduce this record except wall_time"


@dataclass
class RunRecord:
    command: str
    params: Dict[str, object]
    grid: Dict[str, object]
    classification: Optional[str] = None
    scalars: Dict[str, object] = field(default_factory=dict)
    series: Dict[str, str] = field(default_factory=dict)
    wall_time: float = 0.0
    note: str = DETERMINISM_NOTE
    schema_version: int = SCHEMA_VERSION


_ORDER = ("schema_version", "command", "params", "grid", "classification",
          "scalars", "series", "wall_time", "note")


def _clean(x):
    """JSON-safe copy: non-finite reals become None, dict keys sorted."""
    if isinstance(x, dict):
        return {str(k): _clean(x[k]) for k in sorted(x, key=str)}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if hasattr(x, "item"):          # numpy scalars
        x = x.item()
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    return x


def serialize_run(record: RunRecord) -> bytes:
    data = {k: _clean(getattr(record, k)) for k in _ORDER}
    return (json.dumps(data, ensure_ascii=False, allow_nan=False, indent=1) + "\n").encode("utf-8")


def load_run(raw: bytes) -> RunRecord:
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot parse run record: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("run record must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    missing = [k for k in _ORDER if k not in data]
    if missing:
        raise SchemaError(f"run record lacks {missing}")
    return RunRecord(**{k: data[k] for k in _ORDER})


def series_csv(rows: Sequence[Sequence[float]], columns: Sequence[str] = SERIES_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) or hasattr(v, "item") else v for v in row])
    return buf.getvalue()


def read_series_csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return header, [[float(v) for v in row] for row in body]


def write_atomic(path: Path, data) -> None:
    """Write-then-rename so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
