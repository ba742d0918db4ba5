"""CSV and JSON writers. Column order is fixed; the first line names the format version."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord

DIAGNOSTICS_HEADER = "# radchemo diagnostics v1"
PROFILE_HEADER = "# radchemo profile v1"


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def write_diagnostics(path, records) -> None:
    cols = DiagnosticsRecord.columns()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(DIAGNOSTICS_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rec in records:
            w.writerow([_fmt(getattr(rec, c)) for c in cols])


def read_diagnostics(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if first != DIAGNOSTICS_HEADER:
            raise ValueError(f"{path}: unexpected header {first!r}")
        return [
            {k: (float(v) if v != "" else None) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]


def write_profile(path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(PROFILE_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([_fmt(x) for x in row])


def read_profile(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        rows = list(csv.reader(fh))
    names, body = rows[0], np.array(rows[1:], dtype=float)
    return {k: body[:, i] for i, k in enumerate(names)}


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n", encoding="utf-8")
