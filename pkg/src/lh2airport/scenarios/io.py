"""Run artifacts: CSV series and tables, key/value summaries, snapshot JSON.

Every CSV starts with one comment row naming the artifact kind and the schema
version, for example ``# lh2airport series=distribution schema=1``. Numbers are
written with 12 significant digits so repeated runs give identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """File header missing or written by an unsupported schema version."""


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def _header(kind: str, name: str) -> str:
    return f"# lh2airport {kind}={name} schema={SCHEMA_VERSION}"


def _check_header(line: str, kind: str) -> str:
    parts = line.strip().split()
    if len(parts) != 4 or parts[0] != "#" or parts[1] != "lh2airport":
        raise SchemaError(f"not an lh2airport file: {line.strip()!r}")
    key, _, name = parts[2].partition("=")
    if key != kind:
        raise SchemaError(f"expected a {kind} file, found {key}")
    version = parts[3].partition("=")[2]
    if version != str(SCHEMA_VERSION):
        raise SchemaError(f"unsupported schema version {version}")
    return name


def write_series_csv(path, name: str, series: dict) -> Path:
    """One row per recorded step; columns in insertion order."""
    path = Path(path)
    cols = list(series)
    data = [np.asarray(series[c], dtype=float) for c in cols]
    n = len(data[0]) if data else 0
    with path.open("w", newline="") as fh:
        fh.write(_header("series", name) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for i in range(n):
            w.writerow([_fmt(d[i]) for d in data])
    return path


def read_series_csv(path):
    """(name, columns) from a series CSV."""
    with Path(path).open(newline="") as fh:
        name = _check_header(fh.readline(), "series")
        rows = list(csv.reader(fh))
    cols = rows[0]
    arr = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(cols))
    return name, {c: arr[:, i] for i, c in enumerate(cols)}


def write_table_csv(path, name: str, table: dict, index: str = "row") -> Path:
    """Nested ``{row: {column: value}}`` mapping as a CSV table."""
    path = Path(path)
    cols = []
    for vals in table.values():
        for c in vals:
            if c not in cols:
                cols.append(c)
    with path.open("w", newline="") as fh:
        fh.write(_header("table", name) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([index] + cols)
        for row, vals in table.items():
            w.writerow([row] + [_fmt(vals.get(c, "")) for c in cols])
    return path


def read_table_csv(path):
    with Path(path).open(newline="") as fh:
        name = _check_header(fh.readline(), "table")
        rows = list(csv.reader(fh))
    cols = rows[0][1:]
    return name, {r[0]: dict(zip(cols, r[1:])) for r in rows[1:]}


def write_summary(path, name: str, summary: dict, flags=()) -> Path:
    """``key = value`` lines, keys sorted, flags on one comma-separated line."""
    path = Path(path)
    lines = [_header("summary", name), f"flags = {','.join(flags)}"]
    for key in sorted(summary):
        lines.append(f"{key} = {_fmt(summary[key])}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_summary(path):
    """(name, values, flags); numeric values come back as float."""
    text = Path(path).read_text().splitlines()
    name = _check_header(text[0], "summary")
    out, flags = {}, []
    for line in text[1:]:
        key, _, raw = line.partition(" = ")
        if key == "flags":
            flags = [f for f in raw.split(",") if f]
            continue
        try:
            out[key] = float(raw)
        except ValueError:
            out[key] = {"true": True, "false": False}.get(raw, raw)
    return name, out, flags


def write_snapshots(path, snapshots: dict) -> Path:
    """Handoff snapshots as JSON with the schema version alongside."""
    path = Path(path)
    doc = {"schema": SCHEMA_VERSION, "kind": "snapshots", "snapshots": snapshots}
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return path


def read_snapshots(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") != "snapshots" or doc.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: not a schema {SCHEMA_VERSION} snapshot file")
    return doc["snapshots"]
