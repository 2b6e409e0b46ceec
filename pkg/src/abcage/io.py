"""Output serialization: CSV with a commented metadata header, and JSON.

Every CSV starts with ``#`` metadata lines (tool version, creation
timestamp, config hash, seed, free-form notes) followed by a header row and
data rows.  Floats are rendered with %.12g so reruns with the same inputs
produce byte-identical bodies; the timestamp line is the only
run-dependent part.
"""
from __future__ import annotations

import datetime
import hashlib
import json
from pathlib import Path

FLOAT_FMT = "%.12g"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return FLOAT_FMT % v
    return str(v)


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form of a config mapping."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"),
                       default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def metadata_lines(meta: dict) -> list:
    """Render a metadata mapping as '# key = value' lines.

    The 'created' key is filled with the current UTC time if absent, so
    callers that want reproducible output can pass their own.
    """
    out = dict(meta)
    out.setdefault("created", datetime.datetime.now(
        datetime.timezone.utc).isoformat(timespec="seconds"))
    return [f"# {k} = {format_value(v)}" for k, v in out.items()]


def write_csv(path, columns: dict, meta: dict) -> None:
    """Write named columns (equal-length sequences) with metadata header."""
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    if len({len(c) for c in cols}) > 1:
        raise ValueError("columns must have equal length")
    lines = metadata_lines(meta)
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict, meta: dict) -> None:
    """JSON report with the metadata under a 'meta' key, sorted keys."""
    doc = {"meta": {k: v for k, v in meta.items()}}
    doc["meta"].setdefault("created", datetime.datetime.now(
        datetime.timezone.utc).isoformat(timespec="seconds"))
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2,
                                     default=str) + "\n")


def read_csv(path):
    """Parse a file written by write_csv: (meta dict, column dict)."""
    meta, names, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        if not line.strip():
            continue
        if names is None:
            names = line.split(",")
        else:
            rows.append(line.split(","))
    if names is None:
        return meta, {}
    columns = {n: [] for n in names}
    for row in rows:
        for n, v in zip(names, row):
            try:
                columns[n].append(float(v))
            except ValueError:
                columns[n].append(v)
    return meta, columns
