"""Readers for frontlab output files, with loud schema checks."""

from __future__ import annotations

import json

import numpy as np

EXPECTED_SCHEMA = "frontlab-1"


class SchemaError(ValueError):
    pass


def read_table(path, required=()):
    """Read a frontlab CSV: schema comment line, header, numeric rows."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("#") or f"schema={EXPECTED_SCHEMA}" not in first:
            raise SchemaError(f"{path}: missing or mismatched schema line: {first!r}")
        header = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append([_num(v) for v in line.split(",")])
    table = {name: np.array([r[i] for r in rows]) for i, name in enumerate(header)}
    for col in required:
        if col not in table:
            raise SchemaError(f"{path}: required column {col!r} missing "
                              f"(have {header})")
    if rows and any(len(r) != len(header) for r in rows):
        raise SchemaError(f"{path}: ragged rows")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return table


def _num(v):
    v = v.strip()
    if v in ("+inf", "inf"):
        return np.inf
    if v == "-inf":
        return -np.inf
    if v in ("nan", ""):
        return np.nan
    return float(v)


def read_events(path, limit=None):
    """Read a frontlab JSONL event log."""
    events = []
    with open(path) as fh:
        first = fh.readline().strip()
        if f"schema={EXPECTED_SCHEMA}" not in first:
            raise SchemaError(f"{path}: missing schema line")
        for line in fh:
            if not line.strip():
                continue
            events.append(json.loads(line))
            if limit is not None and len(events) >= limit:
                break
    if not events:
        raise SchemaError(f"{path}: no events")
    return events


def read_summary(path):
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("schema") != EXPECTED_SCHEMA:
        raise SchemaError(f"{path}: schema mismatch: {payload.get('schema')!r}")
    return payload
