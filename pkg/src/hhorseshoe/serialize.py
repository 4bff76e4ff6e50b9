"""Table serialization shared by the command-line tools.

A table is a list of column names and a list of rows.  Floats are written
with 17 significant digits, enough to round-trip any double exactly.  JSON
mirrors the CSV schema with every number stored as its decimal string.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, List, Sequence

__all__ = ["format_value", "parse_value", "to_csv", "to_json", "from_csv", "from_json", "render", "parse"]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    try:  # numpy scalars
        return format_value(v.item())
    except AttributeError:
        return str(v)


def parse_value(s: str):
    """Inverse of :func:`format_value` for numbers; other strings pass through."""
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def to_json(columns: Sequence[str], rows: Iterable[Sequence], meta=None) -> str:
    doc = {"columns": list(columns), "rows": [[format_value(v) for v in row] for row in rows]}
    if meta:
        doc["meta"] = {k: format_value(v) for k, v in sorted(meta.items())}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# columns holding words or labels; "0010" must not become the integer 10
TEXT_COLUMNS = frozenset({
    "word", "itinerary", "symbol", "name", "bound", "method", "suite",
    "check", "detail", "representative", "branch", "escape_reason",
})


def _parse_rows(columns, rows, text_columns):
    keep = [c in text_columns for c in columns]
    return [[v if k else parse_value(v) for v, k in zip(row, keep)] for row in rows]


def from_csv(text: str, text_columns=TEXT_COLUMNS):
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, _parse_rows(columns, list(reader), text_columns)


def from_json(text: str, text_columns=TEXT_COLUMNS):
    doc = json.loads(text)
    return doc["columns"], _parse_rows(doc["columns"], doc["rows"], text_columns)


def render(fmt: str, columns, rows, meta=None) -> str:
    if fmt == "csv":
        return to_csv(columns, rows)
    if fmt == "json":
        return to_json(columns, rows, meta)
    raise ValueError(f"unknown format {fmt!r}")


def parse(fmt: str, text: str):
    return from_csv(text) if fmt == "csv" else from_json(text)
