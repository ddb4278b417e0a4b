"""Dataset files: column-typed CSV plus a one-line JSON schema sidecar.

The sidecar is a JSON array of {name, kind, role} objects living next to the
CSV (``ds.csv`` -> ``ds.schema.json``). Cell encoding per kind: numeric cells
use repr (empty cell = missing), booleans are ``true``/``false``, itemset
cells join their items with ``|`` (empty cell = empty set), nominal cells are
written verbatim (missing is the ordinary dictionary value "⟂").
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from sqlscope.errors import SchemaError
from sqlscope.schema import Kind, Schema
from sqlscope.table import DataTable, build_table


def sidecar_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    if p.suffix == ".csv":
        return p.with_suffix(".schema.json")
    return Path(str(p) + ".schema.json")


def _encode_cell(kind: Kind, value) -> str:
    if kind is Kind.NOMINAL:
        return value
    if kind is Kind.BOOLEAN:
        return "true" if value else "false"
    if kind is Kind.NUMERIC:
        if isinstance(value, float) and math.isnan(value):
            return ""
        return repr(float(value))
    items = sorted(value)
    for item in items:
        if "|" in item:
            raise SchemaError(f"itemset item {item!r} may not contain '|'")
    return "|".join(items)


def _decode_cell(kind: Kind, text: str):
    if kind is Kind.NOMINAL:
        return text
    if kind is Kind.BOOLEAN:
        if text == "true":
            return True
        if text == "false":
            return False
        raise SchemaError(f"bad boolean cell {text!r}")
    if kind is Kind.NUMERIC:
        return None if text == "" else float(text)
    return set(text.split("|")) if text else set()


def dumps_dataset(table: DataTable) -> tuple[str, str]:
    """(csv text, schema sidecar text) for a table."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([a.name for a in table.schema])
    for r in range(table.row_count):
        writer.writerow(
            [
                _encode_cell(attr.kind, col.cell(r))
                for attr, col in zip(table.schema, table.columns)
            ]
        )
    schema_text = json.dumps(table.schema.to_json(), ensure_ascii=False) + "\n"
    return out.getvalue(), schema_text


def loads_dataset(csv_text: str, schema_text: str) -> DataTable:
    schema = Schema.from_json(json.loads(schema_text))
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("dataset CSV is empty (missing header)") from None
    if header != [a.name for a in schema]:
        raise SchemaError("CSV header does not match the schema sidecar")
    kinds = [a.kind for a in schema]
    rows = []
    for row in reader:
        if len(row) != len(kinds):
            raise SchemaError(f"CSV row {len(rows) + 2} has {len(row)} cells, expected {len(kinds)}")
        rows.append([_decode_cell(kind, cell) for kind, cell in zip(kinds, row)])
    return build_table(schema, rows)


def save_dataset(table: DataTable, csv_path: str | Path) -> Path:
    """Write the CSV and its sidecar; returns the sidecar path."""
    csv_text, schema_text = dumps_dataset(table)
    p = Path(csv_path)
    p.write_text(csv_text, encoding="utf-8")
    side = sidecar_path(p)
    side.write_text(schema_text, encoding="utf-8")
    return side


def load_dataset(csv_path: str | Path) -> DataTable:
    p = Path(csv_path)
    side = sidecar_path(p)
    if not side.exists():
        raise SchemaError(f"schema sidecar not found: {side}")
    return loads_dataset(p.read_text(encoding="utf-8"), side.read_text(encoding="utf-8"))
