"""Workload ingestion: JSONL of executed statements -> discovery table.

One JSON object per line: {"id", "sql", "exec_time_ms", "rows_returned",
"server_id", "db_version", "anomaly_alert", "ts"}. Unknown keys are carried
along as meta attributes. A statement that fails to parse keeps its row:
parse_error becomes a searchable boolean, AST-derived features are
empty/zero, and the metrics stay usable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from sqlscope.errors import IngestError
from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.sql.features import QueryFeatures, extract_features, fingerprint
from sqlscope.sql.parser import ParseError, parse_sql
from sqlscope.table import DataTable, build_table

STANDARD_KEYS = ("id", "sql", "exec_time_ms", "rows_returned", "server_id", "db_version", "anomaly_alert", "ts")


@dataclass
class QueryRecord:
    """One parsed statement's features joined with its runtime context."""

    query_id: str
    raw_sql: str
    fingerprint: str
    parse_error: bool
    features: QueryFeatures
    exec_time_ms: float  # NaN when absent
    rows_returned: float  # NaN when absent
    server_id: str | None
    db_version: str | None
    anomaly_alert: bool
    ts: str | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class WorkloadIngest:
    table: DataTable
    records: list[QueryRecord]
    skipped: list[tuple[int, str]]  # (1-based line number, reason)


def _require_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ValueError(f"field {key!r} must be a non-empty string")
    return value


def _opt_number(obj: dict, key: str) -> float:
    value = obj.get(key)
    if value is None:
        return math.nan
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"field {key!r} must be a number")
    return float(value)


def _opt_str(obj: dict, key: str) -> str | None:
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} must be a string")
    return value


def _opt_bool(obj: dict, key: str) -> bool:
    value = obj.get(key)
    if value is None:
        return False
    if not isinstance(value, bool):
        raise ValueError(f"field {key!r} must be a boolean")
    return value


def _parse_line(line: str, id_key: str) -> QueryRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    query_id = _require_str(obj, id_key)
    raw_sql = _require_str(obj, "sql")
    record = QueryRecord(
        query_id=query_id,
        raw_sql=raw_sql,
        fingerprint="",
        parse_error=False,
        features=QueryFeatures(),
        exec_time_ms=_opt_number(obj, "exec_time_ms"),
        rows_returned=_opt_number(obj, "rows_returned"),
        server_id=_opt_str(obj, "server_id"),
        db_version=_opt_str(obj, "db_version"),
        anomaly_alert=_opt_bool(obj, "anomaly_alert"),
        ts=_opt_str(obj, "ts"),
        extras={k: obj[k] for k in sorted(obj) if k not in STANDARD_KEYS and k != id_key},
    )
    try:
        statement = parse_sql(raw_sql)
    except ParseError:
        record.parse_error = True
        return record
    record.features = extract_features(statement)
    record.fingerprint = fingerprint(statement)
    return record


def ingest_workload(workload_file, id_key: str = "id", strict: bool = False) -> WorkloadIngest:
    """Read a JSONL workload into (table, records).

    ``workload_file`` is a path or an open text handle. In strict mode the
    first malformed line aborts the ingest; otherwise malformed lines are
    skipped and reported. A duplicate query id is always an error.
    """
    if hasattr(workload_file, "read"):
        lines = workload_file.read().splitlines()
    else:
        with open(workload_file, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    records: list[QueryRecord] = []
    skipped: list[tuple[int, str]] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = _parse_line(line, id_key)
        except (json.JSONDecodeError, ValueError) as exc:
            if strict:
                raise IngestError(line_no, str(exc)) from None
            skipped.append((line_no, str(exc)))
            continue
        if record.query_id in seen_ids:
            raise IngestError(line_no, f"duplicate query id {record.query_id!r}")
        seen_ids.add(record.query_id)
        records.append(record)
    return WorkloadIngest(build_workload_table(records), records, skipped)


def workload_schema(extra_meta: list[str]) -> Schema:
    """Attribute layout of an ingested workload table.

    ``tables`` sits first on purpose: canonical pattern order prefers earlier
    attributes, so table-membership selectors win exact ties against the
    derived feature columns.
    """
    attrs = [
        Attribute("tables", Kind.ITEMSET),
        Attribute("fields", Kind.ITEMSET),
        Attribute("predicate_signatures", Kind.ITEMSET),
        Attribute("join_pairs", Kind.ITEMSET),
        Attribute("functions", Kind.ITEMSET),
        Attribute("num_tables", Kind.NUMERIC),
        Attribute("num_joins", Kind.NUMERIC),
        Attribute("num_predicates", Kind.NUMERIC),
        Attribute("num_subqueries", Kind.NUMERIC),
        Attribute("sql_length", Kind.NUMERIC),
        Attribute("limit_value", Kind.NUMERIC),
        Attribute("has_select_star", Kind.BOOLEAN),
        Attribute("has_distinct", Kind.BOOLEAN),
        Attribute("has_or", Kind.BOOLEAN),
        Attribute("has_like_leading_wildcard", Kind.BOOLEAN),
        Attribute("has_order_by", Kind.BOOLEAN),
        Attribute("has_group_by", Kind.BOOLEAN),
        Attribute("parse_error", Kind.BOOLEAN),
        Attribute("server_id", Kind.NOMINAL),
        Attribute("db_version", Kind.NOMINAL),
        Attribute("anomaly_alert", Kind.BOOLEAN),
        Attribute("exec_time_ms", Kind.NUMERIC),
        Attribute("rows_returned", Kind.NUMERIC),
        Attribute("query_id", Kind.NOMINAL, Role.META),
        Attribute("raw_sql", Kind.NOMINAL, Role.META),
        Attribute("fingerprint", Kind.NOMINAL, Role.META),
        Attribute("ts", Kind.NOMINAL, Role.META),
    ]
    attrs += [Attribute(f"meta_{name}", Kind.NOMINAL, Role.META) for name in extra_meta]
    return Schema(attrs)


def build_workload_table(records: list[QueryRecord]) -> DataTable:
    extra_meta = sorted({k for r in records for k in r.extras})
    schema = workload_schema(extra_meta)
    rows = []
    for r in records:
        f = r.features
        row = [
            set(f.tables),
            set(f.fields),
            set(f.predicate_signatures),
            set(f.join_pairs),
            set(f.functions),
            float(f.num_tables),
            float(f.num_joins),
            float(f.num_predicates),
            float(f.num_subqueries),
            float(len(r.raw_sql)),
            None if f.limit_value is None else float(f.limit_value),
            f.has_select_star,
            f.has_distinct,
            f.has_or,
            f.has_like_leading_wildcard,
            f.has_order_by,
            f.has_group_by,
            r.parse_error,
            r.server_id,
            r.db_version,
            r.anomaly_alert,
            None if math.isnan(r.exec_time_ms) else r.exec_time_ms,
            None if math.isnan(r.rows_returned) else r.rows_returned,
            r.query_id,
            r.raw_sql,
            r.fingerprint,
            r.ts,
        ]
        row += [None if r.extras.get(k) is None else str(r.extras.get(k)) for k in extra_meta]
        rows.append(row)
    return build_table(schema, rows)
