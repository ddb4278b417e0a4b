"""Seeded synthetic data: a SQL workload with one slow query family, and a
prediction table with planted rule structure.

Both generators are deterministic given their seed and double as the oracle
for recovery checks: the workload knows which rows are slow, the prediction
table knows its planted extents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from sqlscope.schema import Attribute, Kind, Schema
from sqlscope.table import DataTable, build_table

_OTHER_TABLES = ("customers", "items", "shipments", "invoices", "users", "products", "audit_log")
_SECOND_TABLES = ("items", "shipments", "invoices")
_SERVERS = ("s1", "s2", "s3", "s4")
_DB_VERSIONS = ("9.6", "11.2")
_STATUSES = ("open", "held", "shipped", "billed", "closed")


def _slow_sql(rng: np.random.Generator) -> str:
    """A query over the orders table, always filtering orders.status."""
    status = _STATUSES[rng.integers(0, len(_STATUSES))]
    shape = rng.integers(0, 4)
    if shape == 0:
        return f"SELECT * FROM orders WHERE status = '{status}'"
    if shape == 1:
        return (
            f"SELECT id, total FROM orders WHERE status = '{status}' "
            f"AND total > {int(rng.integers(10, 500))} ORDER BY total DESC"
        )
    if shape == 2:
        second = _SECOND_TABLES[rng.integers(0, len(_SECOND_TABLES))]
        return (
            f"SELECT o.id, count(*) FROM orders o JOIN {second} x ON o.id = x.order_id "
            f"WHERE o.status = '{status}' GROUP BY o.id"
        )
    return (
        f"SELECT id FROM orders WHERE status = '{status}' "
        f"AND created_at > DATE '2021-0{int(rng.integers(1, 10))}-01' LIMIT {int(rng.integers(5, 100))}"
    )


def _fast_sql(rng: np.random.Generator) -> str:
    """A query that never references the orders table."""
    table = _OTHER_TABLES[rng.integers(0, len(_OTHER_TABLES))]
    shape = rng.integers(0, 5)
    if shape == 0:
        return f"SELECT * FROM {table} LIMIT {int(rng.integers(1, 50))}"
    if shape == 1:
        return f"SELECT id, name FROM {table} WHERE id = {int(rng.integers(1, 10000))}"
    if shape == 2:
        return (
            f"SELECT count(*) FROM {table} WHERE region IN ('eu', 'us') "
            f"GROUP BY region HAVING count(*) > {int(rng.integers(1, 20))}"
        )
    if shape == 3:
        other = _OTHER_TABLES[rng.integers(0, len(_OTHER_TABLES))]
        if other == table:
            other = "users"
        return (
            f"SELECT a.id FROM {table} a LEFT JOIN {other} b ON a.id = b.ref_id "
            f"WHERE b.name LIKE '%{'xyz'[rng.integers(0, 3)]}%'"
        )
    return f"UPDATE {table} SET touched_at = ? WHERE id = {int(rng.integers(1, 10000))}"


@dataclass
class WorkloadInfo:
    n_queries: int
    slow_ids: set[str]  # query ids drawn from the slow family


def generate_workload(path, n_queries: int = 5000, seed: int = 2021, slow_fraction: float = 0.2) -> WorkloadInfo:
    """Write a JSONL workload where queries touching the orders table (always
    with an ``orders.status =`` predicate) draw exec_time ~ N(500, 50) and all
    others draw N(50, 10), both truncated at 1."""
    rng = np.random.default_rng(seed)
    slow_ids: set[str] = set()
    lines = []
    for i in range(n_queries):
        slow = rng.random() < slow_fraction
        sql = _slow_sql(rng) if slow else _fast_sql(rng)
        mean, sd = (500.0, 50.0) if slow else (50.0, 10.0)
        exec_time = max(1.0, float(rng.normal(mean, sd)))
        alert = bool(exec_time > 250.0) if rng.random() > 0.02 else bool(rng.integers(0, 2))
        obj = {
            "id": f"q{i:05d}",
            "sql": sql,
            "exec_time_ms": round(exec_time, 3),
            "rows_returned": int(rng.integers(0, 2000)),
            "server_id": _SERVERS[rng.integers(0, len(_SERVERS))],
            "db_version": _DB_VERSIONS[rng.integers(0, len(_DB_VERSIONS))],
            "anomaly_alert": alert,
            "ts": f"2021-06-{int(rng.integers(1, 29)):02d}T{int(rng.integers(0, 24)):02d}:00:00Z",
        }
        if slow:
            slow_ids.add(obj["id"])
        lines.append(json.dumps(obj))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return WorkloadInfo(n_queries=n_queries, slow_ids=slow_ids)


_SERVICES = ("auth", "billing", "search", "etl")
_REGIONS = ("eu", "us", "apac")
_VERSIONS = ("v8", "v9", "v10")
_TEAMS = ("team_auth", "team_eu", "team_v9", "team_rest")
_TAGS = ("io", "cpu", "net", "db")


@dataclass
class PlantedSummary:
    table: DataTable
    predictions: list[str]
    planted_extents: list[set[int]]  # one row-id set per planted pattern
    noise_rows: set[int]


def generate_planted_predictions(n_rows: int = 1000, seed: int = 7, noise: float = 0.05) -> PlantedSummary:
    """Plant three disjoint patterns that determine the predicted label.

    Group 0: service = auth       -> team_auth
    Group 1: region = eu          -> team_eu
    Group 2: db_version = v9      -> team_v9
    Group 3: everything else      -> team_rest
    The generator keeps the groups disjoint by construction (an auth row is
    never in region eu, and so on). Exactly floor(noise * n) rows get their
    label flipped to a different team. The default group is the largest so the
    residual majority stays team_rest throughout the greedy covering; each
    planted group then carries a positive fidelity gain until recovered.
    """
    rng = np.random.default_rng(seed)
    rows = []
    labels: list[str] = []
    extents: list[set[int]] = [set(), set(), set()]
    for r in range(n_rows):
        group = int(rng.choice([0, 1, 2, 3], p=[0.2, 0.2, 0.2, 0.4]))
        service = "auth" if group == 0 else str(rng.choice(["billing", "search", "etl"]))
        region = "eu" if group == 1 else str(rng.choice(["us", "apac"]))
        version = "v9" if group == 2 else str(rng.choice(["v8", "v10"]))
        latency = float(np.round(rng.gamma(2.0, 30.0), 2))
        error_count = float(rng.integers(0, 20))
        cache_hit = bool(rng.integers(0, 2))
        n_tags = int(rng.integers(0, 3))
        tags = set(rng.choice(_TAGS, size=n_tags, replace=False)) if n_tags else set()
        rows.append([service, region, version, latency, error_count, cache_hit, tags])
        labels.append(_TEAMS[group])
        if group < 3:
            extents[group].add(r)

    n_flips = math.floor(noise * n_rows)
    noise_rows = set(rng.choice(n_rows, size=n_flips, replace=False).tolist())
    for r in noise_rows:
        others = [t for t in _TEAMS if t != labels[r]]
        labels[r] = str(rng.choice(others))

    schema = Schema(
        [
            Attribute("service", Kind.NOMINAL),
            Attribute("region", Kind.NOMINAL),
            Attribute("db_version", Kind.NOMINAL),
            Attribute("latency", Kind.NUMERIC),
            Attribute("error_count", Kind.NUMERIC),
            Attribute("cache_hit", Kind.BOOLEAN),
            Attribute("tags", Kind.ITEMSET),
        ]
    )
    return PlantedSummary(build_table(schema, rows), labels, extents, noise_rows)
