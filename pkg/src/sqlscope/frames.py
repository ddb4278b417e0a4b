"""Input validation helpers: pandas frames -> typed tables.

Kind inference per column dtype: bool -> boolean, numeric -> numeric,
sets/lists/tuples -> itemset, strings/categories -> nominal. Inference is
recorded at fit time so the same conversion applies to later data.
"""

from __future__ import annotations

import numbers

import numpy as np
import pandas as pd

from sqlscope.errors import SchemaError
from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.table import DataTable, build_table


def infer_kind(series: pd.Series) -> Kind:
    if pd.api.types.is_bool_dtype(series):
        return Kind.BOOLEAN
    if pd.api.types.is_numeric_dtype(series):
        return Kind.NUMERIC
    values = [v for v in series if v is not None and not (isinstance(v, float) and np.isnan(v))]
    if values and all(isinstance(v, (set, frozenset, list, tuple)) for v in values):
        return Kind.ITEMSET
    return Kind.NOMINAL


def infer_kinds(X: pd.DataFrame) -> dict[str, Kind]:
    return {str(name): infer_kind(X[name]) for name in X.columns}


def _coerce(kind: Kind, value):
    if value is None:
        return None
    if kind is Kind.NUMERIC:
        if isinstance(value, numbers.Real) and not isinstance(value, bool):
            value = float(value)
            return None if np.isnan(value) else value
        raise SchemaError(f"expected a number, got {value!r}")
    if isinstance(value, float) and np.isnan(value):
        return None if kind is Kind.NOMINAL else set()
    if kind is Kind.BOOLEAN:
        return bool(value)
    if kind is Kind.ITEMSET:
        return {str(v) for v in value}
    return str(value)


def table_from_frame(
    X: pd.DataFrame,
    y=None,
    kinds: dict[str, Kind] | None = None,
    target_name: str = "target",
) -> DataTable:
    """Build a DataTable from a frame, optionally appending a target column."""
    if not isinstance(X, pd.DataFrame):
        X = pd.DataFrame(X)
    if kinds is None:
        kinds = infer_kinds(X)
    missing = [c for c in map(str, X.columns) if c not in kinds]
    if missing:
        raise SchemaError(f"columns not seen at fit time: {missing}")
    attrs = [Attribute(name, kinds[name]) for name in map(str, X.columns)]
    columns = [X[name].tolist() for name in X.columns]
    if y is not None:
        y = pd.Series(y).tolist()
        if len(y) != len(X):
            raise SchemaError(f"target length {len(y)} does not match {len(X)} rows")
        target_kind = infer_kind(pd.Series(y))
        if target_kind is Kind.ITEMSET:
            raise SchemaError("target may not be set-valued")
        attrs.append(Attribute(target_name, target_kind, Role.TARGET))
        columns.append(y)
    rows = [
        [_coerce(attr.kind, col[i]) for attr, col in zip(attrs, columns)]
        for i in range(len(X))
    ]
    return build_table(Schema(attrs), rows)
