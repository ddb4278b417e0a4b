"""Immutable column-oriented data table.

Columns are numpy-backed per kind: nominal columns hold integer codes into a
first-seen-order dictionary, numeric columns are float64 with NaN as the
missing marker, boolean columns are plain bool arrays, and itemset columns
hold a frozenset of dictionary codes per row plus a precomputed membership
mask per item. Tables never mutate after construction, so they are safe to
share across concurrent readers.
"""

from __future__ import annotations

import math
import numbers
from typing import Iterable, Sequence

import numpy as np

from sqlscope.errors import KindMismatchError, SchemaError
from sqlscope.schema import MISSING_NOMINAL, Attribute, Kind, Role, Schema


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class NominalColumn:
    """Integer codes into a value dictionary built in first-seen order."""

    kind = Kind.NOMINAL

    def __init__(self, codes: np.ndarray, values: tuple[str, ...]):
        self.codes = _frozen(np.asarray(codes, dtype=np.int32))
        self.values = values
        self._code_of = {v: i for i, v in enumerate(values)}

    def code_of(self, value: str) -> int | None:
        return self._code_of.get(value)

    def value_at(self, row: int) -> str:
        return self.values[self.codes[row]]

    def cell(self, row: int) -> str:
        return self.value_at(row)


class NumericColumn:
    kind = Kind.NUMERIC

    def __init__(self, data: np.ndarray):
        self.data = _frozen(np.asarray(data, dtype=np.float64))

    def cell(self, row: int) -> float:
        return float(self.data[row])


class BooleanColumn:
    kind = Kind.BOOLEAN

    def __init__(self, data: np.ndarray):
        self.data = _frozen(np.asarray(data, dtype=bool))

    def cell(self, row: int) -> bool:
        return bool(self.data[row])


class ItemsetColumn:
    """Per-row frozensets of item codes, with a boolean mask per item."""

    kind = Kind.ITEMSET

    def __init__(self, rows: tuple[frozenset[int], ...], items: tuple[str, ...]):
        self.rows = rows
        self.items = items
        self._code_of = {v: i for i, v in enumerate(items)}
        masks = np.zeros((len(items), len(rows)), dtype=bool)
        for r, cell in enumerate(rows):
            for code in cell:
                masks[code, r] = True
        self.item_masks = _frozen(masks)

    def code_of(self, item: str) -> int | None:
        return self._code_of.get(item)

    def cell(self, row: int) -> frozenset[str]:
        return frozenset(self.items[c] for c in self.rows[row])


Column = NominalColumn | NumericColumn | BooleanColumn | ItemsetColumn


class DataTable:
    """Immutable typed table; one designated target per discovery job."""

    def __init__(self, schema: Schema, columns: Sequence[Column], row_count: int):
        if len(columns) != len(schema):
            raise SchemaError("column count does not match schema")
        self.schema = schema
        self.columns = tuple(columns)
        self.row_count = int(row_count)

    def __len__(self) -> int:
        return self.row_count

    def column(self, name: str) -> Column:
        return self.columns[self.schema.index_of(name)]

    def attribute(self, name: str) -> Attribute:
        return self.schema.attribute(name)

    @property
    def target_name(self) -> str | None:
        t = self.schema.target
        return t.name if t else None

    def all_rows_mask(self) -> np.ndarray:
        return np.ones(self.row_count, dtype=bool)

    def with_target(self, name: str) -> "DataTable":
        """Same columns, with ``name`` re-roled as the sole target."""
        return DataTable(self.schema.with_target(name), self.columns, self.row_count)

    def select_rows(self, rows: np.ndarray | Sequence[int]) -> "DataTable":
        """Materialize a row subset, preserving schema and dictionaries."""
        idx = np.asarray(rows)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        cols: list[Column] = []
        for col in self.columns:
            if isinstance(col, NominalColumn):
                cols.append(NominalColumn(col.codes[idx], col.values))
            elif isinstance(col, NumericColumn):
                cols.append(NumericColumn(col.data[idx]))
            elif isinstance(col, BooleanColumn):
                cols.append(BooleanColumn(col.data[idx]))
            else:
                cols.append(ItemsetColumn(tuple(col.rows[i] for i in idx), col.items))
        return DataTable(self.schema, cols, len(idx))

    def row_values(self, row: int) -> dict[str, object]:
        """One row as a plain dict (nominal as strings, itemsets as sorted lists)."""
        out: dict[str, object] = {}
        for attr, col in zip(self.schema, self.columns):
            v = col.cell(row)
            if isinstance(v, frozenset):
                out[attr.name] = sorted(v)
            elif isinstance(v, float) and math.isnan(v):
                out[attr.name] = None
            else:
                out[attr.name] = v
        return out


def _build_nominal(name: str, cells: list, positions: list[int]) -> NominalColumn:
    values: list[str] = []
    code_of: dict[str, int] = {}
    codes = np.empty(len(cells), dtype=np.int32)
    for i, cell in enumerate(cells):
        if cell is None:
            cell = MISSING_NOMINAL
        if not isinstance(cell, str):
            raise KindMismatchError(positions[i], name, f"expected a string, got {cell!r}")
        code = code_of.get(cell)
        if code is None:
            code = len(values)
            code_of[cell] = code
            values.append(cell)
        codes[i] = code
    return NominalColumn(codes, tuple(values))


def _build_numeric(name: str, cells: list, positions: list[int]) -> NumericColumn:
    data = np.empty(len(cells), dtype=np.float64)
    for i, cell in enumerate(cells):
        if cell is None:
            data[i] = np.nan
        elif isinstance(cell, numbers.Real) and not isinstance(cell, bool):
            data[i] = float(cell)
        else:
            raise KindMismatchError(positions[i], name, f"expected a number, got {cell!r}")
    return NumericColumn(data)


def _build_boolean(name: str, cells: list, positions: list[int]) -> BooleanColumn:
    data = np.empty(len(cells), dtype=bool)
    for i, cell in enumerate(cells):
        if not isinstance(cell, bool):
            raise KindMismatchError(positions[i], name, f"expected a boolean, got {cell!r}")
        data[i] = cell
    return BooleanColumn(data)


def _build_itemset(name: str, cells: list, positions: list[int]) -> ItemsetColumn:
    items: list[str] = []
    code_of: dict[str, int] = {}
    rows: list[frozenset[int]] = []
    for i, cell in enumerate(cells):
        if not isinstance(cell, (set, frozenset, list, tuple)):
            raise KindMismatchError(positions[i], name, f"expected a set of items, got {cell!r}")
        codes = set()
        # Iterate in sorted order so dictionary order is deterministic even
        # when callers pass unordered sets.
        for item in sorted(cell):
            if not isinstance(item, str):
                raise KindMismatchError(positions[i], name, f"expected string items, got {item!r}")
            code = code_of.get(item)
            if code is None:
                code = len(items)
                code_of[item] = code
                items.append(item)
            codes.add(code)
        rows.append(frozenset(codes))
    return ItemsetColumn(tuple(rows), tuple(items))


_BUILDERS = {
    Kind.NOMINAL: _build_nominal,
    Kind.NUMERIC: _build_numeric,
    Kind.BOOLEAN: _build_boolean,
    Kind.ITEMSET: _build_itemset,
}


def build_table(schema: Schema | Iterable[Attribute], rows: Iterable[Sequence]) -> DataTable:
    """Build an immutable table from per-attribute cell values, row by row.

    Nominal and itemset dictionaries are built in first-seen order. A row of
    the wrong arity or a cell of the wrong kind is rejected with its row index
    and attribute name.
    """
    if not isinstance(schema, Schema):
        schema = Schema(list(schema))
    rows = list(rows)
    n_attrs = len(schema)
    for r, row in enumerate(rows):
        if len(row) != n_attrs:
            raise KindMismatchError(r, "<row>", f"expected {n_attrs} cells, got {len(row)}")
    positions = list(range(len(rows)))
    columns: list[Column] = []
    for j, attr in enumerate(schema):
        cells = [row[j] for row in rows]
        columns.append(_BUILDERS[attr.kind](attr.name, cells, positions))
    return DataTable(schema, columns, len(rows))


def columns_to_rows(named_columns: dict[str, list]) -> list[list]:
    """Transpose a dict of equal-length columns into row lists (test helper)."""
    lengths = {len(v) for v in named_columns.values()}
    if len(lengths) > 1:
        raise SchemaError(f"columns have differing lengths: {sorted(lengths)}")
    n = lengths.pop() if lengths else 0
    names = list(named_columns)
    return [[named_columns[name][i] for name in names] for i in range(n)]
