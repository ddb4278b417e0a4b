"""Pattern language: selectors, conjunctive patterns, extent evaluation.

A pattern is a canonical conjunction of selectors: at most one selector per
attribute, sorted by ascending attribute index. Extents are boolean row masks
over a table. Missing numeric values never satisfy an interval selector;
missing nominal values are ordinary dictionary entries and may be selected on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sqlscope.errors import SchemaError
from sqlscope.schema import Kind, Role
from sqlscope.table import BooleanColumn, DataTable, ItemsetColumn, NominalColumn, NumericColumn

NEG_INF = float("-inf")
POS_INF = float("inf")


def format_number(x: float) -> str:
    """Render interval bounds: -inf/+inf literals, integers without a dot."""
    if x == NEG_INF:
        return "-inf"
    if x == POS_INF:
        return "+inf"
    if x == int(x):
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class NominalEquals:
    attr: str
    value: str

    def render(self) -> str:
        return f'{self.attr} = "{self.value}"'

    def params_key(self, table: DataTable) -> tuple:
        col = table.column(self.attr)
        code = col.code_of(self.value)
        return (0 if code is None else code, 0)

    def to_json(self) -> dict:
        return {"attr": self.attr, "op": "equals", "value": self.value}


@dataclass(frozen=True)
class BoolIs:
    attr: str
    truth: bool

    def render(self) -> str:
        return f"{self.attr} is {'true' if self.truth else 'false'}"

    def params_key(self, table: DataTable) -> tuple:
        return (int(self.truth), 0)

    def to_json(self) -> dict:
        return {"attr": self.attr, "op": "is", "value": self.truth}


@dataclass(frozen=True)
class NumericInterval:
    """Half-open interval [lo, hi); lo may be -inf, hi may be +inf, not both."""

    attr: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo == NEG_INF and self.hi == POS_INF:
            raise SchemaError(f"interval on {self.attr!r} may not be (-inf, +inf)")
        if not self.lo <= self.hi:
            raise SchemaError(f"interval on {self.attr!r} has lo > hi")

    def render(self) -> str:
        return f"{self.attr} in [{format_number(self.lo)}, {format_number(self.hi)})"

    def params_key(self, table: DataTable) -> tuple:
        return (self.lo, self.hi)

    def to_json(self) -> dict:
        def bound(x: float):
            return None if math.isinf(x) else x

        return {"attr": self.attr, "op": "interval", "lo": bound(self.lo), "hi": bound(self.hi)}


@dataclass(frozen=True)
class SetContains:
    attr: str
    item: str

    def render(self) -> str:
        return f'{self.attr} ∋ "{self.item}"'

    def params_key(self, table: DataTable) -> tuple:
        col = table.column(self.attr)
        code = col.code_of(self.item)
        return (0 if code is None else code, 0)

    def to_json(self) -> dict:
        return {"attr": self.attr, "op": "contains", "value": self.item}


Selector = NominalEquals | BoolIs | NumericInterval | SetContains

_SELECTOR_KINDS = {
    NominalEquals: Kind.NOMINAL,
    BoolIs: Kind.BOOLEAN,
    NumericInterval: Kind.NUMERIC,
    SetContains: Kind.ITEMSET,
}


def selector_from_json(obj: dict) -> Selector:
    op = obj.get("op")
    if op == "equals":
        return NominalEquals(obj["attr"], obj["value"])
    if op == "is":
        return BoolIs(obj["attr"], bool(obj["value"]))
    if op == "interval":
        lo = NEG_INF if obj.get("lo") is None else float(obj["lo"])
        hi = POS_INF if obj.get("hi") is None else float(obj["hi"])
        return NumericInterval(obj["attr"], lo, hi)
    if op == "contains":
        return SetContains(obj["attr"], obj["item"] if "item" in obj else obj["value"])
    raise SchemaError(f"unknown selector op: {op!r}")


def validate_selector(table: DataTable, selector: Selector) -> None:
    attr = table.attribute(selector.attr)
    if attr.role is not Role.DESCRIPTIVE:
        raise SchemaError(f"attribute {selector.attr!r} is not descriptive")
    expected = _SELECTOR_KINDS[type(selector)]
    if attr.kind is not expected:
        raise SchemaError(
            f"selector kind {expected.value} does not match attribute "
            f"{selector.attr!r} of kind {attr.kind.value}"
        )


def evaluate_selector(table: DataTable, selector: Selector) -> np.ndarray:
    """Boolean mask of the rows satisfying the selector.

    A nominal value or item absent from the column dictionary matches no rows
    (this lets patterns fitted on one table be evaluated on another).
    """
    validate_selector(table, selector)
    col = table.column(selector.attr)
    if isinstance(selector, NominalEquals):
        assert isinstance(col, NominalColumn)
        code = col.code_of(selector.value)
        if code is None:
            return np.zeros(table.row_count, dtype=bool)
        return col.codes == code
    if isinstance(selector, BoolIs):
        assert isinstance(col, BooleanColumn)
        return col.data == selector.truth
    if isinstance(selector, NumericInterval):
        assert isinstance(col, NumericColumn)
        # NaN comparisons are False, so missing numerics never match.
        with np.errstate(invalid="ignore"):
            return (col.data >= selector.lo) & (col.data < selector.hi)
    assert isinstance(col, ItemsetColumn)
    code = col.code_of(selector.item)
    if code is None:
        return np.zeros(table.row_count, dtype=bool)
    return col.item_masks[code].copy()


@dataclass(frozen=True)
class Pattern:
    """Canonical conjunction: unique attributes, ascending attribute index."""

    selectors: tuple[Selector, ...] = ()

    @staticmethod
    def root() -> "Pattern":
        return Pattern(())

    @property
    def depth(self) -> int:
        return len(self.selectors)

    def last_attr_index(self, table: DataTable) -> int:
        if not self.selectors:
            return -1
        return table.schema.index_of(self.selectors[-1].attr)

    def check_canonical(self, table: DataTable) -> None:
        indices = [table.schema.index_of(s.attr) for s in self.selectors]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise SchemaError(f"pattern not canonical: attribute order {indices}")
        for s in self.selectors:
            validate_selector(table, s)

    def extend(self, selector: Selector) -> "Pattern":
        return Pattern(self.selectors + (selector,))

    def sort_key(self, table: DataTable) -> tuple:
        """Total canonical order over patterns, used for deterministic ties."""
        return tuple(
            (table.schema.index_of(s.attr),) + s.params_key(table) for s in self.selectors
        )

    def render(self) -> str:
        if not self.selectors:
            return "<all rows>"
        return " and ".join(s.render() for s in self.selectors)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.selectors]

    @staticmethod
    def from_json(obj: list) -> "Pattern":
        return Pattern(tuple(selector_from_json(s) for s in obj))


def extent_of(table: DataTable, pattern: Pattern) -> np.ndarray:
    """Boolean mask of rows covered by the pattern; the root covers all rows."""
    pattern.check_canonical(table)
    mask = table.all_rows_mask()
    for selector in pattern.selectors:
        mask &= evaluate_selector(table, selector)
    return mask


def jaccard(a: np.ndarray, b: np.ndarray) -> float:
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union
