"""Canonical refinement: discretization grids and one-selector extensions.

Numeric attributes are discretized once per job into an equal-frequency cut
grid; the candidate selectors for an attribute are fixed from the start.
Refinement extends a pattern only with attributes of strictly higher index
than its last selector, which makes iterated refinement enumerate every
canonical pattern exactly once.
"""

from __future__ import annotations

from itertools import combinations
from typing import TYPE_CHECKING, Iterator

import numpy as np

from sqlscope.errors import MeasureError
from sqlscope.patterns import (
    NEG_INF,
    POS_INF,
    BoolIs,
    NominalEquals,
    NumericInterval,
    Pattern,
    Selector,
    SetContains,
    evaluate_selector,
)
from sqlscope.schema import Kind
from sqlscope.table import DataTable, NumericColumn

if TYPE_CHECKING:
    from sqlscope.search import SearchConfig


def cutpoints(table: DataTable, attr: str, bins: int) -> list[float]:
    """Equal-frequency cut values for a numeric attribute.

    Cut i (1-based, i < bins) is the first value of the (i+1)-th
    equal-frequency bin: the sorted non-missing value at 0-based index
    ceil(i*n/bins). Cuts equal to the minimum are useless (they select
    nothing below and everything at-or-above) and are dropped, as are
    duplicates, so a constant column yields no cuts.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    col = table.column(attr)
    if not isinstance(col, NumericColumn):
        raise MeasureError(f"attribute {attr!r} is not numeric")
    values = np.sort(col.data[~np.isnan(col.data)])
    n = len(values)
    if n == 0:
        raise MeasureError(f"attribute {attr!r} has no non-missing values")
    cuts: list[float] = []
    lowest = float(values[0])
    for i in range(1, bins):
        idx = min((i * n + bins - 1) // bins, n - 1)
        cut = float(values[idx])
        if cut > lowest and (not cuts or cut > cuts[-1]):
            cuts.append(cut)
    return cuts


def interval_selectors(attr: str, cuts: list[float]) -> list[NumericInterval]:
    """Grid intervals, canonically ordered by (lo, hi): (-inf, c), [c_i, c_j), [c, +inf)."""
    sels = [NumericInterval(attr, NEG_INF, c) for c in cuts]
    sels += [NumericInterval(attr, lo, hi) for lo, hi in combinations(cuts, 2)]
    sels += [NumericInterval(attr, c, POS_INF) for c in cuts]
    return sorted(sels, key=lambda s: (s.lo, s.hi))


class RefinementEngine:
    """Per-job candidate enumeration with precomputed selector masks.

    The selector universe (and every selector's extent mask) is computed once
    from the table and config, so refinement inside a search is a cheap mask
    intersection. The engine is read-only after construction.
    """

    def __init__(self, table: DataTable, config: "SearchConfig"):
        self.table = table
        self.config = config
        self.min_support = config.resolve_min_support(table.row_count)
        excluded = set(config.exclude_attrs)
        self._by_attr: list[list[tuple[Selector, np.ndarray]]] = []
        for idx, attr in enumerate(table.schema):
            sels: list[Selector] = []
            if attr.role.value == "descriptive" and attr.name not in excluded:
                col = table.columns[idx]
                if attr.kind is Kind.NOMINAL:
                    sels = [NominalEquals(attr.name, v) for v in col.values]
                elif attr.kind is Kind.BOOLEAN:
                    sels = [BoolIs(attr.name, False), BoolIs(attr.name, True)]
                elif attr.kind is Kind.ITEMSET:
                    sels = [SetContains(attr.name, item) for item in col.items]
                else:
                    try:
                        cuts = cutpoints(table, attr.name, config.numeric_bins)
                    except MeasureError:
                        cuts = []  # all-missing column yields no numeric selectors
                    sels = interval_selectors(attr.name, cuts)
            self._by_attr.append([(s, evaluate_selector(table, s)) for s in sels])

    def branching(self) -> int:
        return sum(len(sels) for sels in self._by_attr)

    def selectors_for(self, attr_index: int) -> list[tuple[Selector, np.ndarray]]:
        """Candidate (selector, extent mask) pairs for one attribute."""
        return self._by_attr[attr_index]

    def children(
        self, pattern: Pattern, mask: np.ndarray
    ) -> Iterator[tuple[Pattern, np.ndarray]]:
        """Canonical extensions of ``pattern`` with support >= min_support."""
        start = self.table.schema.index_of(pattern.selectors[-1].attr) + 1 if pattern.selectors else 0
        for attr_idx in range(start, len(self._by_attr)):
            for selector, sel_mask in self._by_attr[attr_idx]:
                child_mask = mask & sel_mask
                if int(np.count_nonzero(child_mask)) >= self.min_support:
                    yield pattern.extend(selector), child_mask


def refinements(table: DataTable, pattern: Pattern, config: "SearchConfig") -> list[Pattern]:
    """All canonical one-selector extensions of ``pattern`` meeting min support."""
    pattern.check_canonical(table)
    engine = RefinementEngine(table, config)
    mask = table.all_rows_mask()
    for selector in pattern.selectors:
        mask &= evaluate_selector(table, selector)
    return [child for child, _ in engine.children(pattern, mask)]
