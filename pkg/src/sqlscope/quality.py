"""Interestingness measures over (table, extent, target), with pruning bounds.

Every measure scores an extent mask against a bound target column. Measures
expose an admissible optimistic estimate: an upper bound on the quality of
every sub-extent, which exact search uses to prune. Measures without a
useful bound return +inf (no pruning). All scores use a generality exponent
``a`` weighting extent size as (n_s/N)^a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sqlscope.errors import MeasureError, MeasureUndefinedError
from sqlscope.schema import Kind
from sqlscope.table import BooleanColumn, DataTable, NominalColumn, NumericColumn

MEASURE_KINDS = ("wracc", "mean_shift", "ks_deviation", "tv_emm", "fidelity_gain")
DIRECTIONS = ("high", "low", "two_sided")


@dataclass(frozen=True)
class QualityMeasureSpec:
    """User-facing measure selection, as it appears in job configs."""

    kind: str
    a: float = 1.0
    direction: str = "high"
    positive_class: str | None = None

    def validate(self) -> list[str]:
        errors = []
        if self.kind not in MEASURE_KINDS:
            errors.append(f"unknown measure kind {self.kind!r}; valid kinds: {', '.join(MEASURE_KINDS)}")
        if not 0.0 <= self.a <= 1.0:
            errors.append(f"generality exponent a must be in [0, 1], got {self.a}")
        if self.direction not in DIRECTIONS:
            errors.append(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        return errors

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "a": self.a}
        if self.kind == "mean_shift":
            out["direction"] = self.direction
        if self.positive_class is not None:
            out["positive_class"] = self.positive_class
        return out

    @staticmethod
    def from_json(obj: dict) -> "QualityMeasureSpec":
        return QualityMeasureSpec(
            kind=obj.get("kind", ""),
            a=float(obj.get("a", 1.0)),
            direction=obj.get("direction", "high"),
            positive_class=obj.get("positive_class"),
        )


class Measure:
    """A measure bound to one table and target; pure and thread-safe."""

    spec: QualityMeasureSpec

    def quality(self, mask: np.ndarray) -> float:
        raise NotImplementedError

    def optimistic_estimate(self, mask: np.ndarray) -> float:
        return float("inf")

    def safe_quality(self, mask: np.ndarray) -> tuple[float, bool]:
        """Quality, or (0, False) where the measure is undefined on the extent."""
        try:
            return self.quality(mask), True
        except MeasureUndefinedError:
            return 0.0, False


class WraccMeasure(Measure):
    """(n_s/N)^a * (p_s - p_0) for a binary target."""

    def __init__(self, spec: QualityMeasureSpec, table: DataTable, target: str):
        if table.row_count == 0:
            raise MeasureError("wracc is undefined on an empty table")
        attr = table.attribute(target)
        col = table.column(target)
        if attr.kind is Kind.BOOLEAN:
            assert isinstance(col, BooleanColumn)
            self.positives = col.data.copy()
        elif attr.kind is Kind.NOMINAL:
            assert isinstance(col, NominalColumn)
            if spec.positive_class is None:
                raise MeasureError("wracc on a nominal target requires positive_class")
            code = col.code_of(spec.positive_class)
            if code is None:
                raise MeasureError(
                    f"positive_class {spec.positive_class!r} not among target values"
                )
            # Designating a positive class binarizes the target (one vs rest).
            self.positives = col.codes == code
        else:
            raise MeasureError("wracc requires a boolean or binary nominal target")
        self.spec = spec
        self.n_total = table.row_count
        self.p0 = float(np.count_nonzero(self.positives)) / self.n_total

    def quality(self, mask: np.ndarray) -> float:
        n_s = int(np.count_nonzero(mask))
        if n_s == 0:
            return 0.0
        p_s = int(np.count_nonzero(self.positives & mask)) / n_s
        return (n_s / self.n_total) ** self.spec.a * (p_s - self.p0)

    def optimistic_estimate(self, mask: np.ndarray) -> float:
        # Keep only positives: quality of any sub-extent with m positives and
        # nothing else is (m/N)^a * (1 - p0), increasing in m.
        pos_s = int(np.count_nonzero(self.positives & mask))
        if pos_s == 0:
            return 0.0
        return (pos_s / self.n_total) ** self.spec.a * (1.0 - self.p0)


class MeanShiftMeasure(Measure):
    """(n_s/N)^a * (mu_s - mu_0) over non-missing target values.

    Rows with a missing target are invisible to this measure: they count
    neither toward the means nor toward the size factor.
    """

    def __init__(self, spec: QualityMeasureSpec, table: DataTable, target: str):
        if table.row_count == 0:
            raise MeasureError("mean_shift is undefined on an empty table")
        col = table.column(target)
        if not isinstance(col, NumericColumn):
            raise MeasureError("mean_shift requires a numeric target")
        self.present = ~np.isnan(col.data)
        self.values = col.data
        self.n_total = int(np.count_nonzero(self.present))
        if self.n_total == 0:
            raise MeasureError(f"target {target!r} has no non-missing values")
        self.mu0 = float(self.values[self.present].mean())
        self.spec = spec

    def _directed(self, shift: float) -> float:
        if self.spec.direction == "low":
            return -shift
        if self.spec.direction == "two_sided":
            return abs(shift)
        return shift

    def quality(self, mask: np.ndarray) -> float:
        sel = mask & self.present
        n_s = int(np.count_nonzero(sel))
        if n_s == 0:
            return 0.0
        shift = float(self.values[sel].mean()) - self.mu0
        return (n_s / self.n_total) ** self.spec.a * self._directed(shift)

    def _one_sided_bound(self, values: np.ndarray, sign: float) -> float:
        # Best sub-extent keeps the m most extreme values; scan all prefixes
        # of the sorted extent.
        ordered = np.sort(sign * values)[::-1]
        if len(ordered) == 0:
            return 0.0
        prefix_means = np.cumsum(ordered) / np.arange(1, len(ordered) + 1)
        m = np.arange(1, len(ordered) + 1)
        bounds = (m / self.n_total) ** self.spec.a * (prefix_means - sign * self.mu0)
        return max(0.0, float(bounds.max()))

    def optimistic_estimate(self, mask: np.ndarray) -> float:
        values = self.values[mask & self.present]
        if self.spec.direction == "high":
            return self._one_sided_bound(values, 1.0)
        if self.spec.direction == "low":
            return self._one_sided_bound(values, -1.0)
        return max(self._one_sided_bound(values, 1.0), self._one_sided_bound(values, -1.0))


class KsDeviationMeasure(Measure):
    """Two-sample Kolmogorov-Smirnov distance, extent vs complement."""

    def __init__(self, spec: QualityMeasureSpec, table: DataTable, target: str):
        col = table.column(target)
        if not isinstance(col, NumericColumn):
            raise MeasureError("ks_deviation requires a numeric target")
        self.present = ~np.isnan(col.data)
        if not self.present.any():
            raise MeasureError(f"target {target!r} has no non-missing values")
        self.values = col.data
        self.spec = spec

    def quality(self, mask: np.ndarray) -> float:
        inside = np.sort(self.values[mask & self.present])
        outside = np.sort(self.values[~mask & self.present])
        if len(inside) == 0 or len(outside) == 0:
            raise MeasureUndefinedError("ks_deviation needs a non-empty extent and complement")
        support = np.concatenate([inside, outside])
        ecdf_in = np.searchsorted(inside, support, side="right") / len(inside)
        ecdf_out = np.searchsorted(outside, support, side="right") / len(outside)
        return float(np.abs(ecdf_in - ecdf_out).max())


class TvEmmMeasure(Measure):
    """(n_s/N)^a * total variation between extent and global class mix."""

    def __init__(self, spec: QualityMeasureSpec, table: DataTable, target: str):
        if table.row_count == 0:
            raise MeasureError("tv_emm is undefined on an empty table")
        col = table.column(target)
        if not isinstance(col, NominalColumn):
            raise MeasureError("tv_emm requires a nominal target")
        self.codes = col.codes
        self.n_classes = len(col.values)
        self.n_total = table.row_count
        self.global_dist = np.bincount(self.codes, minlength=self.n_classes) / self.n_total
        self.spec = spec

    def quality(self, mask: np.ndarray) -> float:
        n_s = int(np.count_nonzero(mask))
        if n_s == 0:
            return 0.0
        local = np.bincount(self.codes[mask], minlength=self.n_classes) / n_s
        tv = 0.5 * float(np.abs(local - self.global_dist).sum())
        return (n_s / self.n_total) ** self.spec.a * tv


def build_measure(spec: QualityMeasureSpec, table: DataTable, target: str | None = None) -> Measure:
    """Bind a measure spec to a table's target attribute."""
    errors = spec.validate()
    if errors:
        raise MeasureError("; ".join(errors))
    if target is None:
        target = table.target_name
    if target is None:
        raise MeasureError("table has no target attribute")
    if spec.kind == "wracc":
        return WraccMeasure(spec, table, target)
    if spec.kind == "mean_shift":
        return MeanShiftMeasure(spec, table, target)
    if spec.kind == "ks_deviation":
        return KsDeviationMeasure(spec, table, target)
    if spec.kind == "tv_emm":
        return TvEmmMeasure(spec, table, target)
    raise MeasureError(f"measure kind {spec.kind!r} is not creatable here")
