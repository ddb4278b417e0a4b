"""Exact and heuristic subgroup search with redundancy-aware top-k selection.

Exhaustive search walks the canonical refinement tree depth-first and prunes
a branch when its optimistic estimate falls below the current k-th best
quality; with an admissible estimate this returns the exact top k. Beam
search is level-wise: each level keeps the best ``beam_width`` refinements of
the previous level, and the result is the top k over every candidate scored.
Everything is deterministic: ties break by (quality desc, depth asc,
canonical pattern order asc) and there is no randomness anywhere.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from sqlscope.errors import ConfigError
from sqlscope.patterns import Pattern, jaccard
from sqlscope.quality import Measure, QualityMeasureSpec, build_measure
from sqlscope.refine import RefinementEngine
from sqlscope.schema import Kind
from sqlscope.table import BooleanColumn, DataTable, NominalColumn, NumericColumn

STRATEGIES = ("exhaustive", "beam")


@dataclass(frozen=True)
class SearchConfig:
    """Search knobs; hashable so results can carry provenance.

    ``beam_width=None`` means unbounded (every candidate kept per level).
    ``min_support=None`` resolves to max(5, row_count // 100) at run time.
    """

    strategy: str = "beam"
    max_depth: int = 3
    beam_width: int | None = 50
    min_support: int | None = None
    top_k: int = 20
    diversity_jaccard: float = 0.8
    numeric_bins: int = 6
    exclude_attrs: frozenset[str] = field(default_factory=frozenset)
    use_optimistic_pruning: bool = True

    def validate(self) -> list[str]:
        errors = []
        if self.strategy not in STRATEGIES:
            errors.append(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.max_depth < 1:
            errors.append(f"max_depth must be >= 1, got {self.max_depth}")
        if self.beam_width is not None and self.beam_width < 1:
            errors.append(f"beam_width must be >= 1 or null (unbounded), got {self.beam_width}")
        if self.min_support is not None and self.min_support < 0:
            errors.append(f"min_support must be >= 0, got {self.min_support}")
        if self.top_k < 1:
            errors.append(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 < self.diversity_jaccard <= 1.0:
            errors.append(f"diversity_jaccard must be in (0, 1], got {self.diversity_jaccard}")
        if self.numeric_bins < 2:
            errors.append(f"numeric_bins must be >= 2, got {self.numeric_bins}")
        return errors

    def resolve_min_support(self, row_count: int) -> int:
        if self.min_support is not None:
            return self.min_support
        return max(5, row_count // 100)

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "max_depth": self.max_depth,
            "beam_width": self.beam_width,
            "min_support": self.min_support,
            "top_k": self.top_k,
            "diversity_jaccard": self.diversity_jaccard,
            "numeric_bins": self.numeric_bins,
            "exclude_attrs": sorted(self.exclude_attrs),
            "use_optimistic_pruning": self.use_optimistic_pruning,
        }

    @staticmethod
    def from_json(obj: dict) -> "SearchConfig":
        known = {
            "strategy", "max_depth", "beam_width", "min_support", "top_k",
            "diversity_jaccard", "numeric_bins", "exclude_attrs", "use_optimistic_pruning",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError([f"unknown search option {k!r}" for k in sorted(unknown)])
        kwargs = dict(obj)
        if "exclude_attrs" in kwargs:
            kwargs["exclude_attrs"] = frozenset(kwargs["exclude_attrs"])
        return SearchConfig(**kwargs)


class Subgroup:
    """Pattern + extent + statistics + quality, the unit of a result."""

    def __init__(
        self,
        pattern: Pattern,
        mask: np.ndarray,
        quality: float,
        optimistic_estimate: float,
        target_stats: dict,
    ):
        self.pattern = pattern
        self.mask = mask
        self.size = int(np.count_nonzero(mask))
        self.quality = quality
        self.optimistic_estimate = optimistic_estimate
        self.target_stats = target_stats

    def row_ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def to_json(self) -> dict:
        oe = self.optimistic_estimate
        return {
            "selectors": [s.render() for s in self.pattern.selectors],
            "selector_json": self.pattern.to_json(),
            "size": self.size,
            "quality": self.quality,
            "oe": None if math.isinf(oe) else oe,
            "stats": self.target_stats,
        }


@dataclass
class ResultSet:
    """Quality-descending subgroups plus job provenance."""

    subgroups: list[Subgroup]
    dataset_id: str
    config_hash: str
    measure_spec: QualityMeasureSpec
    config: SearchConfig
    wall_time: float = 0.0
    nodes_explored: int = 0

    def key_pairs(self) -> list[tuple[tuple, float]]:
        """(rendered pattern, quality) pairs, for result-set comparisons."""
        return [(tuple(s.render() for s in g.pattern.selectors), g.quality) for g in self.subgroups]

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "config_hash": self.config_hash,
            "measure": self.measure_spec.to_json(),
            "search": self.config.to_json(),
            "wall_time": self.wall_time,
            "nodes_explored": self.nodes_explored,
            "subgroups": [g.to_json() for g in self.subgroups],
        }


def target_stats(table: DataTable, mask: np.ndarray) -> dict:
    """Per-target summary of an extent; recomputable from table + extent."""
    name = table.target_name
    if name is None:
        return {}
    col = table.column(name)
    if isinstance(col, NominalColumn):
        codes = col.codes[mask]
        counts = np.bincount(codes, minlength=len(col.values))
        return {"counts": {v: int(c) for v, c in zip(col.values, counts) if c > 0}}
    if isinstance(col, BooleanColumn):
        data = col.data[mask]
        return {"counts": {"true": int(np.count_nonzero(data)), "false": int(len(data) - np.count_nonzero(data))}}
    assert isinstance(col, NumericColumn)
    values = col.data[mask]
    values = values[~np.isnan(values)]
    if len(values) == 0:
        return {"mean": None, "variance": None, "min": None, "max": None, "n": 0}
    return {
        "mean": float(values.mean()),
        "variance": float(values.var()),
        "min": float(values.min()),
        "max": float(values.max()),
        "n": int(len(values)),
    }


class _Candidate:
    __slots__ = ("key", "pattern", "mask", "quality")

    def __init__(self, key: tuple, pattern: Pattern, mask: np.ndarray, quality: float):
        self.key = key
        self.pattern = pattern
        self.mask = mask
        self.quality = quality


class _TopK:
    """Exact top-k under the total order (quality desc, depth asc, pattern asc)."""

    def __init__(self, k: int):
        self.k = k
        self._keys: list[tuple] = []
        self._items: list[_Candidate] = []

    @property
    def full(self) -> bool:
        return len(self._items) >= self.k

    @property
    def threshold(self) -> float:
        """Quality of the current k-th entry, or -inf while not full."""
        if not self.full:
            return float("-inf")
        return self._items[-1].quality

    def offer(self, cand: _Candidate) -> None:
        if self.full and cand.key >= self._keys[-1]:
            return
        pos = bisect.bisect_left(self._keys, cand.key)
        self._keys.insert(pos, cand.key)
        self._items.insert(pos, cand)
        if len(self._items) > self.k:
            self._keys.pop()
            self._items.pop()

    def sorted_candidates(self) -> list[_Candidate]:
        return list(self._items)


class _SearchRun:
    """One search job: owns the counters and frontier, shares the table."""

    def __init__(self, table: DataTable, measure: Measure, config: SearchConfig):
        self.table = table
        self.measure = measure
        self.config = config
        self.engine = RefinementEngine(table, config)
        self.top = _TopK(config.top_k)
        self.nodes = 0

    def score(self, pattern: Pattern, mask: np.ndarray) -> _Candidate:
        self.nodes += 1
        quality, defined = self.measure.safe_quality(mask)
        key = (-quality, pattern.depth, pattern.sort_key(self.table))
        cand = _Candidate(key, pattern, mask, quality)
        if defined:
            self.top.offer(cand)
        return cand

    def run_exhaustive(self) -> None:
        self._dfs(Pattern.root(), self.table.all_rows_mask(), 0)

    def _dfs(self, pattern: Pattern, mask: np.ndarray, depth: int) -> None:
        for child, child_mask in self.engine.children(pattern, mask):
            cand = self.score(child, child_mask)
            if depth + 1 >= self.config.max_depth:
                continue
            if (
                self.config.use_optimistic_pruning
                and self.top.full
                and self.measure.optimistic_estimate(child_mask) < self.top.threshold
            ):
                continue
            self._dfs(child, child_mask, depth + 1)

    def run_beam(self) -> None:
        width = self.config.beam_width
        level: list[tuple[Pattern, np.ndarray]] = [(Pattern.root(), self.table.all_rows_mask())]
        for _ in range(self.config.max_depth):
            scored: list[_Candidate] = []
            for pattern, mask in level:
                for child, child_mask in self.engine.children(pattern, mask):
                    scored.append(self.score(child, child_mask))
            if not scored:
                break
            scored.sort(key=lambda c: c.key)
            keep = scored if width is None else scored[:width]
            level = [(c.pattern, c.mask) for c in keep]


def _as_subgroups(table: DataTable, measure: Measure, cands: list[_Candidate]) -> list[Subgroup]:
    return [
        Subgroup(
            c.pattern,
            c.mask,
            c.quality,
            measure.optimistic_estimate(c.mask),
            target_stats(table, c.mask),
        )
        for c in cands
    ]


def _search(table: DataTable, measure: Measure, config: SearchConfig) -> tuple[list[_Candidate], int]:
    run = _SearchRun(table, measure, config)
    if config.strategy == "exhaustive":
        run.run_exhaustive()
    else:
        run.run_beam()
    return run.top.sorted_candidates(), run.nodes


def config_hash(measure_spec: QualityMeasureSpec, config: SearchConfig, target: str, mode: str = "discover", extra: dict | None = None) -> str:
    payload = {
        "measure": measure_spec.to_json(),
        "search": config.to_json(),
        "target": target,
        "mode": mode,
    }
    if extra:
        payload.update(extra)
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _empty_result(measure_spec: QualityMeasureSpec, config: SearchConfig, dataset_id: str) -> ResultSet:
    return ResultSet([], dataset_id, config_hash(measure_spec, config, ""), measure_spec, config)


def exhaustive_search(
    table: DataTable,
    measure_spec: QualityMeasureSpec,
    config: SearchConfig,
    dataset_id: str = "",
) -> ResultSet:
    return _run_strategy(table, measure_spec, replace(config, strategy="exhaustive"), dataset_id)


def beam_search(
    table: DataTable,
    measure_spec: QualityMeasureSpec,
    config: SearchConfig,
    dataset_id: str = "",
) -> ResultSet:
    return _run_strategy(table, measure_spec, replace(config, strategy="beam"), dataset_id)


def _run_strategy(
    table: DataTable,
    measure_spec: QualityMeasureSpec,
    config: SearchConfig,
    dataset_id: str,
    measure: Measure | None = None,
) -> ResultSet:
    errors = config.validate() + measure_spec.validate()
    if errors:
        raise ConfigError(errors)
    if table.row_count == 0:
        return _empty_result(measure_spec, config, dataset_id)
    started = time.perf_counter()
    if measure is None:
        measure = build_measure(measure_spec, table)
    cands, nodes = _search(table, measure, config)
    subgroups = _as_subgroups(table, measure, cands)
    return ResultSet(
        subgroups,
        dataset_id,
        config_hash(measure_spec, config, table.target_name or ""),
        measure_spec,
        config,
        wall_time=time.perf_counter() - started,
        nodes_explored=nodes,
    )


def diversify(result: ResultSet, diversity_jaccard: float | None = None) -> ResultSet:
    """Greedy redundancy filter: keep a subgroup iff its extent overlaps every
    kept one with Jaccard <= threshold (inclusive), then truncate to top_k."""
    theta = diversity_jaccard if diversity_jaccard is not None else result.config.diversity_jaccard
    kept: list[Subgroup] = []
    for g in result.subgroups:
        if len(kept) >= result.config.top_k:
            break
        if all(jaccard(g.mask, h.mask) <= theta for h in kept):
            kept.append(g)
    return ResultSet(
        kept,
        result.dataset_id,
        result.config_hash,
        result.measure_spec,
        result.config,
        wall_time=result.wall_time,
        nodes_explored=result.nodes_explored,
    )


def discover(
    table: DataTable,
    measure_spec: QualityMeasureSpec,
    config: SearchConfig,
    dataset_id: str = "",
    measure: Measure | None = None,
) -> ResultSet:
    """Dispatch to the configured strategy, then apply the diversity filter."""
    started = time.perf_counter()
    raw = _run_strategy(table, measure_spec, config, dataset_id, measure=measure)
    result = diversify(raw)
    result.wall_time = time.perf_counter() - started
    return result
