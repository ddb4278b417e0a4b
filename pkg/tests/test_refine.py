import numpy as np
import pytest

from oracles import equal_freq_cuts, naive_extent
from tablegen import random_table

from sqlscope.errors import MeasureError
from sqlscope.patterns import NumericInterval, Pattern
from sqlscope.refine import RefinementEngine, cutpoints, refinements
from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.search import SearchConfig
from sqlscope.table import build_table

INF = float("inf")


def numeric_table(values):
    return build_table([Attribute("x", Kind.NUMERIC)], [[v] for v in values])


def test_quartile_cuts():
    table = numeric_table([1, 2, 3, 4, 5, 6, 7, 8])
    assert cutpoints(table, "x", 4) == [3.0, 5.0, 7.0]


def test_constant_column_has_no_cuts():
    table = numeric_table([5, 5, 5])
    for bins in (2, 3, 6):
        assert cutpoints(table, "x", bins) == []


def test_two_value_median_cut():
    table = numeric_table([1, 100])
    assert cutpoints(table, "x", 2) == [100.0]


def test_cuts_ignore_missing():
    table = numeric_table([None, 1, 2, 3, 4, 5, 6, 7, 8])
    assert cutpoints(table, "x", 4) == [3.0, 5.0, 7.0]


def test_all_missing_column_is_an_error():
    table = numeric_table([None, None])
    with pytest.raises(MeasureError):
        cutpoints(table, "x", 4)


def test_bins_below_two_rejected():
    table = numeric_table([1, 2])
    with pytest.raises(ValueError):
        cutpoints(table, "x", 1)


def test_cuts_match_sort_and_rank_oracle():
    rng = np.random.default_rng(3)
    for _ in range(30):
        values = [float(v) for v in rng.integers(0, 12, size=rng.integers(1, 15))]
        table = numeric_table(values)
        for bins in (2, 3, 4, 6):
            assert cutpoints(table, "x", bins) == equal_freq_cuts(values, bins)


@pytest.fixture
def two_attr_table():
    schema = Schema([Attribute("color", Kind.NOMINAL), Attribute("x", Kind.NUMERIC)])
    rows = [["r", 1.0], ["g", 3.0], ["r", 5.0], ["g", 9.0]]
    return build_table(schema, rows)


def test_root_refinements_enumerate_the_grid(two_attr_table):
    config = SearchConfig(numeric_bins=2, min_support=0)
    got = refinements(two_attr_table, Pattern.root(), config)
    rendered = [p.render() for p in got]
    assert rendered == [
        'color = "r"',
        'color = "g"',
        "x in [-inf, 5)",
        "x in [5, +inf)",
    ]


def test_no_refinements_past_last_attribute(two_attr_table):
    config = SearchConfig(numeric_bins=2, min_support=0)
    pattern = Pattern((NumericInterval("x", 5.0, INF),))
    assert refinements(two_attr_table, pattern, config) == []


def test_min_support_above_row_count_blocks_everything(two_attr_table):
    config = SearchConfig(min_support=two_attr_table.row_count + 1)
    assert refinements(two_attr_table, Pattern.root(), config) == []


def test_excluded_attributes_yield_no_selectors(two_attr_table):
    config = SearchConfig(numeric_bins=2, min_support=0, exclude_attrs=frozenset({"color"}))
    rendered = [p.render() for p in refinements(two_attr_table, Pattern.root(), config)]
    assert rendered == ["x in [-inf, 5)", "x in [5, +inf)"]


def test_meta_and_target_attributes_never_refined():
    schema = Schema(
        [
            Attribute("id", Kind.NOMINAL, Role.META),
            Attribute("c", Kind.NOMINAL),
            Attribute("y", Kind.NUMERIC, Role.TARGET),
        ]
    )
    table = build_table(schema, [["q1", "a", 1.0], ["q2", "b", 2.0]])
    got = refinements(table, Pattern.root(), SearchConfig(min_support=0))
    assert [p.render() for p in got] == ['c = "a"', 'c = "b"']


def test_finite_intervals_from_pairs_of_cuts():
    table = numeric_table([1, 2, 3, 4, 5, 6, 7, 8])
    config = SearchConfig(numeric_bins=4, min_support=0)
    got = [p.render() for p in refinements(table, Pattern.root(), config)]
    assert got == [
        "x in [-inf, 3)",
        "x in [-inf, 5)",
        "x in [-inf, 7)",
        "x in [3, 5)",
        "x in [3, 7)",
        "x in [3, +inf)",
        "x in [5, 7)",
        "x in [5, +inf)",
        "x in [7, +inf)",
    ]


def enumerate_tree(table, config, max_depth):
    engine = RefinementEngine(table, config)
    seen = []
    frontier = [(Pattern.root(), table.all_rows_mask())]
    for _ in range(max_depth):
        nxt = []
        for pattern, mask in frontier:
            for child, child_mask in engine.children(pattern, mask):
                seen.append((child, child_mask))
                nxt.append((child, child_mask))
        frontier = nxt
    return seen


def test_canonical_non_redundancy_to_depth_3():
    rng = np.random.default_rng(11)
    config = SearchConfig(numeric_bins=3, min_support=0)
    for _ in range(10):
        table, _ = random_table(rng, "boolean")
        seen = [p.render() for p, _ in enumerate_tree(table, config, 3)]
        assert len(seen) == len(set(seen))


def test_cover_anti_monotonicity():
    rng = np.random.default_rng(13)
    config = SearchConfig(numeric_bins=3, min_support=0)
    for _ in range(10):
        table, _ = random_table(rng, "boolean")
        engine = RefinementEngine(table, config)
        frontier = [(Pattern.root(), table.all_rows_mask())]
        for _ in range(3):
            nxt = []
            for pattern, mask in frontier:
                for child, child_mask in engine.children(pattern, mask):
                    assert not np.any(child_mask & ~mask)
                    nxt.append((child, child_mask))
            frontier = nxt


def test_refinement_sequence_is_deterministic():
    rng = np.random.default_rng(17)
    table, _ = random_table(rng, "boolean")
    config = SearchConfig(numeric_bins=3, min_support=1)
    first = [p.render() for p, _ in enumerate_tree(table, config, 3)]
    second = [p.render() for p, _ in enumerate_tree(table, config, 3)]
    assert first == second


def test_refinement_extents_match_oracle():
    rng = np.random.default_rng(19)
    config = SearchConfig(numeric_bins=3, min_support=0)
    table, _ = random_table(rng, "numeric")
    for pattern, mask in enumerate_tree(table, config, 2):
        assert set(np.flatnonzero(mask)) == naive_extent(table, pattern)
