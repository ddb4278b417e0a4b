import json

import numpy as np
import pytest

from oracles import best_quality
from tablegen import random_table

from sqlscope.errors import ConfigError
from sqlscope.quality import QualityMeasureSpec
from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.search import (
    ResultSet,
    SearchConfig,
    beam_search,
    discover,
    diversify,
    exhaustive_search,
    target_stats,
)
from sqlscope.table import build_table

WRACC = QualityMeasureSpec(kind="wracc")
CORPUS_CONFIG = dict(min_support=1, numeric_bins=3, max_depth=3, top_k=5)


def corpus(rng, n, target_kind):
    return [random_table(rng, target_kind)[0] for _ in range(n)]


class TestExhaustive:
    def test_toy_depth1_top1(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", max_depth=1, min_support=1)
        result = exhaustive_search(toy_binary_table, WRACC, config)
        top = result.subgroups[0]
        assert top.quality == pytest.approx(0.2, abs=1e-12)
        assert top.pattern.render() == 'server = "hot"'
        assert top.size == 5

    def test_min_support_above_rows_gives_empty_result(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", min_support=toy_binary_table.row_count + 1)
        result = exhaustive_search(toy_binary_table, WRACC, config)
        assert result.subgroups == []

    def test_empty_table(self):
        table = build_table(
            [Attribute("a", Kind.NOMINAL), Attribute("y", Kind.BOOLEAN, Role.TARGET)], []
        )
        result = exhaustive_search(table, WRACC, SearchConfig())
        assert result.subgroups == [] and result.nodes_explored == 0

    @pytest.mark.parametrize(
        "kind,target_kind", [("wracc", "boolean"), ("mean_shift", "numeric"), ("tv_emm", "nominal")]
    )
    def test_top1_matches_enumerate_and_score_oracle(self, kind, target_kind):
        rng = np.random.default_rng(101)
        config = SearchConfig(strategy="exhaustive", **CORPUS_CONFIG)
        for table in corpus(rng, 25, target_kind):
            spec = QualityMeasureSpec(kind=kind, positive_class=None)
            result = exhaustive_search(table, spec, config)
            expected = best_quality(
                table, "y", kind, bins=3, max_depth=3, min_support=1, positive=True
            )
            if expected is None:
                assert result.subgroups == []
            else:
                assert result.subgroups[0].quality == pytest.approx(expected, abs=1e-12)

    def test_pruning_does_not_change_results(self):
        rng = np.random.default_rng(103)
        for kind, target_kind in [("wracc", "boolean"), ("mean_shift", "numeric")]:
            for table in corpus(rng, 20, target_kind):
                spec = QualityMeasureSpec(kind=kind)
                on = exhaustive_search(
                    table, spec, SearchConfig(strategy="exhaustive", **CORPUS_CONFIG)
                )
                off = exhaustive_search(
                    table,
                    spec,
                    SearchConfig(strategy="exhaustive", use_optimistic_pruning=False, **CORPUS_CONFIG),
                )
                assert on.key_pairs() == off.key_pairs()
                assert on.nodes_explored <= off.nodes_explored

    def test_pruning_actually_prunes(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=3, top_k=1)
        on = exhaustive_search(toy_binary_table, WRACC, config)
        off = exhaustive_search(
            toy_binary_table, WRACC, SearchConfig(strategy="exhaustive", min_support=1, max_depth=3, top_k=1, use_optimistic_pruning=False)
        )
        assert on.nodes_explored < off.nodes_explored


def decoy_table():
    """decoy=p is the unique depth-1 winner but its children are dead ends;
    the depth-2 optimum [gem=v1 and aux=k1] hides under a zero-quality parent,
    so a width-1 beam visits everything except the optimum's subtree.
    """
    rows = [
        ["q", "v1", "k1", True],
        ["q", "v1", "k1", True],
        ["p", "v1", "k1", True],  # optimum extent: these three rows, all positive
        ["p", "v1", "k2", False],
        ["q", "v1", "k2", False],
        ["q", "v1", "k2", False],
        ["p", "v2", "k1", False],
        ["q", "v2", "k1", False],
        ["q", "v2", "k1", False],
        ["p", "v2", "k2", True],
        ["p", "v2", "k2", True],
        ["p", "v2", "k2", True],
    ]
    schema = Schema(
        [
            Attribute("decoy", Kind.NOMINAL),
            Attribute("gem", Kind.NOMINAL),
            Attribute("aux", Kind.NOMINAL),
            Attribute("y", Kind.BOOLEAN, Role.TARGET),
        ]
    )
    return build_table(schema, rows)


class TestBeam:
    def test_infinite_width_equals_exhaustive(self):
        rng = np.random.default_rng(107)
        for kind, target_kind in [("wracc", "boolean"), ("mean_shift", "numeric"), ("tv_emm", "nominal")]:
            for table in corpus(rng, 10, target_kind):
                spec = QualityMeasureSpec(kind=kind)
                wide = beam_search(table, spec, SearchConfig(beam_width=None, **CORPUS_CONFIG))
                exact = exhaustive_search(table, spec, SearchConfig(**CORPUS_CONFIG))
                assert wide.key_pairs() == exact.key_pairs()

    def test_narrow_beam_misses_the_decoyed_optimum(self):
        table = decoy_table()
        narrow = beam_search(table, WRACC, SearchConfig(beam_width=1, min_support=1, max_depth=2))
        exact = exhaustive_search(table, WRACC, SearchConfig(min_support=1, max_depth=2))
        assert narrow.subgroups[0].quality < exact.subgroups[0].quality
        assert exact.subgroups[0].pattern.render() == 'gem = "v1" and aux = "k1"'
        assert exact.subgroups[0].quality == pytest.approx(0.125, abs=1e-12)

    def test_depth1_any_sufficient_width_equals_exhaustive(self, toy_binary_table):
        wide = beam_search(
            toy_binary_table, WRACC, SearchConfig(beam_width=100, max_depth=1, min_support=1)
        )
        exact = exhaustive_search(
            toy_binary_table, WRACC, SearchConfig(max_depth=1, min_support=1)
        )
        assert wide.key_pairs() == exact.key_pairs()

    def test_top1_quality_monotone_in_width(self):
        rng = np.random.default_rng(109)
        for kind, target_kind in [("wracc", "boolean"), ("mean_shift", "numeric")]:
            for table in corpus(rng, 15, target_kind):
                spec = QualityMeasureSpec(kind=kind)
                tops = []
                for width in (1, 2, 5, None):
                    rs = beam_search(table, spec, SearchConfig(beam_width=width, **CORPUS_CONFIG))
                    tops.append(rs.subgroups[0].quality if rs.subgroups else float("-inf"))
                for a, b in zip(tops, tops[1:]):
                    assert b >= a - 1e-12

    def test_exhaustive_dominates_beam(self):
        rng = np.random.default_rng(113)
        for table in corpus(rng, 15, "boolean"):
            beam = beam_search(table, WRACC, SearchConfig(beam_width=2, **CORPUS_CONFIG))
            exact = exhaustive_search(table, WRACC, SearchConfig(**CORPUS_CONFIG))
            if exact.subgroups:
                b = beam.subgroups[0].quality if beam.subgroups else float("-inf")
                assert exact.subgroups[0].quality >= b - 1e-15


class TestDiversify:
    def make_result(self, table, groups):
        return ResultSet(groups, "ds", "hash", WRACC, SearchConfig(top_k=10))

    def test_identical_extents_second_dropped(self, toy_binary_table, make_mask):
        from sqlscope.search import Subgroup
        from sqlscope.patterns import NominalEquals, Pattern

        mask = make_mask(toy_binary_table, range(5))
        g1 = Subgroup(Pattern((NominalEquals("server", "hot"),)), mask, 0.5, 1.0, {})
        g2 = Subgroup(Pattern((NominalEquals("server", "cold"),)), mask.copy(), 0.4, 1.0, {})
        result = self.make_result(toy_binary_table, [g1, g2])
        for theta in (0.2, 0.8, 0.99):
            kept = diversify(result, theta)
            assert [g.quality for g in kept.subgroups] == [0.5]
        assert [g.quality for g in diversify(result, 1.0).subgroups] == [0.5, 0.4]

    def test_disjoint_extents_all_kept(self, toy_binary_table, make_mask):
        from sqlscope.search import Subgroup
        from sqlscope.patterns import Pattern

        groups = [
            Subgroup(Pattern(), make_mask(toy_binary_table, [i]), 1.0 - 0.1 * i, 2.0, {})
            for i in range(3)
        ]
        result = self.make_result(toy_binary_table, groups)
        assert len(diversify(result, 0.1).subgroups) == 3

    def test_boundary_jaccard_inclusive(self, toy_binary_table, make_mask):
        from sqlscope.search import Subgroup
        from sqlscope.patterns import Pattern

        g1 = Subgroup(Pattern(), make_mask(toy_binary_table, range(10)), 0.9, 1.0, {})
        g2 = Subgroup(Pattern(), make_mask(toy_binary_table, range(8)), 0.8, 1.0, {})
        result = self.make_result(toy_binary_table, [g1, g2])
        kept = diversify(result, 0.8)
        assert len(kept.subgroups) == 2  # Jaccard exactly 0.8 <= 0.8 is kept
        assert len(diversify(result, 0.79).subgroups) == 1


class TestDiscover:
    def test_dispatch_and_diversify(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=2, top_k=5)
        result = discover(toy_binary_table, WRACC, config, dataset_id="toy")
        assert result.dataset_id == "toy"
        assert result.nodes_explored > 0
        assert result.wall_time >= 0
        assert len(result.subgroups) <= 5
        qualities = [g.quality for g in result.subgroups]
        assert qualities == sorted(qualities, reverse=True)

    def test_repeated_runs_identical(self, toy_binary_table):
        config = SearchConfig(min_support=1, max_depth=3)
        a = discover(toy_binary_table, WRACC, config)
        b = discover(toy_binary_table, WRACC, config)
        ja, jb = a.to_json(), b.to_json()
        ja.pop("wall_time"), jb.pop("wall_time")
        assert json.dumps(ja, sort_keys=True) == json.dumps(jb, sort_keys=True)

    def test_config_hash_stable_and_spec_sensitive(self, toy_binary_table):
        a = discover(toy_binary_table, WRACC, SearchConfig(min_support=1))
        b = discover(toy_binary_table, WRACC, SearchConfig(min_support=1))
        c = discover(toy_binary_table, WRACC, SearchConfig(min_support=2))
        assert a.config_hash == b.config_hash != c.config_hash

    def test_invalid_config_collected(self, toy_binary_table):
        bad = SearchConfig(strategy="magic", max_depth=0, top_k=0)
        with pytest.raises(ConfigError) as err:
            discover(toy_binary_table, WRACC, bad)
        assert len(err.value.messages) >= 3

    def test_ks_search_skips_undefined_nodes(self, numeric_target_table):
        spec = QualityMeasureSpec(kind="ks_deviation")
        config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=2)
        result = discover(numeric_target_table, spec, config)
        # The selector g="a"|"b" partitions rows; full-cover nodes are skipped.
        assert all(0 < g.size < numeric_target_table.row_count for g in result.subgroups)
        assert result.subgroups[0].quality == 1.0


class TestTieBreaks:
    def test_equal_extent_prefers_lower_attribute_index(self):
        """Two attributes with identical extents: the earlier attribute wins."""
        schema = Schema(
            [
                Attribute("first", Kind.ITEMSET),
                Attribute("second", Kind.NOMINAL),
                Attribute("y", Kind.BOOLEAN, Role.TARGET),
            ]
        )
        rows = [
            [{"hit"}, "yes", True],
            [{"hit"}, "yes", True],
            [set(), "no", False],
            [set(), "no", False],
        ]
        table = build_table(schema, rows)
        result = discover(table, WRACC, SearchConfig(min_support=1, max_depth=2))
        assert result.subgroups[0].pattern.render() == 'first ∋ "hit"'

    def test_equal_quality_prefers_shallower_pattern(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=3, top_k=50,
                              diversity_jaccard=1.0)
        result = exhaustive_search(toy_binary_table, WRACC, config)
        best = result.subgroups[0]
        same_quality = [g for g in result.subgroups if g.quality == best.quality]
        assert best.pattern.depth == min(g.pattern.depth for g in same_quality)

    def test_result_sorted_by_quality_depth_pattern(self, toy_binary_table):
        config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=2, top_k=50,
                              diversity_jaccard=1.0)
        result = exhaustive_search(toy_binary_table, WRACC, config)
        keys = [
            (-g.quality, g.pattern.depth, g.pattern.sort_key(toy_binary_table))
            for g in result.subgroups
        ]
        assert keys == sorted(keys)


def test_target_stats_recomputable(toy_binary_table, numeric_target_table, make_mask):
    mask = make_mask(toy_binary_table, range(5))
    assert target_stats(toy_binary_table, mask) == {"counts": {"true": 4, "false": 1}}
    nmask = make_mask(numeric_target_table, [3, 4])
    stats = target_stats(numeric_target_table, nmask)
    assert stats["mean"] == 12.0 and stats["min"] == 10.0 and stats["max"] == 14.0
    assert stats["variance"] == pytest.approx(4.0)


def test_nodes_explored_counts_scored_candidates(toy_binary_table):
    config = SearchConfig(strategy="exhaustive", min_support=1, max_depth=1,
                          use_optimistic_pruning=False)
    result = exhaustive_search(toy_binary_table, WRACC, config)
    # 2 nominal values + numeric grid selectors, all scored once at depth 1.
    from sqlscope.refine import RefinementEngine

    engine = RefinementEngine(toy_binary_table, config)
    assert result.nodes_explored == engine.branching()
