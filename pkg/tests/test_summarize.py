import numpy as np
import pytest

from sqlscope.errors import MeasureError
from sqlscope.patterns import NominalEquals, Pattern, jaccard
from sqlscope.refine import RefinementEngine
from sqlscope.schema import Attribute, Kind, Schema
from sqlscope.search import SearchConfig
from sqlscope.summarize import (
    MajorityLabel,
    RuleListSummary,
    Stump,
    fidelity,
    fit_surrogate,
    predict_rule_list,
    rule_membership,
    summarize,
)
from sqlscope.synthetic import generate_planted_predictions
from sqlscope.table import build_table


def labels(*values):
    return np.array(values, dtype=object)


@pytest.fixture
def six_row_table():
    """Feature f in {a,b}: f=a rows predict A, f=b rows predict B."""
    schema = Schema([Attribute("f", Kind.NOMINAL), Attribute("n", Kind.NUMERIC)])
    rows = [["a", 1.0], ["a", 2.0], ["a", 3.0], ["b", 4.0], ["b", 5.0], ["b", 6.0]]
    table = build_table(schema, rows)
    return table, labels("A", "A", "A", "B", "B", "B")


class TestSurrogates:
    def test_majority_label_counting(self, make_mask):
        table = build_table([Attribute("f", Kind.NOMINAL)], [["u"], ["u"], ["u"]])
        preds = labels("A", "A", "B")
        model = fit_surrogate(table, table.all_rows_mask(), preds)
        assert model == MajorityLabel("A")
        assert fidelity(model, table, table.all_rows_mask(), preds) == pytest.approx(2 / 3)

    def test_majority_tie_lexicographic(self):
        table = build_table([Attribute("f", Kind.NOMINAL)], [["u"], ["u"]])
        model = fit_surrogate(table, table.all_rows_mask(), labels("B", "A"))
        assert model == MajorityLabel("A")

    def test_empty_extent_rejected(self, six_row_table):
        table, preds = six_row_table
        with pytest.raises(MeasureError):
            fit_surrogate(table, np.zeros(6, dtype=bool), preds)

    def test_perfect_stump_found_by_brute_force(self, six_row_table):
        table, preds = six_row_table
        engine = RefinementEngine(table, SearchConfig(min_support=0))
        model = fit_surrogate(table, table.all_rows_mask(), preds, engine)
        assert isinstance(model, Stump)
        assert fidelity(model, table, table.all_rows_mask(), preds) == 1.0
        assert model.condition == NominalEquals("f", "a")
        assert (model.label_if_true, model.label_if_false) == ("A", "B")

    def test_stump_needs_minimum_gain(self, six_row_table):
        table, preds = six_row_table
        engine = RefinementEngine(table, SearchConfig(min_support=0))
        # Majority already fits 5/6; the best stump fixes one row -> gain 1/6 > 0.05
        near_uniform = labels("A", "A", "A", "A", "A", "B")
        model = fit_surrogate(table, table.all_rows_mask(), near_uniform, engine)
        assert isinstance(model, Stump)
        model = fit_surrogate(
            table, table.all_rows_mask(), near_uniform, engine, stump_gain_min=0.5
        )
        assert model == MajorityLabel("A")

    def test_empty_fidelity_is_vacuous(self, six_row_table):
        table, preds = six_row_table
        assert fidelity(MajorityLabel("A"), table, np.zeros(6, dtype=bool), preds) == 1.0

    def test_stump_predicts_on_unseen_rows(self, six_row_table):
        table, _ = six_row_table
        stump = Stump(NominalEquals("f", "a"), "A", "B")
        out = stump.predict(table, table.all_rows_mask())
        assert list(out) == ["A", "A", "A", "B", "B", "B"]


class TestSummarize:
    def test_two_rule_exact_partition(self, six_row_table):
        table, preds = six_row_table
        summary = summarize(table, preds, k=2, config=SearchConfig(min_support=1))
        assert summary.k_produced == 2
        assert summary.global_fidelity == 1.0
        rendered = {tuple(s.render() for s in r.pattern.selectors) for r in summary.rules}
        assert rendered == {('f = "a"',), ('f = "b"',)}
        assert all(r.fidelity == 1.0 for r in summary.rules)
        assert sum(r.covered_count for r in summary.rules) + summary.default_count == 6

    def test_uniform_predictions_stop_at_zero_rules(self, six_row_table):
        table, _ = six_row_table
        uniform = labels(*(["A"] * 6))
        summary = summarize(table, uniform, k=5, config=SearchConfig(min_support=1))
        assert summary.k_produced == 0
        assert summary.default_model == MajorityLabel("A")
        assert summary.global_fidelity == 1.0

    def test_k_below_one_rejected(self, six_row_table):
        table, preds = six_row_table
        with pytest.raises(MeasureError):
            summarize(table, preds, k=0)

    def test_length_mismatch_rejected(self, six_row_table):
        table, _ = six_row_table
        with pytest.raises(MeasureError, match="length"):
            summarize(table, labels("A", "B"), k=1)

    def test_prediction_attr_excluded_from_patterns(self):
        schema = Schema([Attribute("f", Kind.NOMINAL), Attribute("pred", Kind.NOMINAL)])
        rows = [["a", "A"], ["a", "A"], ["b", "B"], ["b", "B"], ["a", "A"], ["b", "B"]]
        table = build_table(schema, rows)
        summary = summarize(table, "pred", k=2, config=SearchConfig(min_support=1))
        used = {s.attr for r in summary.rules for s in r.pattern.selectors}
        assert "pred" not in used
        assert summary.global_fidelity == 1.0
        assert summary.prediction_attr == "pred"

    def test_first_match_semantics(self, six_row_table):
        table, preds = six_row_table
        summary = summarize(table, preds, k=2, config=SearchConfig(min_support=1))
        membership = rule_membership(summary, table)
        # Every row belongs to exactly one rule or the default.
        assert set(membership) <= {-1, 0, 1}
        counts = [int(np.count_nonzero(membership == i)) for i in range(summary.k_produced)]
        assert counts == [r.covered_count for r in summary.rules]

    def test_predict_rule_list_first_match_and_default(self, six_row_table):
        table, preds = six_row_table
        from sqlscope.summarize import Rule

        # The second rule covers everything; rows matched by the first rule
        # must still take the first rule's output.
        overlapping = RuleListSummary(
            rules=[
                Rule(Pattern((NominalEquals("f", "a"),)), MajorityLabel("FIRST"), 1.0, 3),
                Rule(Pattern(()), MajorityLabel("SECOND"), 1.0, 3),
            ],
            default_model=MajorityLabel("Z"),
            default_count=0,
            default_fidelity=1.0,
            global_fidelity=1.0,
            k_requested=2,
            k_produced=2,
        )
        out = predict_rule_list(overlapping, table)
        assert out == ["FIRST", "FIRST", "FIRST", "SECOND", "SECOND", "SECOND"]

    def test_rows_covered_by_no_rule_get_default(self, six_row_table):
        table, _ = six_row_table
        from sqlscope.summarize import Rule

        summary = RuleListSummary(
            rules=[Rule(Pattern((NominalEquals("f", "a"),)), MajorityLabel("A"), 1.0, 3)],
            default_model=MajorityLabel("DEF"),
            default_count=3,
            default_fidelity=1.0,
            global_fidelity=1.0,
            k_requested=1,
            k_produced=1,
        )
        assert predict_rule_list(summary, table)[3:] == ["DEF", "DEF", "DEF"]

    def test_global_fidelity_equals_weighted_mean_and_rowwise(self, six_row_table):
        table, preds = six_row_table
        noisy = labels("A", "A", "B", "B", "B", "A")
        summary = summarize(table, noisy, k=3, config=SearchConfig(min_support=1))
        weighted = sum(r.fidelity * r.covered_count for r in summary.rules)
        weighted += summary.default_fidelity * summary.default_count
        assert summary.global_fidelity == pytest.approx(weighted / 6, abs=1e-12)
        rowwise = np.mean(np.array(predict_rule_list(summary, table), dtype=object) == noisy)
        assert summary.global_fidelity == pytest.approx(float(rowwise), abs=1e-12)

    def test_fidelity_monotone_in_k(self):
        planted = generate_planted_predictions(n_rows=300, seed=11)
        config = SearchConfig(min_support=1)
        fidelities = [
            summarize(planted.table, planted.predictions, k=k, config=config).global_fidelity
            for k in (1, 2, 3, 4)
        ]
        for a, b in zip(fidelities, fidelities[1:]):
            assert b >= a - 1e-12

    def test_mimicry_bound(self):
        planted = generate_planted_predictions(n_rows=300, seed=13)
        preds = np.array(planted.predictions, dtype=object)
        values, counts = np.unique(preds, return_counts=True)
        majority_fid = counts.max() / len(preds)
        summary = summarize(planted.table, planted.predictions, k=3)
        assert summary.global_fidelity >= majority_fid - 1e-12

    def test_planted_recovery(self):
        planted = generate_planted_predictions(n_rows=1000, seed=7)
        summary = summarize(planted.table, planted.predictions, k=3)
        assert summary.k_produced == 3
        assert summary.global_fidelity >= 0.95
        membership = rule_membership(summary, planted.table)
        for i in range(3):
            covered = set(np.flatnonzero(membership == i))
            best = max(
                len(covered & extent) / len(covered | extent)
                for extent in planted.planted_extents
            )
            assert best >= 0.9

    def test_summary_json_round_trip(self, six_row_table):
        table, preds = six_row_table
        summary = summarize(table, preds, k=2, config=SearchConfig(min_support=1))
        clone = RuleListSummary.from_json(summary.to_json())
        assert predict_rule_list(clone, table) == predict_rule_list(summary, table)
        assert clone.global_fidelity == summary.global_fidelity

    def test_report_one_rule_per_line(self, six_row_table):
        table, preds = six_row_table
        summary = summarize(table, preds, k=2, config=SearchConfig(min_support=1))
        lines = summary.report().splitlines()
        assert len(lines) == summary.k_produced + 2  # rules + default + global
        assert lines[0].startswith("rule 0: if ")
        assert "majority:" in lines[-2]


def test_surrogate_descriptions():
    from sqlscope.patterns import NumericInterval

    assert MajorityLabel("A").describe() == "majority: A"
    stump = Stump(NumericInterval("x", 5.0, float("inf")), "A", "B")
    assert stump.describe() == "stump: x in [5, +inf) -> A else B"
