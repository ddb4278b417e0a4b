"""Rule-list summaries of black-box predictions.

Greedy sequential covering: repeatedly search the residual rows for the
pattern with the best fidelity gain, attach a white-box surrogate (majority
label, or a single-condition stump when it clearly beats the majority), strip
the covered rows, and finish with a default rule. Membership is first-match,
so the ordered list partitions the rows exactly even when patterns overlap.

The black box itself is external: its predictions arrive as a nominal column
of the table (or as an explicit label sequence).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sqlscope.errors import MeasureError
from sqlscope.patterns import Pattern, Selector, extent_of, selector_from_json
from sqlscope.quality import Measure, QualityMeasureSpec
from sqlscope.refine import RefinementEngine
from sqlscope.search import SearchConfig, config_hash, discover
from sqlscope.table import DataTable, NominalColumn


@dataclass(frozen=True)
class MajorityLabel:
    label: str

    def describe(self) -> str:
        return f"majority: {self.label}"

    def predict(self, table: DataTable, mask: np.ndarray) -> np.ndarray:
        out = np.empty(table.row_count, dtype=object)
        out[mask] = self.label
        return out

    def to_json(self) -> dict:
        return {"model": "majority", "label": self.label}


@dataclass(frozen=True)
class Stump:
    condition: Selector
    label_if_true: str
    label_if_false: str

    def describe(self) -> str:
        return f"stump: {self.condition.render()} -> {self.label_if_true} else {self.label_if_false}"

    def predict(self, table: DataTable, mask: np.ndarray) -> np.ndarray:
        from sqlscope.patterns import evaluate_selector

        out = np.empty(table.row_count, dtype=object)
        true_mask = evaluate_selector(table, self.condition)
        out[mask & true_mask] = self.label_if_true
        out[mask & ~true_mask] = self.label_if_false
        return out

    def to_json(self) -> dict:
        return {
            "model": "stump",
            "condition": self.condition.to_json(),
            "label_if_true": self.label_if_true,
            "label_if_false": self.label_if_false,
        }


SurrogateModel = MajorityLabel | Stump


def surrogate_from_json(obj: dict) -> SurrogateModel:
    if obj.get("model") == "majority":
        return MajorityLabel(obj["label"])
    return Stump(
        selector_from_json(obj["condition"]), obj["label_if_true"], obj["label_if_false"]
    )


def _majority(labels: np.ndarray) -> str:
    """Most frequent label; ties go to the lexicographically smallest."""
    values, counts = np.unique(labels, return_counts=True)
    top = counts.max()
    return str(min(values[counts == top]))


def fidelity(model: SurrogateModel, table: DataTable, mask: np.ndarray, predictions: np.ndarray) -> float:
    """Fraction of extent rows where the surrogate reproduces the prediction.

    An empty extent is vacuously faithful (1.0).
    """
    n = int(np.count_nonzero(mask))
    if n == 0:
        return 1.0
    agreement = int(np.count_nonzero((model.predict(table, mask) == predictions) & mask))
    return agreement / n


def fit_surrogate(
    table: DataTable,
    mask: np.ndarray,
    predictions: np.ndarray,
    engine: RefinementEngine | None = None,
    stump_gain_min: float = 0.05,
) -> SurrogateModel:
    """Best white-box model for the extent.

    Majority label by default; the best single-condition stump replaces it
    only when its fidelity wins by at least ``stump_gain_min``. Stump sides
    with no covered rows fall back to the extent majority so the model stays
    total on unseen rows.
    """
    n = int(np.count_nonzero(mask))
    if n == 0:
        raise MeasureError("cannot fit a surrogate on an empty extent")
    extent_labels = predictions[mask]
    majority = MajorityLabel(_majority(extent_labels))
    if engine is None:
        return majority
    majority_fid = fidelity(majority, table, mask, predictions)

    best: tuple[float, tuple, Stump] | None = None
    for attr_idx in range(len(table.schema)):
        for selector, sel_mask in engine.selectors_for(attr_idx):
            true_side = mask & sel_mask
            false_side = mask & ~sel_mask
            n_true = int(np.count_nonzero(true_side))
            n_false = n - n_true
            label_true = _majority(predictions[true_side]) if n_true else majority.label
            label_false = _majority(predictions[false_side]) if n_false else majority.label
            agree = int(np.count_nonzero(predictions[true_side] == label_true)) + int(
                np.count_nonzero(predictions[false_side] == label_false)
            )
            fid = agree / n
            key = (selector.attr, selector.params_key(table))
            cand = (fid, key, Stump(selector, label_true, label_false))
            if best is None or fid > best[0] or (fid == best[0] and key < best[1]):
                best = cand
    if best is not None and best[0] >= majority_fid + stump_gain_min:
        return best[2]
    return majority


class FidelityGainMeasure(Measure):
    """Coverage-weighted fidelity lift of a local majority over the rest's
    majority: (n_s/|R|) * (fid(majority of s) - fid(majority of R-minus-s on s)).

    The baseline is what the default rule would predict for these rows if the
    candidate were carved out: the majority label of the remaining residual.
    When the candidate covers the whole residual there is no rest and the
    baseline fidelity is zero (a described rule beats an empty default).
    """

    def __init__(self, spec: QualityMeasureSpec, predictions: np.ndarray, n_rows: int):
        if n_rows == 0:
            raise MeasureError("fidelity_gain is undefined on an empty table")
        self.spec = spec
        self.predictions = predictions
        self.n_rows = n_rows

    def quality(self, mask: np.ndarray) -> float:
        covered = self.predictions[mask]
        if len(covered) == 0:
            return 0.0
        rest = self.predictions[~mask]
        local_agree = int(np.count_nonzero(covered == _majority(covered)))
        base_agree = int(np.count_nonzero(covered == _majority(rest))) if len(rest) else 0
        return (local_agree - base_agree) / self.n_rows


@dataclass
class Rule:
    pattern: Pattern
    surrogate: SurrogateModel
    fidelity: float
    covered_count: int

    def to_json(self) -> dict:
        return {
            "selectors": [s.render() for s in self.pattern.selectors],
            "selector_json": self.pattern.to_json(),
            "surrogate": self.surrogate.describe(),
            "surrogate_json": self.surrogate.to_json(),
            "fidelity": self.fidelity,
            "covered_count": self.covered_count,
        }


@dataclass
class RuleListSummary:
    """Ordered rules with first-match semantics plus a default rule."""

    rules: list[Rule]
    default_model: MajorityLabel
    default_count: int
    default_fidelity: float
    global_fidelity: float
    k_requested: int
    k_produced: int
    prediction_attr: str | None = None
    config_hash: str = ""

    def to_json(self) -> dict:
        return {
            "rules": [r.to_json() for r in self.rules],
            "default": self.default_model.describe(),
            "default_json": self.default_model.to_json(),
            "default_count": self.default_count,
            "default_fidelity": self.default_fidelity,
            "global_fidelity": self.global_fidelity,
            "k_requested": self.k_requested,
            "k_produced": self.k_produced,
            "prediction_attr": self.prediction_attr,
            "config_hash": self.config_hash,
        }

    @staticmethod
    def from_json(obj: dict) -> "RuleListSummary":
        rules = [
            Rule(
                Pattern.from_json(r["selector_json"]),
                surrogate_from_json(r["surrogate_json"]),
                r["fidelity"],
                r["covered_count"],
            )
            for r in obj["rules"]
        ]
        return RuleListSummary(
            rules=rules,
            default_model=MajorityLabel(obj["default_json"]["label"]),
            default_count=obj["default_count"],
            default_fidelity=obj["default_fidelity"],
            global_fidelity=obj["global_fidelity"],
            k_requested=obj["k_requested"],
            k_produced=obj["k_produced"],
            prediction_attr=obj.get("prediction_attr"),
            config_hash=obj.get("config_hash", ""),
        )

    def report(self) -> str:
        """One rule per line, in match order."""
        lines = []
        for i, rule in enumerate(self.rules):
            pattern = rule.pattern.render()
            lines.append(
                f"rule {i}: if {pattern} -> {rule.surrogate.describe()} "
                f"[covers {rule.covered_count}, fidelity {rule.fidelity:.4f}]"
            )
        lines.append(
            f"default: {self.default_model.describe()} "
            f"[covers {self.default_count}, fidelity {self.default_fidelity:.4f}]"
        )
        lines.append(f"global fidelity: {self.global_fidelity:.4f}")
        return "\n".join(lines)


def _prediction_labels(table: DataTable, predictions) -> np.ndarray:
    if isinstance(predictions, str):
        col = table.column(predictions)
        if not isinstance(col, NominalColumn):
            raise MeasureError(f"prediction attribute {predictions!r} must be nominal")
        return np.array([col.value_at(r) for r in range(table.row_count)], dtype=object)
    labels = np.array([str(v) for v in predictions], dtype=object)
    if len(labels) != table.row_count:
        raise MeasureError(
            f"predictions length {len(labels)} does not match row count {table.row_count}"
        )
    return labels


def summarize(
    table: DataTable,
    predictions,
    k: int,
    config: SearchConfig | None = None,
    stump_gain_min: float = 0.05,
    dataset_id: str = "",
) -> RuleListSummary:
    """Greedy rule-list summary with at most ``k`` rules.

    ``predictions`` is a nominal attribute name or a label sequence. When it
    names an attribute, that attribute is excluded from patterns (a rule that
    reads the black box's own output would be vacuous).
    """
    if k < 1:
        raise MeasureError("k must be >= 1")
    config = config or SearchConfig()
    labels = _prediction_labels(table, predictions)
    search_table = table.with_target(predictions) if isinstance(predictions, str) else table

    spec = QualityMeasureSpec(kind="fidelity_gain")
    residual = np.ones(table.row_count, dtype=bool)
    rules: list[Rule] = []
    total_agree = 0

    for _ in range(k):
        n_residual = int(np.count_nonzero(residual))
        if n_residual == 0:
            break
        residual_rows = np.flatnonzero(residual)
        subtable = search_table.select_rows(residual_rows)
        sub_labels = labels[residual_rows]
        measure = FidelityGainMeasure(spec, sub_labels, subtable.row_count)
        result = discover(subtable, spec, config, dataset_id, measure=measure)
        if not result.subgroups or result.subgroups[0].quality <= 0.0:
            break
        winner = result.subgroups[0]
        covered_rows = residual_rows[winner.mask]
        covered_mask = np.zeros(table.row_count, dtype=bool)
        covered_mask[covered_rows] = True
        engine = RefinementEngine(subtable, config)
        sub_model = fit_surrogate(subtable, winner.mask, sub_labels, engine, stump_gain_min)
        fid = fidelity(sub_model, subtable, winner.mask, sub_labels)
        rules.append(Rule(winner.pattern, sub_model, fid, int(winner.size)))
        total_agree += round(fid * winner.size)
        residual &= ~covered_mask

    n_default = int(np.count_nonzero(residual))
    if n_default > 0:
        default_model = MajorityLabel(_majority(labels[residual]))
        default_fid = fidelity(default_model, table, residual, labels)
    else:
        default_model = MajorityLabel(_majority(labels))
        default_fid = 1.0
    total_agree += round(default_fid * n_default)
    global_fidelity = total_agree / table.row_count if table.row_count else 1.0

    return RuleListSummary(
        rules=rules,
        default_model=default_model,
        default_count=n_default,
        default_fidelity=default_fid,
        global_fidelity=global_fidelity,
        k_requested=k,
        k_produced=len(rules),
        prediction_attr=predictions if isinstance(predictions, str) else None,
        config_hash=config_hash(spec, config, str(predictions), mode="summarize", extra={"k": k}),
    )


def rule_membership(summary: RuleListSummary, table: DataTable) -> np.ndarray:
    """First-match rule index per row (-1 for the default rule)."""
    assignment = np.full(table.row_count, -1, dtype=np.int64)
    unassigned = np.ones(table.row_count, dtype=bool)
    for i, rule in enumerate(summary.rules):
        member = unassigned & extent_of(table, rule.pattern)
        assignment[member] = i
        unassigned &= ~member
    return assignment


def predict_rule_list(summary: RuleListSummary, table: DataTable) -> list[str]:
    """First-match surrogate output per row; the default label otherwise."""
    membership = rule_membership(summary, table)
    out = np.empty(table.row_count, dtype=object)
    for i, rule in enumerate(summary.rules):
        member = membership == i
        if member.any():
            out[member] = rule.surrogate.predict(table, member)[member]
    rest = membership == -1
    out[rest] = summary.default_model.label
    return [str(v) for v in out]
