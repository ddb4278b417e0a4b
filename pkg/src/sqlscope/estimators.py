"""Scikit-learn style estimators wrapping discovery and summarization.

``SubgroupDiscovery`` is fit-shaped: fit(X, y) runs the configured search and
exposes the ranked subgroups; predict flags membership of the best subgroup
and transform yields one membership column per kept subgroup. ``RuleListSummarizer``
is a predictor over black-box outputs: fit(X, y_pred) builds the rule list,
predict replays it on new rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from sqlscope.frames import infer_kinds, table_from_frame
from sqlscope.patterns import extent_of
from sqlscope.quality import QualityMeasureSpec
from sqlscope.search import SearchConfig, discover
from sqlscope.summarize import predict_rule_list, summarize

TARGET_COLUMN = "__target__"


class SubgroupDiscovery(BaseEstimator):
    """Search for the top subgroups of (X, y) under a quality measure.

    Parameters mirror the job config: measure selection (kind, generality
    exponent, direction, positive class) and the search knobs. After fit,
    ``result_`` holds the ResultSet and ``subgroups_`` the ranked list.
    """

    def __init__(
        self,
        measure: str = "wracc",
        a: float = 1.0,
        direction: str = "high",
        positive_class: str | None = None,
        strategy: str = "beam",
        max_depth: int = 3,
        beam_width: int | None = 50,
        min_support: int | None = None,
        top_k: int = 20,
        diversity_jaccard: float = 0.8,
        numeric_bins: int = 6,
    ):
        self.measure = measure
        self.a = a
        self.direction = direction
        self.positive_class = positive_class
        self.strategy = strategy
        self.max_depth = max_depth
        self.beam_width = beam_width
        self.min_support = min_support
        self.top_k = top_k
        self.diversity_jaccard = diversity_jaccard
        self.numeric_bins = numeric_bins

    def _measure_spec(self) -> QualityMeasureSpec:
        positive = self.positive_class
        if positive is not None:
            positive = str(positive)
        return QualityMeasureSpec(
            kind=self.measure, a=self.a, direction=self.direction, positive_class=positive
        )

    def _search_config(self) -> SearchConfig:
        return SearchConfig(
            strategy=self.strategy,
            max_depth=self.max_depth,
            beam_width=self.beam_width,
            min_support=self.min_support,
            top_k=self.top_k,
            diversity_jaccard=self.diversity_jaccard,
            numeric_bins=self.numeric_bins,
        )

    def fit(self, X, y):
        import pandas as pd

        X = pd.DataFrame(X)
        self.kinds_ = infer_kinds(X)
        y = pd.Series(y)
        # The usual sklearn binary encoding (0/1 ints) reads as boolean here.
        if self.measure == "wracc" and pd.api.types.is_numeric_dtype(y):
            if set(y.unique()) <= {0, 1}:
                y = y.astype(bool)
        table = table_from_frame(X, y, kinds=self.kinds_, target_name=TARGET_COLUMN)
        self.result_ = discover(table, self._measure_spec(), self._search_config())
        self.subgroups_ = self.result_.subgroups
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit before using this estimator")

    def transform(self, X) -> np.ndarray:
        """Boolean membership matrix, one column per kept subgroup."""
        self._check_fitted()
        table = table_from_frame(X, kinds=self.kinds_)
        if not self.subgroups_:
            return np.zeros((table.row_count, 0), dtype=bool)
        return np.column_stack(
            [extent_of(table, g.pattern) for g in self.subgroups_]
        )

    def predict(self, X) -> np.ndarray:
        """1 for rows covered by the best subgroup, else 0."""
        self._check_fitted()
        table = table_from_frame(X, kinds=self.kinds_)
        if not self.subgroups_:
            return np.zeros(table.row_count, dtype=int)
        return extent_of(table, self.subgroups_[0].pattern).astype(int)

    def descriptions(self) -> list[str]:
        self._check_fitted()
        return [g.pattern.render() for g in self.subgroups_]


class RuleListSummarizer(ClassifierMixin, BaseEstimator):
    """Interpretable rule-list mimic of a black-box classifier's outputs."""

    def __init__(
        self,
        k: int = 3,
        stump_gain_min: float = 0.05,
        strategy: str = "beam",
        max_depth: int = 3,
        beam_width: int | None = 50,
        min_support: int | None = None,
        numeric_bins: int = 6,
    ):
        self.k = k
        self.stump_gain_min = stump_gain_min
        self.strategy = strategy
        self.max_depth = max_depth
        self.beam_width = beam_width
        self.min_support = min_support
        self.numeric_bins = numeric_bins

    def fit(self, X, y):
        import pandas as pd

        X = pd.DataFrame(X)
        self.kinds_ = infer_kinds(X)
        table = table_from_frame(X, kinds=self.kinds_)
        labels = [str(v) for v in pd.Series(y).tolist()]
        config = SearchConfig(
            strategy=self.strategy,
            max_depth=self.max_depth,
            beam_width=self.beam_width,
            min_support=self.min_support,
            numeric_bins=self.numeric_bins,
        )
        self.summary_ = summarize(
            table, labels, self.k, config, stump_gain_min=self.stump_gain_min
        )
        self.classes_ = np.unique(labels)
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "summary_"):
            raise NotFittedError("call fit before predict")
        table = table_from_frame(X, kinds=self.kinds_)
        return np.array(predict_rule_list(self.summary_, table), dtype=object)

    def report(self) -> str:
        if not hasattr(self, "summary_"):
            raise NotFittedError("call fit before report")
        return self.summary_.report()
