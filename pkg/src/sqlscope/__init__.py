"""Subgroup discovery over SQL workloads, plus rule-list prediction summaries."""

from sqlscope.patterns import (
    BoolIs,
    NominalEquals,
    NumericInterval,
    Pattern,
    SetContains,
    evaluate_selector,
    extent_of,
)
from sqlscope.quality import QualityMeasureSpec, build_measure
from sqlscope.refine import cutpoints, refinements
from sqlscope.schema import Attribute, Kind, Role, Schema
from sqlscope.search import ResultSet, SearchConfig, Subgroup, beam_search, discover, diversify, exhaustive_search
from sqlscope.table import DataTable, build_table

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "BoolIs",
    "DataTable",
    "Kind",
    "NominalEquals",
    "NumericInterval",
    "Pattern",
    "QualityMeasureSpec",
    "ResultSet",
    "Role",
    "Schema",
    "SearchConfig",
    "SetContains",
    "Subgroup",
    "beam_search",
    "build_measure",
    "build_table",
    "cutpoints",
    "discover",
    "diversify",
    "evaluate_selector",
    "exhaustive_search",
    "extent_of",
    "refinements",
    "__version__",
]
