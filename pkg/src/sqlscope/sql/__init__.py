from sqlscope.sql.ast import (
    Between,
    BoolOp,
    ColumnRef,
    DeleteStmt,
    FuncCall,
    InList,
    InSubquery,
    InsertStmt,
    IsNull,
    Join,
    Like,
    Literal,
    Comparison,
    Not,
    OrderItem,
    SelectItem,
    SelectStmt,
    Star,
    Statement,
    TableRef,
    UpdateStmt,
)
from sqlscope.sql.features import QueryFeatures, extract_features, fingerprint
from sqlscope.sql.parser import ParseError, parse_sql
from sqlscope.sql.workload import QueryRecord, WorkloadIngest, ingest_workload

__all__ = [
    "Between",
    "BoolOp",
    "ColumnRef",
    "Comparison",
    "DeleteStmt",
    "FuncCall",
    "InList",
    "InSubquery",
    "InsertStmt",
    "IsNull",
    "Join",
    "Like",
    "Literal",
    "Not",
    "OrderItem",
    "ParseError",
    "QueryFeatures",
    "QueryRecord",
    "SelectItem",
    "SelectStmt",
    "Star",
    "Statement",
    "TableRef",
    "UpdateStmt",
    "WorkloadIngest",
    "extract_features",
    "fingerprint",
    "ingest_workload",
    "parse_sql",
]
