"""AST node types for the supported SQL subset.

All nodes are frozen dataclasses. Identifiers arrive lowercased from the
lexer; literal values keep their text only as far as feature extraction needs
them (LIKE patterns), since fingerprinting abstracts every literal anyway.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TableRef:
    name: str
    alias: str | None = None


@dataclass(frozen=True)
class ColumnRef:
    qualifier: str | None  # table name or alias as written, None if bare
    column: str


@dataclass(frozen=True)
class Star:
    qualifier: str | None = None  # t.* carries its qualifier


@dataclass(frozen=True)
class Literal:
    kind: str  # number | string | date | bool | null | param
    text: str = ""


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple = ()
    star: bool = False  # count(*)


Operand = ColumnRef | Literal | FuncCall


@dataclass(frozen=True)
class Comparison:
    op: str  # = <> < <= > >=
    left: Operand
    right: Operand


@dataclass(frozen=True)
class Like:
    operand: Operand
    pattern: Operand
    negated: bool = False


@dataclass(frozen=True)
class InList:
    operand: Operand
    items: tuple = ()
    negated: bool = False


@dataclass(frozen=True)
class InSubquery:
    operand: Operand
    query: "SelectStmt"
    negated: bool = False


@dataclass(frozen=True)
class Between:
    operand: Operand
    low: Operand
    high: Operand
    negated: bool = False


@dataclass(frozen=True)
class IsNull:
    operand: Operand
    negated: bool = False


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    parts: tuple = ()


@dataclass(frozen=True)
class Not:
    part: object


Condition = Comparison | Like | InList | InSubquery | Between | IsNull | BoolOp | Not


@dataclass(frozen=True)
class SelectItem:
    expr: Operand | Star
    alias: str | None = None


@dataclass(frozen=True)
class OrderItem:
    column: ColumnRef
    descending: bool = False


@dataclass(frozen=True)
class Join:
    kind: str  # inner | left | right
    left: TableRef  # the table ref this join chains onto
    table: TableRef
    condition: Condition


@dataclass(frozen=True)
class SelectStmt:
    kind = "select"
    distinct: bool = False
    items: tuple[SelectItem, ...] = ()
    tables: tuple[TableRef, ...] = ()
    joins: tuple[Join, ...] = ()
    where: Condition | None = None
    group_by: tuple[ColumnRef, ...] = ()
    having: Condition | None = None
    order_by: tuple[OrderItem, ...] = ()
    limit: int | None = None
    limit_is_param: bool = False  # LIMIT ? / LIMIT :n (value unknown but present)


@dataclass(frozen=True)
class InsertStmt:
    kind = "insert"
    table: TableRef
    columns: tuple[ColumnRef, ...] | None = None
    values: tuple[tuple, ...] = ()  # rows of operand tuples, empty if select form
    select: SelectStmt | None = None


@dataclass(frozen=True)
class UpdateStmt:
    kind = "update"
    table: TableRef
    assignments: tuple[tuple[ColumnRef, object], ...] = ()
    where: Condition | None = None


@dataclass(frozen=True)
class DeleteStmt:
    kind = "delete"
    table: TableRef
    where: Condition | None = None


Statement = SelectStmt | InsertStmt | UpdateStmt | DeleteStmt
