"""Feature extraction and canonical fingerprinting over parsed statements.

Column references are resolved against the statement's own table references:
a bare column resolves when its scope has exactly one table, a qualified one
through the alias map. Unresolvable references keep the record usable under
the ``?`` qualifier. Subquery features merge into the parent's sets.

Predicate signatures are bit-exact strings ``<table>.<column> <op>`` with
op in {=, <>, <, <=, >, >=, like, in, between, is_null}; literals play no
part. Comparisons mirror their operator when the column sits on the right,
so ``5 < x`` signs as ``t.x >``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sqlscope.sql import ast

_MIRROR = {"=": "=", "<>": "<>", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


@dataclass
class QueryFeatures:
    """Descriptive features of one statement, before metrics are joined."""

    statement_kind: str = ""
    tables: set[str] = field(default_factory=set)
    fields: set[str] = field(default_factory=set)
    predicate_signatures: set[str] = field(default_factory=set)
    join_pairs: set[str] = field(default_factory=set)
    functions: set[str] = field(default_factory=set)
    num_tables: int = 0
    num_joins: int = 0
    num_predicates: int = 0
    num_subqueries: int = 0
    limit_value: int | None = None
    has_select_star: bool = False
    has_distinct: bool = False
    has_or: bool = False
    has_like_leading_wildcard: bool = False
    has_order_by: bool = False
    has_group_by: bool = False


class _Scope:
    """Alias resolution for one statement, chaining to the enclosing scope."""

    def __init__(self, tables: tuple[ast.TableRef, ...], parent: "_Scope | None" = None):
        self.names = {}
        for ref in tables:
            self.names[ref.name] = ref.name
            if ref.alias:
                self.names[ref.alias] = ref.name
        self.tables = [ref.name for ref in tables]
        self.parent = parent

    def resolve(self, column: ast.ColumnRef) -> str:
        """Owning table name, or '?' when the reference is ambiguous/unknown."""
        scope: _Scope | None = self
        while scope is not None:
            if column.qualifier is not None:
                if column.qualifier in scope.names:
                    return scope.names[column.qualifier]
            elif len(scope.tables) == 1:
                return scope.tables[0]
            elif scope.tables:
                return "?"  # several candidates in the nearest populated scope
            scope = scope.parent
        return "?"


class _Extractor:
    def __init__(self):
        self.out = QueryFeatures()

    def statement(self, stmt: ast.Statement, scope: _Scope | None = None) -> None:
        if isinstance(stmt, ast.SelectStmt):
            self._select(stmt, scope)
        elif isinstance(stmt, ast.InsertStmt):
            self._insert(stmt, scope)
        elif isinstance(stmt, ast.UpdateStmt):
            self._update(stmt, scope)
        else:
            self._delete(stmt, scope)

    def _select(self, stmt: ast.SelectStmt, parent: _Scope | None) -> None:
        scope = _Scope(stmt.tables, parent)
        self.out.tables.update(ref.name for ref in stmt.tables)
        self.out.num_joins += len(stmt.joins)
        for item in stmt.items:
            if isinstance(item.expr, ast.Star):
                self.out.has_select_star = True
            else:
                self._operand(item.expr, scope)
        for join in stmt.joins:
            pair = "~".join(sorted((join.left.name, join.table.name)))
            self.out.join_pairs.add(pair)
            self._condition(join.condition, scope, signatures=False)
        if stmt.where is not None:
            self._condition(stmt.where, scope, signatures=True)
        for col in stmt.group_by:
            self._field(col, scope)
        if stmt.having is not None:
            self._condition(stmt.having, scope, signatures=False)
        for item in stmt.order_by:
            self._field(item.column, scope)
        self.out.has_distinct = self.out.has_distinct or stmt.distinct
        self.out.has_group_by = self.out.has_group_by or bool(stmt.group_by)
        self.out.has_order_by = self.out.has_order_by or bool(stmt.order_by)
        if self.out.limit_value is None and stmt.limit is not None:
            self.out.limit_value = stmt.limit

    def _insert(self, stmt: ast.InsertStmt, parent: _Scope | None) -> None:
        scope = _Scope((stmt.table,), parent)
        self.out.tables.add(stmt.table.name)
        for col in stmt.columns or ():
            self._field(col, scope)
        for row in stmt.values:
            for value in row:
                self._operand(value, scope)
        if stmt.select is not None:
            self.out.num_subqueries += 1
            self._select(stmt.select, parent)

    def _update(self, stmt: ast.UpdateStmt, parent: _Scope | None) -> None:
        scope = _Scope((stmt.table,), parent)
        self.out.tables.add(stmt.table.name)
        for col, value in stmt.assignments:
            self._field(col, scope)
            self._operand(value, scope)
        if stmt.where is not None:
            self._condition(stmt.where, scope, signatures=True)

    def _delete(self, stmt: ast.DeleteStmt, parent: _Scope | None) -> None:
        scope = _Scope((stmt.table,), parent)
        self.out.tables.add(stmt.table.name)
        if stmt.where is not None:
            self._condition(stmt.where, scope, signatures=True)

    def _condition(self, cond, scope: _Scope, signatures: bool) -> None:
        if isinstance(cond, ast.BoolOp):
            if cond.op == "or":
                self.out.has_or = True
            for part in cond.parts:
                self._condition(part, scope, signatures)
            return
        if isinstance(cond, ast.Not):
            self._condition(cond.part, scope, signatures)
            return
        self._atom(cond, scope, signatures)

    def _sign(self, operand, op: str, scope: _Scope, enabled: bool) -> None:
        if enabled and isinstance(operand, ast.ColumnRef):
            table = scope.resolve(operand)
            self.out.predicate_signatures.add(f"{table}.{operand.column} {op}")

    def _atom(self, atom, scope: _Scope, signatures: bool) -> None:
        self.out.num_predicates += 1
        if isinstance(atom, ast.Comparison):
            self._operand(atom.left, scope)
            self._operand(atom.right, scope)
            self._sign(atom.left, atom.op, scope, signatures)
            self._sign(atom.right, _MIRROR[atom.op], scope, signatures)
        elif isinstance(atom, ast.Like):
            self._operand(atom.operand, scope)
            self._sign(atom.operand, "like", scope, signatures)
            if isinstance(atom.pattern, ast.Literal) and atom.pattern.kind == "string":
                if atom.pattern.text.startswith("%"):
                    self.out.has_like_leading_wildcard = True
        elif isinstance(atom, ast.InList):
            self._operand(atom.operand, scope)
            self._sign(atom.operand, "in", scope, signatures)
        elif isinstance(atom, ast.InSubquery):
            self._operand(atom.operand, scope)
            self._sign(atom.operand, "in", scope, signatures)
            self.out.num_subqueries += 1
            self._select(atom.query, scope)
        elif isinstance(atom, ast.Between):
            self._operand(atom.operand, scope)
            for bound in (atom.low, atom.high):
                self._operand(bound, scope)
            self._sign(atom.operand, "between", scope, signatures)
        elif isinstance(atom, ast.IsNull):
            self._operand(atom.operand, scope)
            self._sign(atom.operand, "is_null", scope, signatures)

    def _operand(self, operand, scope: _Scope) -> None:
        if isinstance(operand, ast.ColumnRef):
            self._field(operand, scope)
        elif isinstance(operand, ast.FuncCall):
            self.out.functions.add(operand.name)
            for arg in operand.args:
                self._operand(arg, scope)

    def _field(self, column: ast.ColumnRef, scope: _Scope) -> None:
        self.out.fields.add(f"{scope.resolve(column)}.{column.column}")


def extract_features(stmt: ast.Statement) -> QueryFeatures:
    """Deterministic feature map of one parsed statement."""
    extractor = _Extractor()
    extractor.statement(stmt)
    out = extractor.out
    out.statement_kind = stmt.kind
    out.num_tables = len(out.tables)
    return out


# --- canonical rendering (fingerprints) ------------------------------------


def _render_operand(operand) -> str:
    if isinstance(operand, ast.Literal):
        return "?"
    if isinstance(operand, ast.ColumnRef):
        return f"{operand.qualifier}.{operand.column}" if operand.qualifier else operand.column
    if isinstance(operand, ast.FuncCall):
        if operand.star:
            return f"{operand.name}(*)"
        return f"{operand.name}({', '.join(_render_operand(a) for a in operand.args)})"
    if isinstance(operand, ast.Star):
        return f"{operand.qualifier}.*" if operand.qualifier else "*"
    raise TypeError(operand)


def _render_condition(cond, parent_op: str | None = None) -> str:
    if isinstance(cond, ast.BoolOp):
        inner = f" {cond.op} ".join(_render_condition(p, cond.op) for p in cond.parts)
        # Parenthesize OR under AND (and anything under NOT, handled below).
        if parent_op == "and" and cond.op == "or":
            return f"({inner})"
        return inner
    if isinstance(cond, ast.Not):
        part = _render_condition(cond.part, "not")
        if isinstance(cond.part, (ast.BoolOp,)):
            part = f"({part})"
        return f"not {part}"
    if isinstance(cond, ast.Comparison):
        return f"{_render_operand(cond.left)} {cond.op} {_render_operand(cond.right)}"
    if isinstance(cond, ast.Like):
        middle = "not like" if cond.negated else "like"
        return f"{_render_operand(cond.operand)} {middle} {_render_operand(cond.pattern)}"
    if isinstance(cond, ast.InList):
        middle = "not in" if cond.negated else "in"
        return f"{_render_operand(cond.operand)} {middle} (?)"
    if isinstance(cond, ast.InSubquery):
        middle = "not in" if cond.negated else "in"
        return f"{_render_operand(cond.operand)} {middle} ({_render_select(cond.query)})"
    if isinstance(cond, ast.Between):
        middle = "not between" if cond.negated else "between"
        return f"{_render_operand(cond.operand)} {middle} ? and ?"
    if isinstance(cond, ast.IsNull):
        middle = "is not null" if cond.negated else "is null"
        return f"{_render_operand(cond.operand)} {middle}"
    raise TypeError(cond)


def _render_table_refs(stmt: ast.SelectStmt) -> str:
    joined = {join.table for join in stmt.joins}
    parts = []
    base = [ref for ref in stmt.tables if ref not in joined]
    parts.append(", ".join(_render_ref(ref) for ref in base))
    for join in stmt.joins:
        parts.append(
            f"{join.kind} join {_render_ref(join.table)} on {_render_condition(join.condition)}"
        )
    return " ".join(parts)


def _render_ref(ref: ast.TableRef) -> str:
    return f"{ref.name} as {ref.alias}" if ref.alias else ref.name


def _render_select(stmt: ast.SelectStmt) -> str:
    items = ", ".join(
        _render_operand(item.expr) + (f" as {item.alias}" if item.alias else "")
        for item in stmt.items
    )
    parts = ["select"]
    if stmt.distinct:
        parts.append("distinct")
    parts.append(items)
    parts.append("from " + _render_table_refs(stmt))
    if stmt.where is not None:
        parts.append("where " + _render_condition(stmt.where))
    if stmt.group_by:
        parts.append("group by " + ", ".join(_render_operand(c) for c in stmt.group_by))
        if stmt.having is not None:
            parts.append("having " + _render_condition(stmt.having))
    if stmt.order_by:
        rendered = [
            _render_operand(item.column) + (" desc" if item.descending else "")
            for item in stmt.order_by
        ]
        parts.append("order by " + ", ".join(rendered))
    if stmt.limit is not None or stmt.limit_is_param:
        parts.append("limit ?")
    return " ".join(parts)


def fingerprint(stmt: ast.Statement) -> str:
    """Literal-abstracted canonical template of a statement.

    Lowercased, whitespace-normalized, every literal replaced by ``?`` and
    IN lists collapsed to ``(?)``. Reparsing a fingerprint and fingerprinting
    again is a fixed point.
    """
    if isinstance(stmt, ast.SelectStmt):
        return _render_select(stmt)
    if isinstance(stmt, ast.InsertStmt):
        head = f"insert into {stmt.table.name}"
        if stmt.columns:
            head += " (" + ", ".join(_render_operand(c) for c in stmt.columns) + ")"
        if stmt.select is not None:
            return f"{head} {_render_select(stmt.select)}"
        rows = ", ".join("(" + ", ".join("?" for _ in row) + ")" for row in stmt.values)
        return f"{head} values {rows}"
    if isinstance(stmt, ast.UpdateStmt):
        sets = ", ".join(f"{_render_operand(c)} = {_render_operand(v)}" for c, v in stmt.assignments)
        out = f"update {_render_ref(stmt.table)} set {sets}"
        if stmt.where is not None:
            out += " where " + _render_condition(stmt.where)
        return out
    if isinstance(stmt, ast.DeleteStmt):
        out = f"delete from {_render_ref(stmt.table)}"
        if stmt.where is not None:
            out += " where " + _render_condition(stmt.where)
        return out
    raise TypeError(stmt)
