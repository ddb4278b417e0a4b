"""Recursive-descent parser for the supported SQL subset.

Supported statements: SELECT (DISTINCT, star or item list, FROM with commas
and INNER/LEFT/RIGHT JOIN ... ON, WHERE with AND/OR/NOT and parentheses,
GROUP BY with HAVING, ORDER BY, LIMIT), INSERT ... VALUES / INSERT ... SELECT,
UPDATE ... SET, DELETE FROM. Atomic predicates: comparisons (=, <>, <, <=,
>, >=), [NOT] LIKE, [NOT] IN (literal list or subquery), [NOT] BETWEEN,
IS [NOT] NULL. Operands are columns, literals (number, string, DATE/TIMESTAMP
strings, TRUE/FALSE/NULL, bind markers ? and :name) and function calls.
Anything else is a parse error carrying a byte offset and an expected-token
hint.
"""

from __future__ import annotations

from sqlscope.sql import ast
from sqlscope.sql.lexer import LexError, Token, TokenKind, tokenize

KEYWORDS = frozenset(
    """select distinct from where group by having order limit insert into values
    update set delete join inner left right outer on and or not like in between
    is null as asc desc true false date timestamp""".split()
)

COMPARISON_OPS = ("=", "<>", "<", "<=", ">", ">=")


class ParseError(Exception):
    """Syntax outside the subset, with position and an expected-token hint."""

    def __init__(self, message: str, offset: int, expected: str, source: str = ""):
        super().__init__(f"{message} at offset {offset} (expected {expected})")
        self.message = message
        self.offset = offset  # byte offset into the utf-8 encoded input
        self.expected = expected
        self.source = source


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def parse_sql(text: str) -> ast.Statement:
    """Parse one SQL statement (optionally semicolon-terminated)."""
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise ParseError(exc.message, _byte_offset(text, exc.pos), "valid token", text) from None
    return _Parser(text, tokens).parse_statement()


class _Parser:
    def __init__(self, source: str, tokens: list[Token]):
        self._source = source
        self._tokens = tokens
        self._pos = 0

    # --- token plumbing ---------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token:
        return self._tokens[min(self._pos + ahead, len(self._tokens) - 1)]

    def _advance(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind is not TokenKind.EOF:
            self._pos += 1
        return tok

    def _error(self, expected: str, token: Token | None = None):
        token = token or self._peek()
        what = f"unexpected {token.kind.value}" if token.kind is TokenKind.EOF else f"unexpected {token.text!r}"
        raise ParseError(what, _byte_offset(self._source, token.pos), expected, self._source)

    def _match_word(self, *words: str) -> bool:
        tok = self._peek()
        if tok.kind is TokenKind.IDENT and tok.text in words:
            self._advance()
            return True
        return False

    def _expect_word(self, word: str) -> None:
        if not self._match_word(word):
            self._error(word.upper())

    def _match_punct(self, text: str) -> bool:
        tok = self._peek()
        if tok.kind is TokenKind.PUNCT and tok.text == text:
            self._advance()
            return True
        return False

    def _expect_punct(self, text: str) -> None:
        if not self._match_punct(text):
            self._error(f"'{text}'")

    def _name(self, what: str) -> str:
        tok = self._peek()
        if tok.kind is not TokenKind.IDENT or tok.text in KEYWORDS:
            self._error(what)
        self._advance()
        return tok.text

    # --- statements -------------------------------------------------------

    def parse_statement(self) -> ast.Statement:
        tok = self._peek()
        if tok.is_word("select"):
            stmt = self._select()
        elif tok.is_word("insert"):
            stmt = self._insert()
        elif tok.is_word("update"):
            stmt = self._update()
        elif tok.is_word("delete"):
            stmt = self._delete()
        else:
            self._error("statement keyword (SELECT, INSERT, UPDATE or DELETE)")
        self._match_punct(";")
        if self._peek().kind is not TokenKind.EOF:
            self._error("end of statement")
        return stmt

    def _select(self) -> ast.SelectStmt:
        self._expect_word("select")
        distinct = self._match_word("distinct")
        items = self._select_items()
        self._expect_word("from")
        tables, joins = self._table_refs()
        where = self._where_clause()
        group_by: tuple = ()
        having = None
        if self._match_word("group"):
            self._expect_word("by")
            group_by = self._column_list()
            if self._match_word("having"):
                having = self._condition()
        order_by: tuple = ()
        if self._match_word("order"):
            self._expect_word("by")
            order_by = self._order_items()
        limit = None
        limit_is_param = False
        if self._match_word("limit"):
            tok = self._peek()
            if tok.kind is TokenKind.NUMBER and "." not in tok.text and "e" not in tok.text.lower():
                self._advance()
                limit = int(tok.text)
            elif tok.kind is TokenKind.PARAM:
                self._advance()
                limit_is_param = True
            else:
                self._error("integer limit")
        return ast.SelectStmt(
            distinct=distinct,
            items=items,
            tables=tables,
            joins=joins,
            where=where,
            group_by=group_by,
            having=having,
            order_by=order_by,
            limit=limit,
            limit_is_param=limit_is_param,
        )

    def _insert(self) -> ast.InsertStmt:
        self._expect_word("insert")
        self._expect_word("into")
        table = ast.TableRef(self._name("table name"))
        columns = None
        if self._match_punct("("):
            cols = [self._column_ref()]
            while self._match_punct(","):
                cols.append(self._column_ref())
            self._expect_punct(")")
            columns = tuple(cols)
        if self._match_word("values"):
            rows = [self._value_row()]
            while self._match_punct(","):
                rows.append(self._value_row())
            return ast.InsertStmt(table=table, columns=columns, values=tuple(rows))
        if self._peek().is_word("select"):
            return ast.InsertStmt(table=table, columns=columns, select=self._select())
        self._error("VALUES or SELECT")

    def _value_row(self) -> tuple:
        self._expect_punct("(")
        values = [self._operand()]
        while self._match_punct(","):
            values.append(self._operand())
        self._expect_punct(")")
        return tuple(values)

    def _update(self) -> ast.UpdateStmt:
        self._expect_word("update")
        table = self._table_ref()
        self._expect_word("set")
        assignments = [self._assignment()]
        while self._match_punct(","):
            assignments.append(self._assignment())
        where = self._where_clause()
        return ast.UpdateStmt(table=table, assignments=tuple(assignments), where=where)

    def _assignment(self) -> tuple:
        column = self._column_ref()
        self._expect_punct("=")
        return (column, self._operand())

    def _delete(self) -> ast.DeleteStmt:
        self._expect_word("delete")
        self._expect_word("from")
        table = self._table_ref()
        where = self._where_clause()
        return ast.DeleteStmt(table=table, where=where)

    def _where_clause(self):
        if self._match_word("where"):
            return self._condition()
        return None

    # --- FROM clause ------------------------------------------------------

    def _table_ref(self) -> ast.TableRef:
        name = self._name("table name")
        alias = None
        if self._match_word("as"):
            alias = self._name("alias")
        elif self._peek().kind is TokenKind.IDENT and self._peek().text not in KEYWORDS:
            alias = self._name("alias")
        return ast.TableRef(name, alias)

    def _table_refs(self) -> tuple[tuple, tuple]:
        tables = [self._table_ref()]
        joins: list[ast.Join] = []
        while True:
            if self._match_punct(","):
                tables.append(self._table_ref())
                continue
            kind = self._join_kind()
            if kind is None:
                break
            right = self._table_ref()
            self._expect_word("on")
            condition = self._condition()
            left = joins[-1].table if joins else tables[-1]
            joins.append(ast.Join(kind, left, right, condition))
            tables.append(right)
        return tuple(tables), tuple(joins)

    def _join_kind(self) -> str | None:
        if self._match_word("join"):
            return "inner"
        if self._match_word("inner"):
            self._expect_word("join")
            return "inner"
        for kind in ("left", "right"):
            if self._match_word(kind):
                self._match_word("outer")
                self._expect_word("join")
                return kind
        return None

    # --- conditions -------------------------------------------------------

    def _condition(self):
        parts = [self._and_condition()]
        while self._match_word("or"):
            parts.append(self._and_condition())
        return parts[0] if len(parts) == 1 else ast.BoolOp("or", tuple(parts))

    def _and_condition(self):
        parts = [self._not_condition()]
        while self._match_word("and"):
            parts.append(self._not_condition())
        return parts[0] if len(parts) == 1 else ast.BoolOp("and", tuple(parts))

    def _not_condition(self):
        if self._match_word("not"):
            return ast.Not(self._not_condition())
        if self._match_punct("("):
            inner = self._condition()
            self._expect_punct(")")
            return inner
        return self._predicate()

    def _predicate(self):
        operand = self._operand()
        negated = self._match_word("not")
        tok = self._peek()
        if tok.kind is TokenKind.PUNCT and tok.text in COMPARISON_OPS:
            if negated:
                self._error("LIKE, IN or BETWEEN after NOT")
            self._advance()
            return ast.Comparison(tok.text, operand, self._operand())
        if self._match_word("like"):
            return ast.Like(operand, self._operand(), negated)
        if self._match_word("in"):
            return self._in_predicate(operand, negated)
        if self._match_word("between"):
            low = self._operand()
            self._expect_word("and")
            return ast.Between(operand, low, self._operand(), negated)
        if self._match_word("is"):
            if negated:
                self._error("LIKE, IN or BETWEEN after NOT")
            is_negated = self._match_word("not")
            self._expect_word("null")
            return ast.IsNull(operand, is_negated)
        self._error("comparison operator, LIKE, IN, BETWEEN or IS")

    def _in_predicate(self, operand, negated: bool):
        self._expect_punct("(")
        if self._peek().is_word("select"):
            query = self._select()
            self._expect_punct(")")
            return ast.InSubquery(operand, query, negated)
        items = [self._literal("literal in IN list")]
        while self._match_punct(","):
            items.append(self._literal("literal in IN list"))
        self._expect_punct(")")
        return ast.InList(operand, tuple(items), negated)

    # --- operands ---------------------------------------------------------

    def _literal(self, what: str) -> ast.Literal:
        tok = self._peek()
        if tok.kind is TokenKind.NUMBER:
            self._advance()
            return ast.Literal("number", tok.text)
        if tok.kind is TokenKind.STRING:
            self._advance()
            return ast.Literal("string", tok.text)
        if tok.kind is TokenKind.PARAM:
            self._advance()
            return ast.Literal("param", tok.text)
        if tok.kind is TokenKind.PUNCT and tok.text == "-":
            nxt = self._peek(1)
            if nxt.kind is TokenKind.NUMBER:
                self._advance()
                self._advance()
                return ast.Literal("number", "-" + nxt.text)
        if tok.is_word("null"):
            self._advance()
            return ast.Literal("null")
        if tok.kind is TokenKind.IDENT and tok.text in ("true", "false"):
            self._advance()
            return ast.Literal("bool", tok.text)
        if tok.kind is TokenKind.IDENT and tok.text in ("date", "timestamp"):
            nxt = self._peek(1)
            if nxt.kind is TokenKind.STRING:
                self._advance()
                self._advance()
                return ast.Literal("date", nxt.text)
        self._error(what)

    def _operand(self):
        tok = self._peek()
        if tok.kind in (TokenKind.NUMBER, TokenKind.STRING, TokenKind.PARAM):
            return self._literal("operand")
        if tok.kind is TokenKind.PUNCT and tok.text == "-":
            return self._literal("operand")
        if tok.kind is TokenKind.IDENT:
            if tok.text in ("null", "true", "false"):
                return self._literal("operand")
            if tok.text in ("date", "timestamp") and self._peek(1).kind is TokenKind.STRING:
                return self._literal("operand")
            if tok.text in KEYWORDS:
                self._error("operand")
            # function call or column reference
            if self._peek(1).kind is TokenKind.PUNCT and self._peek(1).text == "(":
                return self._func_call()
            return self._column_ref()
        self._error("operand")

    def _func_call(self) -> ast.FuncCall:
        name = self._name("function name")
        self._expect_punct("(")
        if self._match_punct("*"):
            self._expect_punct(")")
            return ast.FuncCall(name, star=True)
        if self._match_punct(")"):
            return ast.FuncCall(name)
        args = [self._operand()]
        while self._match_punct(","):
            args.append(self._operand())
        self._expect_punct(")")
        return ast.FuncCall(name, tuple(args))

    def _column_ref(self) -> ast.ColumnRef:
        first = self._name("column name")
        if self._match_punct("."):
            return ast.ColumnRef(first, self._name("column name"))
        return ast.ColumnRef(None, first)

    # --- select list ------------------------------------------------------

    def _select_items(self) -> tuple:
        items = [self._select_item()]
        while self._match_punct(","):
            items.append(self._select_item())
        return tuple(items)

    def _select_item(self) -> ast.SelectItem:
        if self._match_punct("*"):
            return ast.SelectItem(ast.Star())
        tok = self._peek()
        # t.* is a qualified star
        if (
            tok.kind is TokenKind.IDENT
            and tok.text not in KEYWORDS
            and self._peek(1).kind is TokenKind.PUNCT
            and self._peek(1).text == "."
            and self._peek(2).kind is TokenKind.PUNCT
            and self._peek(2).text == "*"
        ):
            self._advance(), self._advance(), self._advance()
            return ast.SelectItem(ast.Star(tok.text))
        expr = self._operand()
        alias = None
        if self._match_word("as"):
            alias = self._name("alias")
        elif self._peek().kind is TokenKind.IDENT and self._peek().text not in KEYWORDS:
            alias = self._name("alias")
        return ast.SelectItem(expr, alias)

    def _column_list(self) -> tuple:
        cols = [self._column_ref()]
        while self._match_punct(","):
            cols.append(self._column_ref())
        return tuple(cols)

    def _order_items(self) -> tuple:
        items = []
        while True:
            column = self._column_ref()
            descending = False
            if self._match_word("desc"):
                descending = True
            else:
                self._match_word("asc")
            items.append(ast.OrderItem(column, descending))
            if not self._match_punct(","):
                break
        return tuple(items)
