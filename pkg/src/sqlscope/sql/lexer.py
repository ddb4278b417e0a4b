"""SQL tokenizer for the supported statement subset.

Strips comments, lowercases identifiers, and records the character offset of
every token so parse errors can point at the offending input. Keywords are
not distinguished here; the parser matches identifier text case-insensitively.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    IDENT = "identifier"
    NUMBER = "number"
    STRING = "string"
    PARAM = "parameter"
    PUNCT = "punctuation"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    pos: int  # character offset into the original input

    def is_word(self, word: str) -> bool:
        return self.kind is TokenKind.IDENT and self.text == word


class LexError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(message)
        self.message = message
        self.pos = pos


_PUNCT_TWO = ("<=", ">=", "<>")
_PUNCT_ONE = "()=<>,.*;-"

_IDENT_START = set("abcdefghijklmnopqrstuvwxyz_")
_IDENT_BODY = _IDENT_START | set("0123456789$")
_DIGITS = set("0123456789")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "-" and text.startswith("--", i):
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if c == "/" and text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated block comment", i)
            i = end + 2
            continue
        if c == "'":
            j = i + 1
            out = []
            while True:
                if j >= n:
                    raise LexError("unterminated string literal", i)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":  # '' escapes a quote
                        out.append("'")
                        j += 2
                        continue
                    break
                out.append(text[j])
                j += 1
            tokens.append(Token(TokenKind.STRING, "".join(out), i))
            i = j + 1
            continue
        if c == '"':
            j = i + 1
            out = []
            while True:
                if j >= n:
                    raise LexError("unterminated quoted identifier", i)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        out.append('"')
                        j += 2
                        continue
                    break
                out.append(text[j])
                j += 1
            tokens.append(Token(TokenKind.IDENT, "".join(out).lower(), i))
            i = j + 1
            continue
        if c == ":":
            j = i + 1
            if j >= n or text[j].lower() not in _IDENT_START:
                raise LexError("expected a name after ':'", i)
            while j < n and text[j].lower() in _IDENT_BODY:
                j += 1
            tokens.append(Token(TokenKind.PARAM, text[i:j].lower(), i))
            i = j
            continue
        if c in _DIGITS:
            j = i
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k >= n or text[k] not in _DIGITS:
                    raise LexError("malformed number literal", i)
                j = k
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j].lower() in _IDENT_START:
                raise LexError("malformed number literal", i)
            tokens.append(Token(TokenKind.NUMBER, text[i:j], i))
            i = j
            continue
        if c.lower() in _IDENT_START:
            j = i + 1
            while j < n and text[j].lower() in _IDENT_BODY:
                j += 1
            tokens.append(Token(TokenKind.IDENT, text[i:j].lower(), i))
            i = j
            continue
        two = text[i : i + 2]
        if two in _PUNCT_TWO:
            tokens.append(Token(TokenKind.PUNCT, two, i))
            i += 2
            continue
        if c == "?":
            tokens.append(Token(TokenKind.PARAM, "?", i))
            i += 1
            continue
        if c in _PUNCT_ONE:
            tokens.append(Token(TokenKind.PUNCT, c, i))
            i += 1
            continue
        raise LexError(f"unexpected character {c!r}", i)
    tokens.append(Token(TokenKind.EOF, "", n))
    return tokens
