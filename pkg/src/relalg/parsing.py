"""Shared lexer plumbing for the term and formula surface syntaxes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NoReturn, Sequence


class ParseError(ValueError):
    """Malformed source text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "int", "op", or "end"
    text: str
    line: int
    column: int


def tokenize(source: str, operators: Sequence[str]) -> list[Token]:
    """Split *source* into name, integer, and operator tokens.

    Longest operators match first, so multi-character operators never get
    shadowed by their prefixes.
    """
    ops = sorted(operators, key=len, reverse=True)
    tokens: list[Token] = []
    line, column = 1, 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            column += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("name", source[i:j], line, column))
            column += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, column))
            column += j - i
            i = j
            continue
        for op in ops:
            if source.startswith(op, i):
                tokens.append(Token("op", op, line, column))
                column += len(op)
                i += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, column)
    tokens.append(Token("end", "", line, column))
    return tokens


class TokenStream:
    """Cursor over a token list with uniform error reporting."""

    def __init__(self, tokens: list[Token]) -> None:
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> Token:
        return self._tokens[self._pos]

    def advance(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind != "end":
            self._pos += 1
        return tok

    def match(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind != "end" and tok.text == text:
            self._pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "end" or tok.text != text:
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {got}", tok.line, tok.column)
        self._pos += 1
        return tok

    def expect_name(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "name":
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {what}, found {got}", tok.line, tok.column)
        self._pos += 1
        return tok.text

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)

    def fail(self, message: str) -> NoReturn:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)
