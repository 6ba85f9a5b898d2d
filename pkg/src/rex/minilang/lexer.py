"""Tokenizer for the cell language.

Comments (``#`` to end of line) and whitespace are discarded. Newlines
terminate statements except inside parentheses or square brackets; brace
blocks keep their newlines so statements inside a block stay separated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = {
    "def",
    "if",
    "else",
    "for",
    "in",
    "return",
    "and",
    "or",
    "not",
    "true",
    "false",
    "none",
}

_TWO_CHAR_OPS = {"==", "!=", "<=", ">="}
_ONE_CHAR_OPS = set("=,()[]{}.+-*/%<>:")


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, FLOAT, TEXT, NEWLINE, EOF, keyword, or operator text
    value: object
    line: int
    col: int

    def __repr__(self) -> str:  # compact for test failures
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def _is_name_first(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_name_rest(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.bracket_depth = 0  # ( and [ only

    def error(self, message: str) -> LexError:
        return LexError(message, self.line, self.col)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.src[i] if i < len(self.src) else ""

    def advance(self) -> str:
        c = self.src[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def add(self, kind: str, value: object, line: int, col: int) -> None:
        self.tokens.append(Token(kind, value, line, col))

    def run(self) -> list[Token]:
        while self.pos < len(self.src):
            c = self.peek()
            line, col = self.line, self.col
            if c == "#":
                while self.pos < len(self.src) and self.peek() != "\n":
                    self.advance()
                continue
            if c == "\n":
                self.advance()
                if self.bracket_depth == 0:
                    if self.tokens and self.tokens[-1].kind != "NEWLINE":
                        self.add("NEWLINE", "\n", line, col)
                continue
            if c.isspace():
                self.advance()
                continue
            if _is_name_first(c):
                self.lex_name(line, col)
                continue
            if c.isdigit():
                self.lex_number(line, col)
                continue
            if c == '"':
                self.lex_text(line, col)
                continue
            two = self.peek() + self.peek(1)
            if two in _TWO_CHAR_OPS:
                self.advance()
                self.advance()
                self.add(two, two, line, col)
                continue
            if c in _ONE_CHAR_OPS:
                self.advance()
                if c in "([":
                    self.bracket_depth += 1
                elif c in ")]":
                    self.bracket_depth = max(0, self.bracket_depth - 1)
                self.add(c, c, line, col)
                continue
            raise self.error(f"illegal character {c!r}")
        if self.tokens and self.tokens[-1].kind != "NEWLINE":
            self.add("NEWLINE", "\n", self.line, self.col)
        self.add("EOF", None, self.line, self.col)
        return self.tokens

    def lex_name(self, line: int, col: int) -> None:
        start = self.pos
        while self.pos < len(self.src) and _is_name_rest(self.peek()):
            self.advance()
        word = self.src[start : self.pos]
        if word in KEYWORDS:
            self.add(word, word, line, col)
        else:
            self.add("NAME", word, line, col)

    def lex_number(self, line: int, col: int) -> None:
        start = self.pos
        while self.pos < len(self.src) and self.peek().isdigit():
            self.advance()
        is_float = False
        if self.peek() == "." and self.peek(1).isdigit():
            is_float = True
            self.advance()
            while self.pos < len(self.src) and self.peek().isdigit():
                self.advance()
        word = self.src[start : self.pos]
        if is_float:
            self.add("FLOAT", float(word), line, col)
        else:
            self.add("INT", int(word), line, col)

    def lex_text(self, line: int, col: int) -> None:
        self.advance()  # opening quote
        out: list[str] = []
        while True:
            if self.pos >= len(self.src) or self.peek() == "\n":
                raise LexError("unterminated text literal", line, col)
            c = self.advance()
            if c == '"':
                break
            if c == "\\":
                if self.pos >= len(self.src):
                    raise LexError("unterminated text literal", line, col)
                esc = self.advance()
                if esc == "n":
                    out.append("\n")
                elif esc == '"':
                    out.append('"')
                elif esc == "\\":
                    out.append("\\")
                else:
                    raise LexError(f"unknown escape \\{esc}", line, col)
            else:
                out.append(c)
        self.add("TEXT", "".join(out), line, col)


def tokenize(source: str) -> list[Token]:
    """Tokenize one cell body; the trailing EOF token is always present."""
    return _Lexer(source).run()
