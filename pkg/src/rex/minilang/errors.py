"""Positioned errors raised by the lexer and parser."""

from __future__ import annotations


class LangError(Exception):
    """Base for positioned language errors."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


class LexError(LangError):
    pass


class ParseError(LangError):
    pass


class MiniRuntimeError(Exception):
    """Raised during interpretation; caught at the cell boundary."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message
