"""Lexer, parser, AST, and value model for the cell language."""

from .errors import LangError, LexError, MiniRuntimeError, ParseError
from .lexer import Token, tokenize
from .nodes import Program, to_source
from .parser import parse_cell
from .values import (
    FunctionVal,
    Heap,
    HeapList,
    HeapMap,
    ObjectId,
    ObjRef,
    Value,
    display_value,
    format_value,
)

__all__ = [
    "LangError",
    "LexError",
    "MiniRuntimeError",
    "ParseError",
    "Token",
    "tokenize",
    "Program",
    "to_source",
    "parse_cell",
    "FunctionVal",
    "Heap",
    "HeapList",
    "HeapMap",
    "ObjectId",
    "ObjRef",
    "Value",
    "display_value",
    "format_value",
]
