"""AST node definitions and the canonical source form.

Nodes compare structurally: source positions are carried for error
reporting but excluded from equality, so ``parse(to_source(p)) == p``
holds for every parsed program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


def _pos_field() -> Pos:
    return Pos(0, 0)


@dataclass
class Node:
    pos: Pos = field(default_factory=_pos_field, compare=False, repr=False)


# --- expressions ---


@dataclass
class IntLit(Node):
    value: int = 0


@dataclass
class FloatLit(Node):
    value: float = 0.0


@dataclass
class TextLit(Node):
    value: str = ""


@dataclass
class BoolLit(Node):
    value: bool = False


@dataclass
class NoneLit(Node):
    pass


@dataclass
class Name(Node):
    id: str = ""


@dataclass
class ListDisplay(Node):
    items: list[Expr] = field(default_factory=list)


@dataclass
class MapDisplay(Node):
    entries: list[tuple[Expr, Expr]] = field(default_factory=list)


@dataclass
class Subscript(Node):
    base: Expr = None  # type: ignore[assignment]
    index: Expr = None  # type: ignore[assignment]


@dataclass
class Call(Node):
    callee: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class MethodCall(Node):
    receiver: Expr = None  # type: ignore[assignment]
    method: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class BinOp(Node):
    op: str = ""
    left: Expr = None  # type: ignore[assignment]
    right: Expr = None  # type: ignore[assignment]


@dataclass
class BoolOp(Node):
    op: str = ""  # "and" | "or"
    left: Expr = None  # type: ignore[assignment]
    right: Expr = None  # type: ignore[assignment]


@dataclass
class UnaryOp(Node):
    op: str = ""  # "-" | "not"
    operand: Expr = None  # type: ignore[assignment]


Expr = Union[
    IntLit,
    FloatLit,
    TextLit,
    BoolLit,
    NoneLit,
    Name,
    ListDisplay,
    MapDisplay,
    Subscript,
    Call,
    MethodCall,
    BinOp,
    BoolOp,
    UnaryOp,
]


# --- statements ---


@dataclass
class Assign(Node):
    """Covers plain, tuple, and subscript assignment; targets and values
    always have equal length."""

    targets: list[Expr] = field(default_factory=list)  # Name or Subscript
    values: list[Expr] = field(default_factory=list)


@dataclass
class ExprStmt(Node):
    expr: Expr = None  # type: ignore[assignment]


@dataclass
class FuncDef(Node):
    name: str = ""
    params: list[str] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)


@dataclass
class If(Node):
    cond: Expr = None  # type: ignore[assignment]
    then_body: list[Stmt] = field(default_factory=list)
    else_body: list[Stmt] = field(default_factory=list)


@dataclass
class For(Node):
    var: str = ""
    iterable: Expr = None  # type: ignore[assignment]
    body: list[Stmt] = field(default_factory=list)


@dataclass
class Return(Node):
    value: Expr | None = None


Stmt = Union[Assign, ExprStmt, FuncDef, If, For, Return]


@dataclass
class Program:
    statements: list[Stmt] = field(default_factory=list)


# --- canonical form ---

_TEXT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n"}


def quote_text(s: str) -> str:
    return '"' + "".join(_TEXT_ESCAPES.get(ch, ch) for ch in s) + '"'


def expr_to_source(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, FloatLit):
        return repr(e.value)
    if isinstance(e, TextLit):
        return quote_text(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NoneLit):
        return "none"
    if isinstance(e, Name):
        return e.id
    if isinstance(e, ListDisplay):
        return "[" + ", ".join(expr_to_source(x) for x in e.items) + "]"
    if isinstance(e, MapDisplay):
        inner = ", ".join(
            f"{expr_to_source(k)}: {expr_to_source(v)}" for k, v in e.entries
        )
        return "{" + inner + "}"
    if isinstance(e, Subscript):
        return f"{expr_to_source(e.base)}[{expr_to_source(e.index)}]"
    if isinstance(e, Call):
        return f"{e.callee}(" + ", ".join(expr_to_source(a) for a in e.args) + ")"
    if isinstance(e, MethodCall):
        args = ", ".join(expr_to_source(a) for a in e.args)
        return f"{expr_to_source(e.receiver)}.{e.method}({args})"
    if isinstance(e, BinOp):
        return f"({expr_to_source(e.left)} {e.op} {expr_to_source(e.right)})"
    if isinstance(e, BoolOp):
        return f"({expr_to_source(e.left)} {e.op} {expr_to_source(e.right)})"
    if isinstance(e, UnaryOp):
        if e.op == "not":
            return f"(not {expr_to_source(e.operand)})"
        return f"({e.op}{expr_to_source(e.operand)})"
    raise TypeError(f"unknown expression node: {e!r}")


def _block_to_source(body: list[Stmt], indent: int) -> str:
    pad = "    " * (indent + 1)
    lines = []
    for stmt in body:
        lines.append(pad + stmt_to_source(stmt, indent + 1))
    inner = "\n".join(lines)
    close = "    " * indent + "}"
    if not lines:
        return "{\n" + close
    return "{\n" + inner + "\n" + close


def stmt_to_source(s: Stmt, indent: int = 0) -> str:
    if isinstance(s, Assign):
        lhs = ", ".join(expr_to_source(t) for t in s.targets)
        rhs = ", ".join(expr_to_source(v) for v in s.values)
        return f"{lhs} = {rhs}"
    if isinstance(s, ExprStmt):
        return expr_to_source(s.expr)
    if isinstance(s, FuncDef):
        params = ", ".join(s.params)
        return f"def {s.name}({params}) " + _block_to_source(s.body, indent)
    if isinstance(s, If):
        text = f"if {expr_to_source(s.cond)} " + _block_to_source(s.then_body, indent)
        if s.else_body:
            text += " else " + _block_to_source(s.else_body, indent)
        return text
    if isinstance(s, For):
        return (
            f"for {s.var} in {expr_to_source(s.iterable)} "
            + _block_to_source(s.body, indent)
        )
    if isinstance(s, Return):
        if s.value is None:
            return "return"
        return f"return {expr_to_source(s.value)}"
    raise TypeError(f"unknown statement node: {s!r}")


def to_source(p: Program) -> str:
    """Render a program in its unambiguous canonical form."""
    return "\n".join(stmt_to_source(s) for s in p.statements)
