"""Recursive-descent parser producing a Program from one cell body.

Grammar sketch (statements are newline-terminated, blocks use braces):

    program    := statement*
    statement  := funcdef | if | for | return | assign-or-expr
    funcdef    := "def" NAME "(" params ")" block          (top level only)
    if         := "if" expr block ("else" (block | if))?
    for        := "for" NAME "in" expr block
    return     := "return" [expr]                          (function body only)
    assign     := target ("," target)* "=" expr ("," expr)*
    target     := NAME | postfix-subscript

Expression precedence, loosest first: or, and, not, comparison,
additive, multiplicative, unary minus, postfix (call / subscript /
method call), primary.
"""

from __future__ import annotations

from . import nodes as n
from .errors import ParseError
from .lexer import Token, tokenize

_COMPARE_OPS = {"==", "!=", "<", "<=", ">", ">="}
_ADD_OPS = {"+", "-"}
_MUL_OPS = {"*", "/", "%"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token helpers --

    def peek(self) -> Token:
        return self.tokens[self.i]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of input" if tok.kind == "EOF" else repr(tok.value)
            raise ParseError(
                f"expected {what or kind}, found {found}", tok.line, tok.col
            )
        return self.advance()

    def skip_newlines(self) -> None:
        while self.at("NEWLINE"):
            self.advance()

    def end_statement(self) -> None:
        if self.at("EOF") or self.at("}"):
            return
        self.expect("NEWLINE", "end of statement")

    def pos(self, tok: Token) -> n.Pos:
        return n.Pos(tok.line, tok.col)

    # -- statements --

    def parse_program(self) -> n.Program:
        stmts: list[n.Stmt] = []
        self.skip_newlines()
        while not self.at("EOF"):
            stmts.append(self.statement(in_function=False, top_level=True))
            self.skip_newlines()
        return n.Program(stmts)

    def statement(self, in_function: bool, top_level: bool) -> n.Stmt:
        tok = self.peek()
        if tok.kind == "def":
            if not top_level:
                raise ParseError(
                    "function definitions are only allowed at cell top level",
                    tok.line,
                    tok.col,
                )
            return self.funcdef()
        if tok.kind == "if":
            return self.if_statement(in_function)
        if tok.kind == "for":
            return self.for_statement(in_function)
        if tok.kind == "return":
            if not in_function:
                raise ParseError(
                    "return outside of a function", tok.line, tok.col
                )
            return self.return_statement()
        return self.assign_or_expr()

    def block(self, in_function: bool) -> list[n.Stmt]:
        self.expect("{", "'{'")
        self.skip_newlines()
        body: list[n.Stmt] = []
        while not self.at("}"):
            if self.at("EOF"):
                tok = self.peek()
                raise ParseError("unterminated block", tok.line, tok.col)
            body.append(self.statement(in_function, top_level=False))
            self.skip_newlines()
        self.expect("}")
        return body

    def funcdef(self) -> n.FuncDef:
        tok = self.advance()  # def
        name = self.expect("NAME", "function name")
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            params.append(str(self.expect("NAME", "parameter name").value))
            while self.at(","):
                self.advance()
                params.append(str(self.expect("NAME", "parameter name").value))
        self.expect(")")
        if len(set(params)) != len(params):
            raise ParseError("duplicate parameter name", tok.line, tok.col)
        body = self.block(in_function=True)
        self.end_statement()
        return n.FuncDef(self.pos(tok), str(name.value), params, body)

    def if_statement(self, in_function: bool, nested: bool = False) -> n.If:
        tok = self.advance()  # if
        cond = self.expression()
        then_body = self.block(in_function)
        else_body: list[n.Stmt] = []
        if self.at("else"):
            self.advance()
            if self.at("if"):
                else_body = [self.if_statement(in_function, nested=True)]
            else:
                else_body = self.block(in_function)
        if not nested:
            self.end_statement()
        return n.If(self.pos(tok), cond, then_body, else_body)

    def for_statement(self, in_function: bool) -> n.For:
        tok = self.advance()  # for
        var = self.expect("NAME", "loop variable")
        self.expect("in", "'in'")
        iterable = self.expression()
        body = self.block(in_function)
        self.end_statement()
        return n.For(self.pos(tok), str(var.value), iterable, body)

    def return_statement(self) -> n.Return:
        tok = self.advance()  # return
        value: n.Expr | None = None
        if not (self.at("NEWLINE") or self.at("}") or self.at("EOF")):
            value = self.expression()
        self.end_statement()
        return n.Return(self.pos(tok), value)

    def assign_or_expr(self) -> n.Stmt:
        tok = self.peek()
        first = self.expression()
        if self.at(",") or self.at("="):
            targets = [first]
            while self.at(","):
                self.advance()
                targets.append(self.expression())
            eq = self.expect("=", "'='")
            for t in targets:
                if not isinstance(t, (n.Name, n.Subscript)):
                    raise ParseError(
                        "assignment target must be a name or subscript",
                        eq.line,
                        eq.col,
                    )
            values = [self.expression()]
            while self.at(","):
                self.advance()
                values.append(self.expression())
            if len(values) != len(targets):
                raise ParseError(
                    f"unbalanced assignment: {len(targets)} targets, "
                    f"{len(values)} values",
                    eq.line,
                    eq.col,
                )
            self.end_statement()
            return n.Assign(self.pos(tok), targets, values)
        self.end_statement()
        return n.ExprStmt(self.pos(tok), first)

    # -- expressions --

    def expression(self) -> n.Expr:
        return self.or_expr()

    def or_expr(self) -> n.Expr:
        left = self.and_expr()
        while self.at("or"):
            tok = self.advance()
            left = n.BoolOp(self.pos(tok), "or", left, self.and_expr())
        return left

    def and_expr(self) -> n.Expr:
        left = self.not_expr()
        while self.at("and"):
            tok = self.advance()
            left = n.BoolOp(self.pos(tok), "and", left, self.not_expr())
        return left

    def not_expr(self) -> n.Expr:
        if self.at("not"):
            tok = self.advance()
            return n.UnaryOp(self.pos(tok), "not", self.not_expr())
        return self.comparison()

    def comparison(self) -> n.Expr:
        left = self.additive()
        while self.peek().kind in _COMPARE_OPS:
            tok = self.advance()
            left = n.BinOp(self.pos(tok), tok.kind, left, self.additive())
        return left

    def additive(self) -> n.Expr:
        left = self.multiplicative()
        while self.peek().kind in _ADD_OPS:
            tok = self.advance()
            left = n.BinOp(self.pos(tok), tok.kind, left, self.multiplicative())
        return left

    def multiplicative(self) -> n.Expr:
        left = self.unary()
        while self.peek().kind in _MUL_OPS:
            tok = self.advance()
            left = n.BinOp(self.pos(tok), tok.kind, left, self.unary())
        return left

    def unary(self) -> n.Expr:
        if self.at("-"):
            tok = self.advance()
            return n.UnaryOp(self.pos(tok), "-", self.unary())
        return self.postfix()

    def postfix(self) -> n.Expr:
        expr = self.primary()
        while True:
            if self.at("["):
                tok = self.advance()
                index = self.expression()
                self.expect("]", "']'")
                expr = n.Subscript(self.pos(tok), expr, index)
            elif self.at("."):
                tok = self.advance()
                method = self.expect("NAME", "method name")
                self.expect("(", "'(' after method name")
                args = self.call_args()
                expr = n.MethodCall(
                    self.pos(tok), expr, str(method.value), args
                )
            elif self.at("(") and isinstance(expr, n.Name):
                self.advance()
                args = self.call_args()
                expr = n.Call(expr.pos, expr.id, args)
            else:
                return expr

    def call_args(self) -> list[n.Expr]:
        args: list[n.Expr] = []
        if not self.at(")"):
            args.append(self.expression())
            while self.at(","):
                self.advance()
                args.append(self.expression())
        self.expect(")", "')'")
        return args

    def primary(self) -> n.Expr:
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return n.IntLit(self.pos(tok), int(tok.value))  # type: ignore[arg-type]
        if tok.kind == "FLOAT":
            self.advance()
            return n.FloatLit(self.pos(tok), float(tok.value))  # type: ignore[arg-type]
        if tok.kind == "TEXT":
            self.advance()
            return n.TextLit(self.pos(tok), str(tok.value))
        if tok.kind == "true":
            self.advance()
            return n.BoolLit(self.pos(tok), True)
        if tok.kind == "false":
            self.advance()
            return n.BoolLit(self.pos(tok), False)
        if tok.kind == "none":
            self.advance()
            return n.NoneLit(self.pos(tok))
        if tok.kind == "NAME":
            self.advance()
            return n.Name(self.pos(tok), str(tok.value))
        if tok.kind == "(":
            self.advance()
            inner = self.expression()
            self.expect(")", "')'")
            return inner
        if tok.kind == "[":
            self.advance()
            items: list[n.Expr] = []
            if not self.at("]"):
                items.append(self.expression())
                while self.at(","):
                    self.advance()
                    items.append(self.expression())
            self.expect("]", "']'")
            return n.ListDisplay(self.pos(tok), items)
        if tok.kind == "{":
            self.advance()
            entries: list[tuple[n.Expr, n.Expr]] = []
            if not self.at("}"):
                entries.append(self.map_entry())
                while self.at(","):
                    self.advance()
                    entries.append(self.map_entry())
            self.expect("}", "'}'")
            return n.MapDisplay(self.pos(tok), entries)
        found = "end of input" if tok.kind == "EOF" else repr(tok.value)
        raise ParseError(f"expected an expression, found {found}", tok.line, tok.col)

    def map_entry(self) -> tuple[n.Expr, n.Expr]:
        key = self.expression()
        self.expect(":", "':'")
        value = self.expression()
        return key, value


def parse_cell(source: str) -> n.Program:
    """Parse one cell body into a Program; raises LexError/ParseError."""
    return _Parser(tokenize(source)).parse_program()
