"""Lexer, parser, and canonical form tests."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rex.minilang import LexError, ParseError, parse_cell, to_source, tokenize
from rex.minilang import nodes as n


def toks(source: str) -> list[tuple[str, object]]:
    return [
        (t.kind, t.value)
        for t in tokenize(source)
        if t.kind not in ("NEWLINE", "EOF")
    ]


class TestTokenize:
    def test_simple_assignment(self):
        assert toks("a = 9") == [("NAME", "a"), ("=", "="), ("INT", 9)]

    def test_empty_input(self):
        assert toks("") == []

    def test_subscript_method_call(self):
        assert toks('x["a"].append(1)') == [
            ("NAME", "x"),
            ("[", "["),
            ("TEXT", "a"),
            ("]", "]"),
            (".", "."),
            ("NAME", "append"),
            ("(", "("),
            ("INT", 1),
            (")", ")"),
        ]

    def test_comments_and_whitespace_discarded(self):
        assert toks("a = 1  # trailing comment") == [
            ("NAME", "a"),
            ("=", "="),
            ("INT", 1),
        ]

    def test_positions_retained(self):
        tokens = tokenize("a = 1\nbb = 2")
        named = [t for t in tokens if t.kind == "NAME"]
        assert (named[0].line, named[0].col) == (1, 1)
        assert (named[1].line, named[1].col) == (2, 1)

    def test_float_and_operators(self):
        assert toks("y = 1.5 <= 2") == [
            ("NAME", "y"),
            ("=", "="),
            ("FLOAT", 1.5),
            ("<=", "<="),
            ("INT", 2),
        ]

    def test_text_escapes(self):
        assert toks('s = "a\\n\\"b\\\\"') == [
            ("NAME", "s"),
            ("=", "="),
            ("TEXT", 'a\n"b\\'),
        ]

    def test_unterminated_text(self):
        with pytest.raises(LexError):
            tokenize('s = "oops')

    def test_illegal_character(self):
        with pytest.raises(LexError) as err:
            tokenize("a = 1 @ 2")
        assert err.value.line == 1

    def test_newlines_suppressed_inside_brackets(self):
        kinds = [t.kind for t in tokenize("x = [1,\n 2]")]
        assert kinds.count("NEWLINE") == 1


class TestParse:
    def test_tuple_assignment(self):
        program = parse_cell("a, b = b, a")
        assert len(program.statements) == 1
        stmt = program.statements[0]
        assert isinstance(stmt, n.Assign)
        assert [t.id for t in stmt.targets] == ["a", "b"]
        assert [v.id for v in stmt.values] == ["b", "a"]

    def test_single_assignment(self):
        program = parse_cell("z = 123")
        assert len(program.statements) == 1
        stmt = program.statements[0]
        assert isinstance(stmt, n.Assign)
        assert stmt.targets[0].id == "z"
        assert stmt.values[0].value == 123

    def test_dangling_assignment_is_error(self):
        with pytest.raises(ParseError):
            parse_cell("a =")

    def test_unbalanced_tuple_assignment(self):
        with pytest.raises(ParseError):
            parse_cell("a, b = 1")

    def test_subscript_target_chain(self):
        program = parse_cell('x["a"][0] = 5')
        stmt = program.statements[0]
        target = stmt.targets[0]
        assert isinstance(target, n.Subscript)
        assert isinstance(target.base, n.Subscript)
        assert target.base.base.id == "x"

    def test_blocks_and_else_if(self):
        program = parse_cell(
            'if a > 1 { b = 1 } else if a > 0 { b = 2 } else { b = 3 }'
        )
        stmt = program.statements[0]
        assert isinstance(stmt, n.If)
        assert isinstance(stmt.else_body[0], n.If)

    def test_function_definition(self):
        program = parse_cell("def f(a, b) {\n  return a + b\n}")
        stmt = program.statements[0]
        assert isinstance(stmt, n.FuncDef)
        assert stmt.params == ["a", "b"]

    def test_def_only_at_top_level(self):
        with pytest.raises(ParseError):
            parse_cell("if x { def f() { } }")

    def test_return_outside_function(self):
        with pytest.raises(ParseError):
            parse_cell("return 1")

    def test_invalid_target(self):
        with pytest.raises(ParseError):
            parse_cell("f(x) = 2")

    def test_map_display_and_for(self):
        program = parse_cell('m = {"a": 1, 2: "b"}\nfor k in m.keys() { print(k) }')
        assert isinstance(program.statements[0].values[0], n.MapDisplay)
        assert isinstance(program.statements[1], n.For)

    def test_deterministic(self):
        src = 'x = {"a": [], "b": []}\nx["a"].append(1)\nprint(x)'
        assert parse_cell(src) == parse_cell(src)


class TestCanonicalForm:
    def test_round_trip_examples(self):
        sources = [
            "a, b = b, a",
            "z = 123",
            'x = {"a": [], "b": [1]}',
            'x["a"].append(1)',
            "def f(v) {\n    return v * 2\n}",
            "if a > 5 { kind = \"big\" } else { kind = \"small\" }",
            "for i in range(3) { total = total + i }",
            'print("a:", a, "b:", b)',
            "y = -x + 2 * (3 - 1)",
            "ok = not (a and b) or c == none",
        ]
        for src in sources:
            program = parse_cell(src)
            assert parse_cell(to_source(program)) == program, src


# -- property: parse(to_source(p)) == p over generated programs --

_names = st.sampled_from(["a", "b", "c", "x", "y", "total", "buf"])


def _exprs():
    leaves = st.one_of(
        st.integers(min_value=0, max_value=999).map(lambda v: n.IntLit(value=v)),
        st.sampled_from([0.5, 1.0, 2.25, 10.125]).map(lambda v: n.FloatLit(value=v)),
        st.text(alphabet="ab c", max_size=5).map(lambda v: n.TextLit(value=v)),
        st.booleans().map(lambda v: n.BoolLit(value=v)),
        st.just(n.NoneLit()),
        _names.map(lambda v: n.Name(id=v)),
    )

    def extend(children):
        return st.one_of(
            st.lists(children, max_size=3).map(lambda xs: n.ListDisplay(items=xs)),
            st.lists(
                st.tuples(st.sampled_from(["k1", "k2"]).map(
                    lambda v: n.TextLit(value=v)), children),
                max_size=2,
                unique_by=lambda kv: kv[0].value,
            ).map(lambda es: n.MapDisplay(entries=es)),
            st.tuples(children, children).map(
                lambda p: n.BinOp(op="+", left=p[0], right=p[1])
            ),
            st.tuples(children, children).map(
                lambda p: n.BoolOp(op="and", left=p[0], right=p[1])
            ),
            st.tuples(_names, children).map(
                lambda p: n.Subscript(base=n.Name(id=p[0]), index=p[1])
            ),
            children.map(lambda e: n.UnaryOp(op="not", operand=e)),
        )

    return st.recursive(leaves, extend, max_leaves=6)


def _stmts():
    return st.one_of(
        st.tuples(_names, _exprs()).map(
            lambda p: n.Assign(targets=[n.Name(id=p[0])], values=[p[1]])
        ),
        _exprs().map(lambda e: n.ExprStmt(expr=e)),
        st.tuples(_exprs(), st.lists(
            st.tuples(_names, _exprs()).map(
                lambda p: n.Assign(targets=[n.Name(id=p[0])], values=[p[1]])
            ),
            min_size=1,
            max_size=2,
        )).map(lambda p: n.If(cond=p[0], then_body=p[1], else_body=[])),
    )


@settings(max_examples=120, deadline=None)
@given(st.lists(_stmts(), max_size=4).map(lambda ss: n.Program(statements=ss)))
def test_canonical_form_round_trips(program):
    assert parse_cell(to_source(program)) == program
