"""Oracle execution and brute-force minimal-set tests."""

from __future__ import annotations

import pytest

from rex.notebook import Notebook, SourceCell
from rex.oracle import (
    MinimalSet,
    OracleCapExceeded,
    minimal_reaction_set,
    oracle_state,
    run_original,
    verify_minimality,
)
from rex.runtime import FreshEnvironment, Kernel, restore, snapshot, states_equal

ENV = FreshEnvironment()


def nb(*sources: str) -> Notebook:
    return Notebook([SourceCell(f"c{i}", s) for i, s in enumerate(sources, 1)])


MAP_APPEND = nb('x = {"a": [], "b": []}', 'x["a"].append(1)', "z = 123", "print(x)")
MAP_APPEND_MOD = MAP_APPEND.with_source("c2", 'x["b"].append(1)')
VAL_SWAP = nb("a = 9", "b = 5", "a, b = b, a", 'print("a:", a, "b:", b)')
VAL_SWAP_MOD = VAL_SWAP.with_source("c2", "b = 8")


class TestOracleState:
    def test_val_swap_expected_values(self):
        result = oracle_state(VAL_SWAP_MOD, ENV)
        assert result.state.bindings["a"] == 8
        assert result.state.bindings["b"] == 9
        assert result.outputs["c4"] == "a: 8 b: 9\n"

    def test_map_append_expected_values(self):
        from rex.minilang import format_value

        result = oracle_state(MAP_APPEND_MOD, ENV)
        x = result.state.bindings["x"]
        assert format_value(x, result.state.heap) == '{"a": [], "b": [1]}'
        assert result.state.bindings["z"] == 123

    def test_empty_notebook_is_fresh(self):
        from rex.runtime import fresh_state

        result = oracle_state(Notebook([]), ENV)
        assert states_equal(result.state, fresh_state(ENV))

    def test_deterministic(self):
        a, b = oracle_state(MAP_APPEND_MOD, ENV), oracle_state(MAP_APPEND_MOD, ENV)
        assert states_equal(a.state, b.state)


class TestMinimalSet:
    def test_val_swap_needs_all_four_cells(self):
        minimal = minimal_reaction_set(VAL_SWAP, VAL_SWAP_MOD, ENV)
        assert minimal.cells == ("c1", "c2", "c3", "c4")
        assert not minimal.requires_reset

    def test_map_append_excludes_unrelated_cell(self):
        minimal = minimal_reaction_set(MAP_APPEND, MAP_APPEND_MOD, ENV)
        assert minimal.cells == ("c1", "c2", "c4")

    def test_isolated_direct_edit(self):
        original = nb("z = 123", "w = 1")
        modified = original.with_source("c1", "z = 124")
        minimal = minimal_reaction_set(original, modified, ENV)
        assert minimal.cells == ("c1",)

    def test_executing_minimal_set_reproduces_oracle(self):
        oracle = oracle_state(VAL_SWAP_MOD, ENV)
        minimal = minimal_reaction_set(VAL_SWAP, VAL_SWAP_MOD, ENV)
        kernel = run_original(VAL_SWAP, ENV)
        resumed = Kernel(ENV, state=restore(snapshot(kernel.state)))
        for cid in minimal.cells:
            resumed.run_cell(VAL_SWAP_MOD.cell(cid))
        assert states_equal(resumed.state, oracle.state)

    def test_verify_minimality(self):
        minimal = minimal_reaction_set(MAP_APPEND, MAP_APPEND_MOD, ENV)
        assert verify_minimality(MAP_APPEND, MAP_APPEND_MOD, ENV, minimal)
        too_small = MinimalSet(cells=("c2",))
        assert not verify_minimality(MAP_APPEND, MAP_APPEND_MOD, ENV, too_small)

    def test_nonidempotent_append_requires_reset(self):
        original = nb("run = 1", 'file_append("log.txt", "alpha\\n")')
        modified = original.with_source("c2", 'file_append("log.txt", "beta\\n")')
        minimal = minimal_reaction_set(original, modified, ENV)
        assert minimal.requires_reset
        assert minimal.cells == ("c1", "c2")  # from fresh, both matter

    def test_idempotent_write_does_not_require_reset(self):
        original = nb("t = \"m1\"", 'file_write("conf", t)', "print(file_read(\"conf\"))")
        modified = original.with_source("c1", 't = "m2"')
        minimal = minimal_reaction_set(original, modified, ENV)
        assert not minimal.requires_reset
        assert minimal.cells == ("c1", "c2", "c3")

    def test_cap_enforced(self):
        cells = [SourceCell(f"c{i}", f"v{i} = {i}") for i in range(13)]
        original = Notebook(cells)
        modified = original.with_source("c0", "v0 = 99")
        with pytest.raises(OracleCapExceeded):
            minimal_reaction_set(original, modified, ENV)

    def test_deterministic_tie_break(self):
        # two equally sized sufficient subsets: positions break the tie
        original = nb("a = 1", "b = 1", "print(a + b)")
        modified = original.with_source("c1", "a = 2")
        first = minimal_reaction_set(original, modified, ENV)
        second = minimal_reaction_set(original, modified, ENV)
        assert first == second
        assert first.cells == ("c1", "c3")
