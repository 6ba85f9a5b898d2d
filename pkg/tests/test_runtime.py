"""Interpreter, tracing, snapshot/restore, and state equality tests."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from rex.minilang import format_value
from rex.notebook import SourceCell
from rex.runtime import (
    FreshEnvironment,
    Kernel,
    execute_cell,
    fresh_state,
    restore,
    snapshot,
    state_digest,
    states_equal,
)

ENV = FreshEnvironment()


def run_cells(*sources: str, env: FreshEnvironment = ENV) -> Kernel:
    kernel = Kernel(env)
    for i, src in enumerate(sources, start=1):
        kernel.run_cell(SourceCell(f"c{i}", src))
    return kernel


class TestFormatValue:
    def test_scalars(self):
        state = fresh_state(ENV)
        assert format_value(9, state.heap) == "9"
        assert format_value(2.5, state.heap) == "2.5"
        assert format_value(True, state.heap) == "true"
        assert format_value(None, state.heap) == "none"
        assert format_value("a\nb", state.heap) == '"a\\nb"'

    def test_mapping_insertion_order(self):
        kernel = run_cells('x = {"a": [], "b": [1]}')
        ref = kernel.state.bindings["x"]
        assert format_value(ref, kernel.state.heap) == '{"a": [], "b": [1]}'

    def test_nested_list(self):
        kernel = run_cells("v = [1, [2]]")
        ref = kernel.state.bindings["v"]
        assert format_value(ref, kernel.state.heap) == "[1, [2]]"

    def test_injective_on_text_vs_int(self):
        state = fresh_state(ENV)
        assert format_value("9", state.heap) != format_value(9, state.heap)

    def test_cycle_guard(self):
        kernel = run_cells("a = []\na.append(a)")
        ref = kernel.state.bindings["a"]
        assert format_value(ref, kernel.state.heap) == "[...]"


class TestExecuteCell:
    def test_binding_and_trace(self):
        state = fresh_state(ENV)
        trace = execute_cell(state, SourceCell("c1", "a = 9"))
        assert state.bindings["a"] == 9
        assert trace.writes == {"a"}
        assert trace.output == ""

    def test_print_joins_with_spaces(self):
        kernel = run_cells("a = 5", "b = 9", 'print("a:", a, "b:", b)')
        trace = kernel.history["c3"]
        assert trace.output == "a: 5 b: 9\n"
        assert {"a", "b"} <= trace.reads_names

    def test_stale_state_after_partial_rerun(self):
        # running only the edited mutation cell leaves the old mutation
        kernel = run_cells(
            'x = {"a": [], "b": []}',
            'x["a"].append(1)',
            "z = 123",
            "print(x)",
        )
        kernel.run_cell(SourceCell("c2", 'x["b"].append(1)'))
        ref = kernel.state.bindings["x"]
        assert format_value(ref, kernel.state.heap) == '{"a": [1], "b": [1]}'

    def test_runtime_error_recorded_not_raised(self):
        state = fresh_state(ENV)
        trace = execute_cell(state, SourceCell("c1", "a = 1\nb = missing\nc = 2"))
        assert trace.failed
        assert "undefined name: missing" in trace.error
        assert state.bindings["a"] == 1  # effects up to the error persist
        assert "c" not in state.bindings
        assert "Error: undefined name: missing" in state.outputs["c1"]

    def test_parse_error_recorded(self):
        state = fresh_state(ENV)
        trace = execute_cell(state, SourceCell("c1", "a ="))
        assert trace.failed and "parse error" in trace.error

    def test_call_depth_cap(self):
        state = fresh_state(ENV)
        execute_cell(state, SourceCell("c1", "def f(x) {\n return f(x)\n}"))
        trace = execute_cell(state, SourceCell("c2", "f(1)"))
        assert trace.failed and "call depth" in trace.error

    def test_mutation_through_function_boundary_is_traced(self):
        kernel = run_cells(
            "nums = [1, 2]",
            "def add_total(l) {\n l.append(len(l))\n}",
            "add_total(nums)",
        )
        trace = kernel.history["c3"]
        nums_oid = kernel.state.bindings["nums"].oid
        assert nums_oid in trace.mutated_oids()
        assert "nums" in trace.reads_names

    def test_access_paths_literal_vs_computed(self):
        kernel = run_cells("lst = [1, 2, 3]", "i = 1", "a = lst[0]\nb = lst[i]")
        trace = kernel.history["c3"]
        oid = kernel.state.bindings["lst"].oid
        assert (oid, (0,)) in trace.reads_objects  # literal index kept
        assert (oid, ()) in trace.reads_objects  # computed index degrades

    def test_created_tracks_only_surviving_allocations(self):
        kernel = run_cells("n = len([1, 2])\nkeep = [n]")
        trace = kernel.history["c1"]
        keep_oid = kernel.state.bindings["keep"].oid
        assert trace.created == {keep_oid}

    def test_version_monotonicity(self):
        kernel = run_cells("lst = [1]")
        oid = kernel.state.bindings["lst"].oid
        assert kernel.state.heap[oid].version == 0
        kernel.run_cell(SourceCell("c2", "lst.append(2)"))
        assert kernel.state.heap[oid].version == 1
        kernel.run_cell(SourceCell("c3", "other = 5"))
        assert kernel.state.heap[oid].version == 1

    def test_swap_semantics(self):
        kernel = run_cells("a = 9", "b = 8", "a, b = b, a")
        assert kernel.state.bindings["a"] == 8
        assert kernel.state.bindings["b"] == 9

    def test_list_concat_makes_fresh_object(self):
        kernel = run_cells("a = [1]", "b = a + [2]", "b.append(3)")
        assert format_value(kernel.state.bindings["a"], kernel.state.heap) == "[1]"

    def test_anchor_recorded_for_literal_setitem(self):
        kernel = run_cells("vec = [0, 0]", "vec[1] = 5")
        recs = kernel.history["c2"].mutations
        assert any(r.anchor == ("vec", (1,)) and r.op == "setitem" for r in recs)

    def test_ancestor_mutation_records(self):
        kernel = run_cells('x = {"a": []}', 'x["a"].append(1)')
        trace = kernel.history["c2"]
        x_oid = kernel.state.bindings["x"].oid
        inner = kernel.state.heap[x_oid].entries["a"].oid
        paths = {(r.oid, r.path) for r in trace.mutations}
        assert (inner, ()) in paths
        assert (x_oid, ("a",)) in paths


class TestFilesystem:
    def test_fresh_state_from_env(self):
        env = FreshEnvironment({"data.txt": "1"})
        kernel = run_cells('raw = file_read("data.txt")', env=env)
        assert kernel.state.bindings["raw"] == "1"

    def test_two_fresh_states_equal(self):
        env = FreshEnvironment({"data.txt": "1"})
        assert states_equal(fresh_state(env), fresh_state(env))

    def test_write_append_read_exists(self):
        kernel = run_cells(
            'file_write("log", "a")',
            'file_append("log", "b")',
            'print(file_read("log"), file_exists("log"), file_exists("x"))',
        )
        assert kernel.state.fs["log"] == "ab"
        assert kernel.history["c3"].output == "ab true false\n"

    def test_created_paths_restore_initial_fs(self):
        env = FreshEnvironment({"seed.txt": "s"})
        kernel = run_cells('file_write("out.txt", "x")', env=env)
        state = kernel.state
        assert state.created_paths == {"out.txt"}
        for path in state.created_paths:
            del state.fs[path]
        assert state.fs == dict(env.fs_initial)

    def test_missing_file_errors(self):
        kernel = run_cells('raw = file_read("nope")')
        assert kernel.history["c1"].failed

    def test_restart_restores_initial_fs(self):
        env = FreshEnvironment({"seed.txt": "s"})
        kernel = run_cells('file_write("a", "1")\nq = 2', env=env)
        kernel.restart()
        assert kernel.state.fs == {"seed.txt": "s"}
        assert kernel.state.bindings == {}
        assert kernel.state.outputs == {}


class TestSnapshotRestore:
    def test_restore_is_equal(self):
        kernel = run_cells("a = [1]", "b = a")
        snap = snapshot(kernel.state)
        assert states_equal(restore(snap), kernel.state)

    def test_mutation_after_snapshot_does_not_leak(self):
        kernel = run_cells("lst = [1]")
        snap = snapshot(kernel.state)
        kernel.run_cell(SourceCell("c2", "lst.append(2)"))
        restored = restore(snap)
        assert format_value(restored.bindings["lst"], restored.heap) == "[1]"

    def test_snapshot_of_fresh_state(self):
        env = FreshEnvironment({"f": "1"})
        snap = snapshot(fresh_state(env))
        assert states_equal(restore(snap), fresh_state(env))

    def test_aliasing_preserved_through_restore(self):
        kernel = run_cells("a = []", "b = a")
        snap = snapshot(kernel.state)
        resumed = Kernel(ENV, state=restore(snap))
        resumed.run_cell(SourceCell("c3", "a.append(7)"))
        state = resumed.state
        assert format_value(state.bindings["b"], state.heap) == "[7]"


class TestStatesEqual:
    def test_reflexive(self):
        kernel = run_cells("a = [1]", "b = a", 'print("hi")')
        assert states_equal(kernel.state, kernel.state)

    def test_alias_structure_distinguished(self):
        aliased = run_cells("a = []", "b = a").state
        separate = run_cells("a = []", "b = []").state
        assert not states_equal(aliased, separate)

    def test_naive_rerun_is_inconsistent(self):
        stale = run_cells(
            'x = {"a": [], "b": []}',
            'x["a"].append(1)',
            "z = 123",
            "print(x)",
        )
        stale.run_cell(SourceCell("c2", 'x["b"].append(1)'))
        oracle = run_cells(
            'x = {"a": [], "b": []}',
            'x["b"].append(1)',
            "z = 123",
            "print(x)",
        )
        assert not states_equal(stale.state, oracle.state)

    def test_object_ids_do_not_matter(self):
        a = run_cells("tmp = [0]", "keep = [1]").state
        b = run_cells("keep = [1]", "tmp = [0]").state
        assert states_equal(a, b)

    def test_outputs_compared_per_cell(self):
        a = run_cells("print(1)").state
        b = run_cells("print(2)").state
        assert not states_equal(a, b)

    def test_empty_output_equals_missing(self):
        a = run_cells("q = 1").state
        b = fresh_state(ENV)
        execute_cell(b, SourceCell("other", ""))
        execute_cell(b, SourceCell("c1", "q = 1"))
        assert states_equal(a, b)

    def test_digest_matches_equality(self):
        a = run_cells("a = [1]", "b = a").state
        b = run_cells("a = [1]", "b = a").state
        assert state_digest(a) == state_digest(b)


class TestDeterminism:
    def test_full_rerun_identical(self):
        sources = (
            'x = {"a": [], "b": []}',
            'x["a"].append(1)',
            "z = 123",
            "print(x)",
            'file_append("log", "run")',
        )
        k1, k2 = run_cells(*sources), run_cells(*sources)
        assert states_equal(k1.state, k2.state)
        for cid in k1.history:
            t1, t2 = k1.history[cid], k2.history[cid]
            assert (t1.reads_names, t1.writes, t1.output) == (
                t2.reads_names,
                t2.writes,
                t2.output,
            )
            assert t1.mutations == t2.mutations
            assert t1.fs_ops == t2.fs_ops

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(
            st.sampled_from(
                [
                    "a = 1",
                    "b = a + 1",
                    "lst = [1, 2]",
                    "lst.append(3)",
                    "print(lst)",
                    "c = lst[0]",
                    'm = {"k": [0]}',
                    'm["k"].append(c)',
                ]
            ),
            min_size=1,
            max_size=6,
        )
    )
    def test_generated_notebooks_deterministic(self, sources):
        k1, k2 = run_cells(*sources), run_cells(*sources)
        assert states_equal(k1.state, k2.state)
        assert state_digest(k1.state) == state_digest(k2.state)


def _literal_exprs():
    scalars = st.one_of(
        st.integers(min_value=-99, max_value=99).map(str),
        st.sampled_from(["0.5", "1.0", "2.25"]),
        st.sampled_from(['"a"', '"b c"', '""', '"9"']),
        st.sampled_from(["true", "false", "none", "9"]),
    )

    def nest(children):
        return st.one_of(
            st.lists(children, max_size=3).map(lambda xs: "[" + ", ".join(xs) + "]"),
            st.lists(
                st.tuples(st.sampled_from(['"k"', '"m"', "1"]), children),
                max_size=2,
                unique_by=lambda kv: kv[0],
            ).map(
                lambda es: "{" + ", ".join(f"{k}: {v}" for k, v in es) + "}"
            ),
        )

    return st.recursive(scalars, nest, max_leaves=5)


@settings(max_examples=150, deadline=None)
@given(_literal_exprs(), _literal_exprs())
def test_format_value_injective_up_to_structural_equality(left, right):
    kernel = run_cells(f"a = {left}", f"b = {right}", "same = a == b")
    state = kernel.state
    rendered_equal = format_value(
        state.bindings["a"], state.heap
    ) == format_value(state.bindings["b"], state.heap)
    if rendered_equal:
        assert state.bindings["same"] is True
