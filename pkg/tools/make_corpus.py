#!/usr/bin/env python3
"""Regenerate the shipped benchmark corpus under src/rex/corpus/.

Each entry: (name, hint, fs_initial, original sources, edit descriptor).
Edit descriptors:
    ("modify", index, new_source)   replace one cell's source
    ("add", index, cell_id, source) insert a new cell at index
    ("delete", index)               remove one cell
    ("swap", i, j)                  exchange two cells
"""

from __future__ import annotations

import json
from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "src" / "rex" / "corpus"

CASES = [
    # --- direct assignment (10) ---
    (
        "direct_rhs_literal",
        "direct_assignment",
        {},
        [
            "base = 10",
            "twice = base * 2",
            'print("twice is", twice)',
            'label = "metrics"',
            'print("label:", label)',
        ],
        ("modify", 0, "base = 12"),
    ),
    (
        "direct_rhs_var",
        "direct_assignment",
        {},
        [
            'note = "week1"',
            "rate = 3",
            "hours = 8",
            "pay = rate * hours",
            'print("pay:", pay)',
        ],
        ("modify", 2, "hours = 6"),
    ),
    (
        "direct_string_concat",
        "direct_assignment",
        {},
        [
            'pad = "::"',
            'greet = "hello"',
            'msg = greet + " world"',
            "print(msg)",
        ],
        ("modify", 1, 'greet = "hey"'),
    ),
    (
        "direct_float_scale",
        "direct_assignment",
        {},
        [
            'hdr = "scale"',
            "ratio_v = 2.5",
            "scaled = ratio_v * 4.0",
            'print("scaled", scaled)',
            'tail = "end"',
        ],
        ("modify", 1, "ratio_v = 2.75"),
    ),
    (
        "direct_chain_three",
        "direct_assignment",
        {},
        [
            "a0 = 1",
            "a1 = a0 + 1",
            "a2 = a1 + 1",
            'print("a2:", a2)',
            'spare = "x"',
        ],
        ("modify", 0, "a0 = 2"),
    ),
    (
        "direct_branch_flip",
        "direct_assignment",
        {},
        [
            'memo = "sizes"',
            "n = 4",
            'if n > 5 { kind = "big" } else { kind = "small" }',
            'print("kind:", kind)',
        ],
        ("modify", 1, "n = 7"),
    ),
    (
        "direct_fn_pure",
        "direct_assignment",
        {},
        [
            "def double(v) {\n    return v * 2\n}",
            "seed_v = 5",
            "out_v = double(seed_v)",
            'print("out:", out_v)',
            'memo7 = "fn"',
        ],
        ("modify", 1, "seed_v = 9"),
    ),
    (
        "direct_add_print",
        "direct_assignment",
        {},
        [
            "total = 40",
            'sep = "-"',
            'print("total:", total)',
        ],
        ("add", 3, "c4", 'print("twice:", total * 2)'),
    ),
    (
        "direct_two_readers",
        "direct_assignment",
        {},
        [
            'hdr9 = "report"',
            "width = 3",
            "area = width * width",
            'print("area:", area)',
            "perim = width * 4",
            'print("perim", perim)',
        ],
        ("modify", 1, "width = 5"),
    ),
    (
        "direct_bool_gate",
        "direct_assignment",
        {},
        [
            'tag10 = "gate"',
            "flag = true",
            'if flag { status = "on" } else { status = "off" }',
            'print("status:", status)',
        ],
        ("modify", 1, "flag = false"),
    ),
    (
        "direct_loop_accumulate",
        "direct_assignment",
        {},
        [
            "pad46 = 0",
            "count9 = 3",
            "total9 = 0\nfor i in range(count9) { total9 = total9 + i }",
            'print("total:", total9)',
        ],
        ("modify", 1, "count9 = 4"),
    ),
    (
        "direct_error_print",
        "direct_assignment",
        {},
        [
            "pad47 = 1",
            "vals = [1, 2]",
            'print("v:", vals[0])',
        ],
        ("modify", 2, 'print("v:", vals[5])'),
    ),
    # --- reassignment (8) ---
    (
        "aliasing_val_swap",
        "reassignment",
        {},
        [
            "a = 9",
            "b = 5",
            "a, b = b, a",
            'print("a:", a, "b:", b)',
            'pad11 = "swap"',
        ],
        ("modify", 1, "b = 8"),
    ),
    (
        "reassign_simple_shadow",
        "reassignment",
        {},
        [
            'tag12 = "shadow"',
            'msg = "first"',
            'msg = "second"',
            "print(msg)",
        ],
        ("modify", 2, 'msg = "SECOND"'),
    ),
    (
        "reassign_self_increment",
        "reassignment",
        {},
        [
            "count_v = 1",
            "count_v = count_v + 10",
            'print("count:", count_v)',
            "pad13 = 0",
        ],
        ("modify", 1, "count_v = count_v + 20"),
    ),
    (
        "reassign_list_rebuild",
        "reassignment",
        {},
        [
            'hdr14 = "acc"',
            "acc = [1]",
            "acc = acc + [10]",
            'print("acc:", acc)',
        ],
        ("modify", 1, "acc = [1, 2]"),
    ),
    (
        "reassign_swap_via_temp",
        "reassignment",
        {},
        [
            "p = 3",
            "q = 7",
            "tmp = p\np = q\nq = tmp",
            'print("p:", p, "q:", q)',
            'pad15 = "t"',
        ],
        ("modify", 1, "q = 11"),
    ),
    (
        "reassign_conditional_override",
        "reassignment",
        {},
        [
            'memo16 = "cond"',
            'mode = "auto"',
            "level = 2",
            'if level > 5 { mode = "manual" }',
            "print(mode, level)",
        ],
        ("modify", 2, "level = 9"),
    ),
    (
        "reassign_multi_target",
        "reassignment",
        {},
        [
            "x1 = 5",
            "y1 = 6",
            "x1, y1 = y1, x1 + y1",
            'print("sum:", x1 + y1)',
            'pad17 = "m"',
        ],
        ("modify", 0, "x1 = 50"),
    ),
    (
        "reassign_swap_cells",
        "reassignment",
        {},
        [
            'hdr18 = "swap"',
            'mode2 = "fast"',
            'mode2 = "slow"',
            'print("mode:", mode2)',
        ],
        ("swap", 1, 2),
    ),
    # --- mutation (22) ---
    (
        "map_subscript_append",
        "mutation",
        {},
        [
            'x = {"a": [], "b": []}',
            'x["a"].append(1)',
            "z = 123",
            "print(x)",
        ],
        ("modify", 1, 'x["b"].append(1)'),
    ),
    (
        "list_subscript_redef_2",
        "mutation",
        {},
        [
            "lst = [1, 2, 3]",
            "lst[0] = 10",
            "print(lst[1])",
            "z20 = 7",
        ],
        ("modify", 1, "lst[0] = 99"),
    ),
    (
        "func_list_append",
        "mutation",
        {},
        [
            "nums = [1, 2]",
            "def add_total(l) {\n    l.append(len(l))\n}",
            "add_total(nums)",
            "print(nums)",
            'w21 = "fn"',
        ],
        ("modify", 0, "nums = [1, 2, 3]"),
    ),
    (
        "list_append_chain",
        "mutation",
        {},
        [
            "t22 = 0",
            "items = []",
            'items.append("x")',
            "print(len(items), items)",
        ],
        ("modify", 2, 'items.append("y")'),
    ),
    (
        "map_update_method",
        "mutation",
        {},
        [
            'cfg = {"n": 1}',
            'patch = {"m": 2}',
            "cfg.update(patch)",
            "print(cfg)",
            "pad23 = 1",
        ],
        ("modify", 1, 'patch = {"m": 5}'),
    ),
    (
        "nested_list_mutation",
        "mutation",
        {},
        [
            "grid = [[0, 0], [0, 0]]",
            "grid[1][0] = 5",
            "print(grid)",
            "pad24 = 2",
        ],
        ("modify", 1, "grid[1][1] = 5"),
    ),
    (
        "alias_two_names",
        "mutation",
        {},
        [
            "src = [1]",
            "dup = src",
            "dup.append(2)",
            "print(src)",
            "pad25 = 3",
        ],
        ("modify", 2, "dup.append(3)"),
    ),
    (
        "computed_key_alias",
        "mutation",
        {},
        [
            'store = {"hot": [], "cold": []}',
            'key5 = "h" + "ot"',
            "slot = store[key5]\nslot.append(1)",
            "print(store)",
            "pad26 = 4",
        ],
        ("modify", 2, "slot = store[key5]\nslot.append(2)"),
        {"evades_mutation_lint": True},
    ),
    (
        "delete_mutator",
        "mutation",
        {},
        [
            "bag = []",
            'bag.append("tmp")',
            'bag.append("keep")',
            "print(bag)",
            "pad27 = 5",
        ],
        ("delete", 1),
    ),
    (
        "fn_map_write",
        "mutation",
        {},
        [
            "pad28 = 6",
            'reg = {"count": 0}',
            'def bump(m, amt) {\n    m["count"] = m["count"] + amt\n}',
            "bump(reg, 2)",
            "print(reg)",
        ],
        ("modify", 3, "bump(reg, 5)"),
    ),
    (
        "insert_add_cell",
        "mutation",
        {},
        [
            'log1 = ["start"]',
            "print(log1)",
            "pad29 = 7",
        ],
        ("add", 1, "c4", 'log1.append("mid")'),
    ),
    (
        "list_insert_shift",
        "mutation",
        {},
        [
            'queue = ["a", "b"]',
            'queue.insert(0, "z")',
            "print(queue)",
            "pad30 = 8",
        ],
        ("modify", 1, 'queue.insert(1, "z")'),
    ),
    (
        "map_two_stage",
        "mutation",
        {},
        [
            "pad31 = 9",
            'doc = {"title": "x"}',
            'doc["title"] = "y"',
            "print(doc)",
        ],
        ("modify", 2, 'doc["note"] = "y"'),
    ),
    (
        "idempotent_overwrite_fine",
        "mutation",
        {},
        [
            "vec = [0, 0, 0]",
            "vec[2] = 4",
            "total5 = vec[0] + vec[1]",
            'print("t:", total5)',
            'print("last:", vec[2])',
            "pad32 = 10",
        ],
        ("modify", 1, "vec[2] = 9"),
    ),
    (
        "clear_and_refill",
        "mutation",
        {},
        [
            "pad33 = 11",
            "buf = [1]",
            "buf.clear()\nbuf.append(2)",
            "print(buf)",
        ],
        ("modify", 2, "buf.clear()\nbuf.append(3)"),
    ),
    (
        "fn_nested_passthrough",
        "mutation",
        {},
        [
            'data6 = {"xs": []}',
            "def tap6(l, v) {\n    l.append(v)\n}",
            'def push6(d, v) {\n    tap6(d["xs"], v)\n}',
            "push6(data6, 1)",
            "print(data6)",
            "pad34 = 12",
        ],
        ("modify", 3, "push6(data6, 2)"),
    ),
    (
        "read_then_mutate_order",
        "mutation",
        {},
        [
            "pad35 = 13",
            "setL = [5]",
            "before7 = len(setL)",
            'print("before:", before7)',
            "setL.append(6)",
            'print("after:", len(setL))',
        ],
        ("modify", 2, "before7 = len(setL) * 10"),
    ),
    (
        "map_keys_iteration",
        "mutation",
        {},
        [
            'tbl = {"x": 1, "y": 2}',
            "names8 = tbl.keys()",
            'tbl["z"] = 3',
            "print(names8)",
            "print(tbl)",
            "pad36 = 14",
        ],
        ("modify", 2, 'tbl["w"] = 3'),
    ),
    (
        "extend_from_source",
        "mutation",
        {},
        [
            "base37 = [1]",
            "extra37 = [9]",
            "base37.extend(extra37)",
            "print(base37)",
            "pad37 = 15",
        ],
        ("modify", 1, "extra37 = [9, 9]"),
    ),
    (
        "pop_stack_discipline",
        "mutation",
        {},
        [
            "stack = [1, 2, 3]",
            "top38 = stack.pop()",
            'print("top:", top38, stack)',
            "pad38 = 16",
        ],
        ("modify", 1, "top38 = stack.pop() * 10"),
    ),
    (
        "remove_by_value",
        "mutation",
        {},
        [
            'pool = ["a", "b", "c"]',
            'pool.remove("b")',
            "print(pool)",
            "pad39 = 17",
        ],
        ("modify", 1, 'pool.remove("c")'),
    ),
    (
        "guarded_mutation",
        "mutation",
        {},
        [
            "pad40 = 18",
            "limits = [10]",
            "n40 = 1",
            "if n40 > 0 { limits.append(n40) }",
            "print(limits)",
        ],
        ("modify", 2, "n40 = 2"),
    ),
    # --- filesystem (5) ---
    (
        "fs_append_log",
        "file_system",
        {},
        [
            "run41 = 1",
            'file_append("log.txt", "alpha\\n")',
            'print(file_read("log.txt"))',
        ],
        ("modify", 1, 'file_append("log.txt", "beta\\n")'),
    ),
    (
        "fs_append_upstream",
        "file_system",
        {},
        [
            'tag42 = "v1"',
            'file_append("audit.txt", tag42)',
            'print(file_exists("audit.txt"))',
            "pad42 = 19",
        ],
        ("modify", 0, 'tag42 = "v2"'),
    ),
    (
        "fs_write_idempotent",
        "file_system",
        {},
        [
            "pad43 = 20",
            'cfgtext = "mode=1"',
            'file_write("conf.ini", cfgtext)',
            'print(file_read("conf.ini"))',
        ],
        ("modify", 1, 'cfgtext = "mode=2"'),
    ),
    (
        "fs_read_seed",
        "file_system",
        {"data.txt": "12345"},
        [
            'raw = file_read("data.txt")',
            "n44 = len(raw)",
            'print("n:", n44)',
            "pad44 = 21",
        ],
        ("modify", 1, "n44 = len(raw) + 1"),
    ),
    (
        "fs_write_combo",
        "file_system",
        {},
        [
            "pad45 = 22",
            'file_write("out.txt", "A")',
            'combo = file_read("out.txt") + "!"',
            "print(combo)",
        ],
        ("modify", 1, 'file_write("out.txt", "B")'),
    ),
]


def cells_obj(sources, ids=None):
    ids = ids or [f"c{i}" for i in range(1, len(sources) + 1)]
    return {"cells": [{"id": i, "source": s} for i, s in zip(ids, sources)]}


def apply_edit(sources, edit):
    ids = [f"c{i}" for i in range(1, len(sources) + 1)]
    kind = edit[0]
    if kind == "modify":
        _, idx, new = edit
        out = list(sources)
        out[idx] = new
        return out, ids
    if kind == "add":
        _, idx, new_id, src = edit
        out = list(sources)
        out_ids = list(ids)
        out.insert(idx, src)
        out_ids.insert(idx, new_id)
        return out, out_ids
    if kind == "delete":
        _, idx = edit
        out = [s for i, s in enumerate(sources) if i != idx]
        out_ids = [c for i, c in enumerate(ids) if i != idx]
        return out, out_ids
    if kind == "swap":
        _, i, j = edit
        out = list(sources)
        out_ids = list(ids)
        out[i], out[j] = out[j], out[i]
        out_ids[i], out_ids[j] = out_ids[j], out_ids[i]
        return out, out_ids
    raise ValueError(kind)


def main() -> None:
    CORPUS.mkdir(parents=True, exist_ok=True)
    for old in CORPUS.glob("*.json"):
        old.unlink()
    for entry in CASES:
        name, hint, fs_initial, sources, edit = entry[:5]
        extra = entry[5] if len(entry) > 5 else {}
        mod_sources, mod_ids = apply_edit(sources, edit)
        obj = {
            "name": name,
            "category_hint": hint,
            "fs_initial": fs_initial,
            "original": cells_obj(sources),
            "modified": cells_obj(mod_sources, mod_ids),
        }
        obj.update(extra)
        path = CORPUS / f"{name}.json"
        path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(CASES)} cases to {CORPUS}")


if __name__ == "__main__":
    main()
