"""Notebook runtime state: bindings, heap, virtual filesystem, outputs.

Equality between states is alias-aware: two states are equal when their
binding names match, the heap graphs reachable from same-named bindings
are isomorphic (respecting element values, ordering, and aliasing), the
filesystem contents are identical, and each cell's latest visible output
matches. Equality is implemented by comparing canonical serializations
in which heap objects are labeled in first-visit order over the sorted
binding names, so ObjectIds and version counters never leak into it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Mapping

from ..minilang.values import (
    FunctionVal,
    Heap,
    HeapList,
    HeapMap,
    ObjRef,
    Value,
)


@dataclass(frozen=True)
class FreshEnvironment:
    """Initial runtime environment: the virtual filesystem a notebook
    starts from. Immutable for the lifetime of a benchmark case."""

    fs_initial: Mapping[str, str] = field(default_factory=dict)


@dataclass
class State:
    bindings: dict[str, Value] = field(default_factory=dict)
    heap: Heap = field(default_factory=dict)
    next_oid: int = 0
    fs: dict[str, str] = field(default_factory=dict)
    fs_initial: dict[str, str] = field(default_factory=dict)
    created_paths: set[str] = field(default_factory=set)
    outputs: dict[str, str] = field(default_factory=dict)
    exec_log: list[tuple[str, int]] = field(default_factory=list)

    # -- heap helpers --

    def alloc_list(self, items: list[Value]) -> ObjRef:
        oid = self.next_oid
        self.next_oid += 1
        self.heap[oid] = HeapList(items, 0)
        return ObjRef(oid)

    def alloc_map(self, entries: dict) -> ObjRef:
        oid = self.next_oid
        self.next_oid += 1
        self.heap[oid] = HeapMap(entries, 0)
        return ObjRef(oid)

    def reachable_oids(self, roots: list[Value] | None = None) -> set[int]:
        if roots is None:
            roots = list(self.bindings.values())
        seen: set[int] = set()
        stack = [v for v in roots if isinstance(v, ObjRef)]
        while stack:
            ref = stack.pop()
            if ref.oid in seen:
                continue
            seen.add(ref.oid)
            obj = self.heap[ref.oid]
            children = (
                obj.items if isinstance(obj, HeapList) else list(obj.entries.values())
            )
            for child in children:
                if isinstance(child, ObjRef):
                    stack.append(child)
        return seen

    def reset_to_fresh(self) -> None:
        """Restart semantics: clear all notebook state and restore the
        filesystem to the initial environment."""
        self.bindings.clear()
        self.heap.clear()
        self.fs = dict(self.fs_initial)
        self.created_paths.clear()
        self.outputs.clear()


def fresh_state(env: FreshEnvironment) -> State:
    fs = dict(env.fs_initial)
    return State(fs=fs, fs_initial=dict(env.fs_initial))


@dataclass(frozen=True)
class Snapshot:
    """Deep, alias-preserving copy of a State; immutable and shareable."""

    bindings: tuple[tuple[str, Value], ...]
    heap: tuple[tuple[int, HeapList | HeapMap], ...]
    next_oid: int
    fs: tuple[tuple[str, str], ...]
    fs_initial: tuple[tuple[str, str], ...]
    created_paths: frozenset[str]
    outputs: tuple[tuple[str, str], ...]
    exec_log: tuple[tuple[str, int], ...]


def _copy_heap_obj(obj: HeapList | HeapMap) -> HeapList | HeapMap:
    if isinstance(obj, HeapList):
        return HeapList(list(obj.items), obj.version)
    return HeapMap(dict(obj.entries), obj.version)


def snapshot(s: State) -> Snapshot:
    return Snapshot(
        bindings=tuple(s.bindings.items()),
        heap=tuple((oid, _copy_heap_obj(o)) for oid, o in s.heap.items()),
        next_oid=s.next_oid,
        fs=tuple(s.fs.items()),
        fs_initial=tuple(s.fs_initial.items()),
        created_paths=frozenset(s.created_paths),
        outputs=tuple(s.outputs.items()),
        exec_log=tuple(s.exec_log),
    )


def restore(sn: Snapshot) -> State:
    return State(
        bindings=dict(sn.bindings),
        heap={oid: _copy_heap_obj(o) for oid, o in sn.heap},
        next_oid=sn.next_oid,
        fs=dict(sn.fs),
        fs_initial=dict(sn.fs_initial),
        created_paths=set(sn.created_paths),
        outputs=dict(sn.outputs),
        exec_log=list(sn.exec_log),
    )


# -- canonical serialization and equality --


def _encode_value(v: Value, state: State, labels: dict[int, int], table: list) -> object:
    if v is None:
        return ["none"]
    if isinstance(v, bool):
        return ["bool", v]
    if isinstance(v, int):
        return ["int", v]
    if isinstance(v, float):
        return ["float", repr(v)]
    if isinstance(v, str):
        return ["text", v]
    if isinstance(v, FunctionVal):
        return ["function", v.name, list(v.params), v.canonical]
    if isinstance(v, ObjRef):
        if v.oid in labels:
            return ["obj", labels[v.oid]]
        label = len(table)
        labels[v.oid] = label
        table.append(None)  # reserve slot; cycles hit the label above
        obj = state.heap[v.oid]
        if isinstance(obj, HeapList):
            encoded = ["list", [_encode_value(x, state, labels, table) for x in obj.items]]
        else:
            encoded = [
                "map",
                [
                    [k, _encode_value(x, state, labels, table)]
                    for k, x in obj.entries.items()
                ],
            ]
        table[label] = encoded
        return ["obj", label]
    raise TypeError(f"unknown value: {v!r}")


def canonical_state_obj(s: State) -> dict:
    """Label-graph form of the state; equal objects <=> equal states."""
    labels: dict[int, int] = {}
    table: list = []
    bindings = [
        [name, _encode_value(s.bindings[name], s, labels, table)]
        for name in sorted(s.bindings)
    ]
    outputs = [[cid, text] for cid, text in sorted(s.outputs.items()) if text]
    return {
        "bindings": bindings,
        "objects": table,
        "fs": [[p, s.fs[p]] for p in sorted(s.fs)],
        "outputs": outputs,
    }


def states_equal(a: State, b: State) -> bool:
    return canonical_state_obj(a) == canonical_state_obj(b)


def state_digest(s: State) -> str:
    payload = json.dumps(
        canonical_state_obj(s), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def state_diff_summary(actual: State, expected: State) -> str:
    """Short human-readable account of why two states differ."""
    parts: list[str] = []
    ca, ce = canonical_state_obj(actual), canonical_state_obj(expected)
    names_a = {name for name, _ in ca["bindings"]}
    names_e = {name for name, _ in ce["bindings"]}
    only_a = sorted(names_a - names_e)
    only_e = sorted(names_e - names_a)
    if only_a:
        parts.append(f"extra bindings: {', '.join(only_a)}")
    if only_e:
        parts.append(f"missing bindings: {', '.join(only_e)}")
    if ca["bindings"] != ce["bindings"] and not (only_a or only_e):
        enc_a, enc_e = dict(ca["bindings"]), dict(ce["bindings"])
        diff = sorted(n for n in enc_a if enc_a[n] != enc_e[n])
        parts.append(f"differing bindings: {', '.join(diff)}")
    elif ca["objects"] != ce["objects"] and not (only_a or only_e):
        parts.append("heap graphs differ")
    if ca["fs"] != ce["fs"]:
        fa, fe = dict(ca["fs"]), dict(ce["fs"])
        paths = sorted(set(fa) | set(fe))
        diff = [p for p in paths if fa.get(p) != fe.get(p)]
        parts.append(f"differing fs paths: {', '.join(diff)}")
    if ca["outputs"] != ce["outputs"]:
        oa, oe = dict(ca["outputs"]), dict(ce["outputs"])
        cells = sorted(set(oa) | set(oe))
        diff = [c for c in cells if oa.get(c) != oe.get(c)]
        parts.append(f"differing outputs: {', '.join(diff)}")
    return "; ".join(parts) if parts else "states are equal"
