"""Runtime value model.

Scalars are immutable Python natives; lists and mappings live in a heap
table keyed by ObjectId so aliasing survives snapshots and can be
compared across states. Every heap object carries a version counter
that strictly increases on each in-place mutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

ObjectId = int

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class ObjRef:
    oid: ObjectId


@dataclass(frozen=True)
class FunctionVal:
    name: str
    params: tuple[str, ...]
    body: tuple  # tuple of Stmt nodes
    canonical: str  # canonical body source, used for value equality


Value = Union[None, bool, int, float, str, ObjRef, FunctionVal]

Key = Union[str, int]


@dataclass
class HeapList:
    items: list[Value] = field(default_factory=list)
    version: int = 0


@dataclass
class HeapMap:
    entries: dict[Key, Value] = field(default_factory=dict)
    version: int = 0


HeapObject = Union[HeapList, HeapMap]
Heap = dict[ObjectId, HeapObject]

_TEXT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n"}


def quote_text(s: str) -> str:
    return '"' + "".join(_TEXT_ESCAPES.get(ch, ch) for ch in s) + '"'


def format_key(k: Key) -> str:
    return quote_text(k) if isinstance(k, str) else str(k)


def format_value(v: Value, heap: Heap, _seen: frozenset[ObjectId] = frozenset()) -> str:
    """Deterministic canonical rendering; injective on acyclic values up
    to structural equality (aliasing is deliberately not encoded)."""
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return quote_text(v)
    if isinstance(v, FunctionVal):
        return f"<function {v.name}>"
    if isinstance(v, ObjRef):
        if v.oid in _seen:
            return "..."
        seen = _seen | {v.oid}
        obj = heap[v.oid]
        if isinstance(obj, HeapList):
            return "[" + ", ".join(format_value(x, heap, seen) for x in obj.items) + "]"
        inner = ", ".join(
            f"{format_key(k)}: {format_value(x, heap, seen)}"
            for k, x in obj.entries.items()
        )
        return "{" + inner + "}"
    raise TypeError(f"unknown value: {v!r}")


def display_value(v: Value, heap: Heap) -> str:
    """Rendering used by print: bare text stays unquoted, everything else
    uses the canonical form."""
    if isinstance(v, str):
        return v
    return format_value(v, heap)
