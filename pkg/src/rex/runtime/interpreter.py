"""Instrumented tree-walking interpreter.

Every cell execution records a trace: names read from cell bindings
(including reads performed inside called functions), names bound,
object reads and mutations with access paths, allocations, filesystem
operations, and printed output. Access paths keep literal keys and
degrade to the whole object for computed subscripts.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from functools import lru_cache

from ..minilang import nodes as n
from ..minilang.errors import LangError, MiniRuntimeError
from ..minilang.parser import parse_cell
from ..minilang.values import (
    INT_MAX,
    INT_MIN,
    FunctionVal,
    HeapList,
    HeapMap,
    ObjRef,
    Value,
    display_value,
    format_value,
)
from ..notebook import Notebook, SourceCell
from .state import FreshEnvironment, State, fresh_state

CALL_DEPTH_CAP = 256

Path = tuple  # tuple of str|int path components; () means the whole object

MUTATING_LIST_METHODS = {"append", "pop", "insert", "extend", "remove", "clear"}
MUTATING_MAP_METHODS = {"update", "delete"}
READONLY_MAP_METHODS = {"keys", "values"}
BUILTIN_FUNCTIONS = {
    "print",
    "len",
    "str",
    "range",
    "file_write",
    "file_append",
    "file_read",
    "file_exists",
}


def content_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class MutationRecord:
    oid: int
    path: Path
    op: str
    # (root name, full literal path from the root binding) when the
    # mutation target was reached through an all-literal chain from a
    # cell-level name; used for overwrite-coverage checks.
    anchor: tuple[str, Path] | None = None


@dataclass
class CellTrace:
    cell_id: str
    reads_names: set[str] = field(default_factory=set)
    reads_objects: set[tuple[int, Path]] = field(default_factory=set)
    writes: set[str] = field(default_factory=set)
    mutations: list[MutationRecord] = field(default_factory=list)
    created: set[int] = field(default_factory=set)
    fs_ops: list[tuple[str, str, str]] = field(default_factory=list)
    output: str = ""
    error: str | None = None
    # object bound to each written name at cell end; lets planners
    # resolve a static mutation root to the live object it denotes
    binding_refs: dict[str, int] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.error is not None

    def visible_output(self) -> str:
        if self.error is not None:
            return self.output + f"Error: {self.error}\n"
        return self.output

    def mutated_oids(self) -> set[int]:
        return {m.oid for m in self.mutations}


@lru_cache(maxsize=4096)
def parse_cached(source: str) -> n.Program:
    return parse_cell(source)


class _ReturnSignal(Exception):
    def __init__(self, value: Value):
        self.value = value


@dataclass
class _Chain:
    """Access chain from a root binding through subscript steps."""

    root: str | None
    steps: list[tuple[int, object | None]] = field(default_factory=list)
    # steps: (container oid, literal key or None when computed)

    def extended(self, oid: int, key: object | None) -> "_Chain":
        return _Chain(self.root, self.steps + [(oid, key)])


class _Evaluator:
    def __init__(self, state: State, trace: CellTrace):
        self.state = state
        self.trace = trace
        self.frames: list[dict[str, Value]] = []
        self.depth = 0

    # -- trace hooks --

    def read_name(self, name: str) -> None:
        self.trace.reads_names.add(name)

    def read_object(self, oid: int, path: Path) -> None:
        self.trace.reads_objects.add((oid, path))

    def read_deep(self, v: Value) -> None:
        if not isinstance(v, ObjRef):
            return
        for oid in self.state.reachable_oids([v]):
            self.trace.reads_objects.add((oid, ()))

    def mutate(self, oid: int, path: Path, op: str, chain: _Chain | None) -> None:
        anchor = None
        if chain is not None and chain.root is not None:
            keys = [k for _, k in chain.steps]
            if all(k is not None for k in keys):
                anchor = (chain.root, tuple(keys) + path)
        self.trace.mutations.append(MutationRecord(oid, path, op, anchor))
        obj = self.state.heap[oid]
        obj.version += 1
        if chain is not None:
            # ancestor records: the containers along the chain saw a
            # nested mutation at the corresponding relative path
            rel: list = []
            pairs = list(chain.steps)
            for i, (container_oid, _) in enumerate(pairs):
                keys = [k for _, k in pairs[i:]]
                if all(k is not None for k in keys):
                    rec_path = tuple(keys) + path
                else:
                    rec_path = ()
                if container_oid != oid:
                    self.trace.mutations.append(
                        MutationRecord(container_oid, rec_path, op, None)
                    )
            del rel

    # -- scope --

    def lookup(self, name: str) -> Value:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        if name in self.state.bindings:
            self.read_name(name)
            return self.state.bindings[name]
        raise MiniRuntimeError(f"undefined name: {name}")

    def bind(self, name: str, value: Value) -> None:
        if self.frames:
            self.frames[-1][name] = value
        else:
            self.trace.writes.add(name)
            self.state.bindings[name] = value

    # -- statements --

    def exec_block(self, stmts: list[n.Stmt]) -> None:
        for stmt in stmts:
            self.exec_stmt(stmt)

    def exec_stmt(self, s: n.Stmt) -> None:
        if isinstance(s, n.Assign):
            values = [self.eval(v) for v in s.values]
            for target, value in zip(s.targets, values):
                self.assign_target(target, value)
        elif isinstance(s, n.ExprStmt):
            self.eval(s.expr)
        elif isinstance(s, n.FuncDef):
            canonical = n.stmt_to_source(s)
            fn = FunctionVal(s.name, tuple(s.params), tuple(s.body), canonical)
            self.bind(s.name, fn)
        elif isinstance(s, n.If):
            if self.truthy(self.eval(s.cond)):
                self.exec_block(s.then_body)
            else:
                self.exec_block(s.else_body)
        elif isinstance(s, n.For):
            iterable = self.eval(s.iterable)
            if not isinstance(iterable, ObjRef) or not isinstance(
                self.state.heap[iterable.oid], HeapList
            ):
                raise MiniRuntimeError("for loop requires a list")
            self.read_object(iterable.oid, ())
            for item in list(self.state.heap[iterable.oid].items):
                self.bind(s.var, item)
                self.exec_block(s.body)
        elif isinstance(s, n.Return):
            value = self.eval(s.value) if s.value is not None else None
            raise _ReturnSignal(value)
        else:
            raise TypeError(f"unknown statement: {s!r}")

    def assign_target(self, target: n.Expr, value: Value) -> None:
        if isinstance(target, n.Name):
            self.bind(target.id, value)
            return
        assert isinstance(target, n.Subscript)
        container, chain = self.eval_chain(target.base)
        key_lit = self.literal_key(target.index)
        key = self.eval(target.index)
        if not isinstance(container, ObjRef):
            raise MiniRuntimeError("subscript assignment requires a list or mapping")
        obj = self.state.heap[container.oid]
        path: Path = (key_lit,) if key_lit is not None else ()
        if isinstance(obj, HeapList):
            idx = self.list_index(obj, key)
            obj.items[idx] = value
        else:
            if not isinstance(key, (str, int)) or isinstance(key, bool):
                raise MiniRuntimeError("mapping keys must be text or integers")
            obj.entries[key] = value
        self.mutate(container.oid, path, "setitem", chain)

    # -- expressions --

    def literal_key(self, e: n.Expr) -> object | None:
        if isinstance(e, n.IntLit):
            return e.value
        if isinstance(e, n.TextLit):
            return e.value
        return None

    def eval_chain(self, e: n.Expr) -> tuple[Value, _Chain | None]:
        """Evaluate a postfix expression, tracking the access chain from
        a root binding when there is one."""
        if isinstance(e, n.Name):
            return self.lookup(e.id), _Chain(e.id)
        if isinstance(e, n.Subscript):
            base, chain = self.eval_chain(e.base)
            key_lit = self.literal_key(e.index)
            key = self.eval(e.index)
            value = self.subscript_read(base, key, key_lit)
            if isinstance(base, ObjRef):
                if chain is not None:
                    chain = chain.extended(base.oid, key_lit)
                else:
                    chain = _Chain(None, [(base.oid, key_lit)])
            return value, chain
        return self.eval(e), None

    def subscript_read(self, base: Value, key: Value, key_lit: object | None) -> Value:
        if isinstance(base, str):
            if not isinstance(key, int) or isinstance(key, bool):
                raise MiniRuntimeError("text index must be an integer")
            if not -len(base) <= key < len(base):
                raise MiniRuntimeError(f"text index out of range: {key}")
            return base[key]
        if not isinstance(base, ObjRef):
            raise MiniRuntimeError("subscript requires a list, mapping, or text")
        obj = self.state.heap[base.oid]
        path: Path = (key_lit,) if key_lit is not None else ()
        self.read_object(base.oid, path)
        if isinstance(obj, HeapList):
            idx = self.list_index(obj, key)
            return obj.items[idx]
        if not isinstance(key, (str, int)) or isinstance(key, bool):
            raise MiniRuntimeError("mapping keys must be text or integers")
        if key not in obj.entries:
            raise MiniRuntimeError(f"missing key: {format_value(key, self.state.heap)}")
        return obj.entries[key]

    def list_index(self, obj: HeapList, key: Value) -> int:
        if not isinstance(key, int) or isinstance(key, bool):
            raise MiniRuntimeError("list index must be an integer")
        if not -len(obj.items) <= key < len(obj.items):
            raise MiniRuntimeError(f"list index out of range: {key}")
        return key if key >= 0 else key + len(obj.items)

    def eval(self, e: n.Expr) -> Value:
        if isinstance(e, n.IntLit):
            return e.value
        if isinstance(e, n.FloatLit):
            return e.value
        if isinstance(e, n.TextLit):
            return e.value
        if isinstance(e, n.BoolLit):
            return e.value
        if isinstance(e, n.NoneLit):
            return None
        if isinstance(e, n.Name):
            return self.lookup(e.id)
        if isinstance(e, n.ListDisplay):
            items = [self.eval(x) for x in e.items]
            ref = self.state.alloc_list(items)
            self.trace.created.add(ref.oid)
            return ref
        if isinstance(e, n.MapDisplay):
            entries: dict = {}
            for k_expr, v_expr in e.entries:
                k = self.eval(k_expr)
                if not isinstance(k, (str, int)) or isinstance(k, bool):
                    raise MiniRuntimeError("mapping keys must be text or integers")
                entries[k] = self.eval(v_expr)
            ref = self.state.alloc_map(entries)
            self.trace.created.add(ref.oid)
            return ref
        if isinstance(e, n.Subscript):
            value, _ = self.eval_chain(e)
            return value
        if isinstance(e, n.Call):
            return self.call(e)
        if isinstance(e, n.MethodCall):
            return self.method_call(e)
        if isinstance(e, n.BinOp):
            return self.binop(e)
        if isinstance(e, n.BoolOp):
            left = self.eval(e.left)
            if e.op == "and":
                return self.eval(e.right) if self.truthy(left) else left
            return left if self.truthy(left) else self.eval(e.right)
        if isinstance(e, n.UnaryOp):
            if e.op == "not":
                return not self.truthy(self.eval(e.operand))
            v = self.eval(e.operand)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise MiniRuntimeError("unary '-' requires a number")
            return self.check_int(-v)
        raise TypeError(f"unknown expression: {e!r}")

    def truthy(self, v: Value) -> bool:
        if v is None or v is False:
            return False
        if v is True:
            return True
        if isinstance(v, (int, float)):
            return v != 0
        if isinstance(v, str):
            return len(v) > 0
        if isinstance(v, ObjRef):
            obj = self.state.heap[v.oid]
            self.read_object(v.oid, ())
            if isinstance(obj, HeapList):
                return len(obj.items) > 0
            return len(obj.entries) > 0
        return True

    def check_int(self, v: Value) -> Value:
        if isinstance(v, int) and not isinstance(v, bool):
            if not INT_MIN <= v <= INT_MAX:
                raise MiniRuntimeError("integer overflow")
        return v

    def binop(self, e: n.BinOp) -> Value:
        left = self.eval(e.left)
        right = self.eval(e.right)
        op = e.op
        if op in ("==", "!="):
            self.read_deep(left)
            self.read_deep(right)
            eq = self.values_equal(left, right)
            return eq if op == "==" else not eq
        if op in ("<", "<=", ">", ">="):
            return self.compare(op, left, right)
        if op == "+":
            return self.add(left, right)
        if op in ("-", "*", "/", "%"):
            return self.arith(op, left, right)
        raise TypeError(f"unknown operator: {op}")

    def is_number(self, v: Value) -> bool:
        return isinstance(v, (int, float)) and not isinstance(v, bool)

    def compare(self, op: str, left: Value, right: Value) -> bool:
        if self.is_number(left) and self.is_number(right):
            pass
        elif isinstance(left, str) and isinstance(right, str):
            pass
        else:
            raise MiniRuntimeError(f"cannot order these values with '{op}'")
        if op == "<":
            return left < right  # type: ignore[operator]
        if op == "<=":
            return left <= right  # type: ignore[operator]
        if op == ">":
            return left > right  # type: ignore[operator]
        return left >= right  # type: ignore[operator]

    def add(self, left: Value, right: Value) -> Value:
        if self.is_number(left) and self.is_number(right):
            return self.check_int(left + right)  # type: ignore[operator]
        if isinstance(left, str) and isinstance(right, str):
            return left + right
        if isinstance(left, ObjRef) and isinstance(right, ObjRef):
            a = self.state.heap[left.oid]
            b = self.state.heap[right.oid]
            if isinstance(a, HeapList) and isinstance(b, HeapList):
                self.read_object(left.oid, ())
                self.read_object(right.oid, ())
                ref = self.state.alloc_list(list(a.items) + list(b.items))
                self.trace.created.add(ref.oid)
                return ref
        raise MiniRuntimeError("'+' requires two numbers, two texts, or two lists")

    def arith(self, op: str, left: Value, right: Value) -> Value:
        if not (self.is_number(left) and self.is_number(right)):
            raise MiniRuntimeError(f"'{op}' requires numbers")
        if op == "-":
            return self.check_int(left - right)  # type: ignore[operator]
        if op == "*":
            return self.check_int(left * right)  # type: ignore[operator]
        if op == "/":
            if right == 0:
                raise MiniRuntimeError("division by zero")
            return left / right  # type: ignore[operator]
        if right == 0:
            raise MiniRuntimeError("modulo by zero")
        return self.check_int(left % right)  # type: ignore[operator]

    def values_equal(self, a: Value, b: Value, seen: set | None = None) -> bool:
        if seen is None:
            seen = set()
        if isinstance(a, ObjRef) and isinstance(b, ObjRef):
            pair = (a.oid, b.oid)
            if pair in seen:
                return True
            seen.add(pair)
            oa, ob = self.state.heap[a.oid], self.state.heap[b.oid]
            if isinstance(oa, HeapList) and isinstance(ob, HeapList):
                if len(oa.items) != len(ob.items):
                    return False
                return all(
                    self.values_equal(x, y, seen)
                    for x, y in zip(oa.items, ob.items)
                )
            if isinstance(oa, HeapMap) and isinstance(ob, HeapMap):
                if list(oa.entries.keys()) != list(ob.entries.keys()):
                    return False
                return all(
                    self.values_equal(oa.entries[k], ob.entries[k], seen)
                    for k in oa.entries
                )
            return False
        if isinstance(a, ObjRef) or isinstance(b, ObjRef):
            return False
        if isinstance(a, bool) or isinstance(b, bool):
            return isinstance(a, bool) and isinstance(b, bool) and a == b
        if self.is_number(a) and self.is_number(b):
            return a == b  # type: ignore[operator]
        if type(a) is not type(b):
            return False
        return a == b

    # -- calls --

    def call(self, e: n.Call) -> Value:
        # builtins are reachable unless shadowed by a binding
        shadowed = any(e.callee in f for f in self.frames) or (
            e.callee in self.state.bindings
        )
        if e.callee in BUILTIN_FUNCTIONS and not shadowed:
            return self.call_builtin(e.callee, e.args)
        fn = self.lookup(e.callee)
        if not isinstance(fn, FunctionVal):
            raise MiniRuntimeError(f"'{e.callee}' is not callable")
        args = [self.eval(a) for a in e.args]
        if len(args) != len(fn.params):
            raise MiniRuntimeError(
                f"{fn.name}() expects {len(fn.params)} arguments, got {len(args)}"
            )
        if self.depth + 1 > CALL_DEPTH_CAP:
            raise MiniRuntimeError("call depth limit exceeded")
        self.depth += 1
        self.frames.append(dict(zip(fn.params, args)))
        try:
            self.exec_block(list(fn.body))
            result: Value = None
        except _ReturnSignal as ret:
            result = ret.value
        finally:
            self.frames.pop()
            self.depth -= 1
        return result

    def call_builtin(self, name: str, arg_exprs: list[n.Expr]) -> Value:
        args = [self.eval(a) for a in arg_exprs]
        if name == "print":
            for a in args:
                self.read_deep(a)
            line = " ".join(display_value(a, self.state.heap) for a in args)
            self.trace.output += line + "\n"
            return None
        if name == "len":
            self.expect_args(name, args, 1)
            v = args[0]
            if isinstance(v, str):
                return len(v)
            if isinstance(v, ObjRef):
                obj = self.state.heap[v.oid]
                self.read_object(v.oid, ())
                return len(obj.items if isinstance(obj, HeapList) else obj.entries)
            raise MiniRuntimeError("len() requires a list, mapping, or text")
        if name == "str":
            self.expect_args(name, args, 1)
            self.read_deep(args[0])
            if isinstance(args[0], str):
                return args[0]
            return format_value(args[0], self.state.heap)
        if name == "range":
            self.expect_args(name, args, 1)
            v = args[0]
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise MiniRuntimeError("range() requires a non-negative integer")
            ref = self.state.alloc_list(list(range(v)))
            self.trace.created.add(ref.oid)
            return ref
        return self.call_fs_builtin(name, args)

    def call_fs_builtin(self, name: str, args: list[Value]) -> Value:
        state = self.state
        if name in ("file_write", "file_append"):
            self.expect_args(name, args, 2)
            path, text = args
            if not isinstance(path, str) or not isinstance(text, str):
                raise MiniRuntimeError(f"{name}() requires text arguments")
            if path not in state.fs and path not in state.fs_initial:
                state.created_paths.add(path)
            if name == "file_write":
                state.fs[path] = text
            else:
                state.fs[path] = state.fs.get(path, "") + text
            self.trace.fs_ops.append(
                (name.removeprefix("file_"), path, content_digest(text))
            )
            return None
        if name == "file_read":
            self.expect_args(name, args, 1)
            path = args[0]
            if not isinstance(path, str):
                raise MiniRuntimeError("file_read() requires a text path")
            if path not in state.fs:
                self.trace.fs_ops.append(("read", path, content_digest("")))
                raise MiniRuntimeError(f"file not found: {path}")
            content = state.fs[path]
            self.trace.fs_ops.append(("read", path, content_digest(content)))
            return content
        if name == "file_exists":
            self.expect_args(name, args, 1)
            path = args[0]
            if not isinstance(path, str):
                raise MiniRuntimeError("file_exists() requires a text path")
            self.trace.fs_ops.append(("exists", path, content_digest("")))
            return path in state.fs
        raise MiniRuntimeError(f"unknown builtin: {name}")

    def expect_args(self, name: str, args: list, count: int) -> None:
        if len(args) != count:
            raise MiniRuntimeError(
                f"{name}() expects {count} argument{'s' if count != 1 else ''}, "
                f"got {len(args)}"
            )

    # -- method calls --

    def method_call(self, e: n.MethodCall) -> Value:
        receiver, chain = self.eval_chain(e.receiver)
        args = [self.eval(a) for a in e.args]
        if not isinstance(receiver, ObjRef):
            raise MiniRuntimeError(f"value has no method '{e.method}'")
        obj = self.state.heap[receiver.oid]
        if isinstance(obj, HeapList):
            return self.list_method(receiver, obj, e.method, args, chain)
        return self.map_method(receiver, obj, e.method, args, chain)

    def list_method(
        self,
        ref: ObjRef,
        obj: HeapList,
        method: str,
        args: list[Value],
        chain: _Chain | None,
    ) -> Value:
        if method not in MUTATING_LIST_METHODS:
            raise MiniRuntimeError(f"lists have no method '{method}'")
        self.read_object(ref.oid, ())
        if method == "append":
            self.expect_args("append", args, 1)
            obj.items.append(args[0])
            self.mutate(ref.oid, (), "append", chain)
            return None
        if method == "pop":
            if len(args) > 1:
                raise MiniRuntimeError("pop() expects at most 1 argument")
            if not obj.items:
                raise MiniRuntimeError("pop from empty list")
            idx = -1 if not args else self.list_index(obj, args[0])
            value = obj.items.pop(idx)
            self.mutate(ref.oid, (), "pop", chain)
            return value
        if method == "insert":
            self.expect_args("insert", args, 2)
            idx, value = args
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise MiniRuntimeError("insert() index must be an integer")
            obj.items.insert(idx, value)
            self.mutate(ref.oid, (), "insert", chain)
            return None
        if method == "extend":
            self.expect_args("extend", args, 1)
            src = args[0]
            if not isinstance(src, ObjRef) or not isinstance(
                self.state.heap[src.oid], HeapList
            ):
                raise MiniRuntimeError("extend() requires a list")
            self.read_object(src.oid, ())
            obj.items.extend(list(self.state.heap[src.oid].items))
            self.mutate(ref.oid, (), "extend", chain)
            return None
        if method == "remove":
            self.expect_args("remove", args, 1)
            self.read_deep(ref)
            self.read_deep(args[0])
            for i, item in enumerate(obj.items):
                if self.values_equal(item, args[0]):
                    obj.items.pop(i)
                    self.mutate(ref.oid, (), "remove", chain)
                    return None
            raise MiniRuntimeError("remove(): value not found")
        # clear
        self.expect_args("clear", args, 0)
        obj.items.clear()
        self.mutate(ref.oid, (), "clear", chain)
        return None

    def map_method(
        self,
        ref: ObjRef,
        obj: HeapMap,
        method: str,
        args: list[Value],
        chain: _Chain | None,
    ) -> Value:
        if method in READONLY_MAP_METHODS:
            self.expect_args(method, args, 0)
            self.read_object(ref.oid, ())
            if method == "keys":
                out = self.state.alloc_list(list(obj.entries.keys()))
            else:
                out = self.state.alloc_list(list(obj.entries.values()))
            self.trace.created.add(out.oid)
            return out
        if method not in MUTATING_MAP_METHODS:
            raise MiniRuntimeError(f"mappings have no method '{method}'")
        self.read_object(ref.oid, ())
        if method == "update":
            self.expect_args("update", args, 1)
            src = args[0]
            if not isinstance(src, ObjRef) or not isinstance(
                self.state.heap[src.oid], HeapMap
            ):
                raise MiniRuntimeError("update() requires a mapping")
            self.read_object(src.oid, ())
            obj.entries.update(self.state.heap[src.oid].entries)
            self.mutate(ref.oid, (), "update", chain)
            return None
        # delete
        self.expect_args("delete", args, 1)
        key = args[0]
        if not isinstance(key, (str, int)) or isinstance(key, bool):
            raise MiniRuntimeError("mapping keys must be text or integers")
        if key not in obj.entries:
            raise MiniRuntimeError(
                f"missing key: {format_value(key, self.state.heap)}"
            )
        del obj.entries[key]
        path: Path = (key,)
        self.mutate(ref.oid, path, "delete", chain)
        return None


def execute_cell(state: State, cell: SourceCell, trace_id: int = 0) -> CellTrace:
    """Run one cell against the shared state, recording a trace. Runtime
    errors are recorded on the trace, never raised past this boundary;
    state keeps all effects up to the error."""
    trace = CellTrace(cell_id=cell.id)
    try:
        program = parse_cached(cell.source)
    except LangError as err:
        trace.error = f"parse error: {err.message} (line {err.line}, col {err.col})"
        state.outputs[cell.id] = trace.visible_output()
        state.exec_log.append((cell.id, trace_id))
        return trace
    evaluator = _Evaluator(state, trace)
    # each language-level call burns a dozen host frames; give the full
    # 256-deep call budget room before Python's own limit interferes
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20_000))
    try:
        evaluator.exec_block(program.statements)
    except MiniRuntimeError as err:
        trace.error = err.message
    finally:
        sys.setrecursionlimit(old_limit)
    # allocations that did not survive the cell are not "created"
    trace.created &= state.reachable_oids()
    for name in trace.writes:
        value = state.bindings.get(name)
        if isinstance(value, ObjRef):
            trace.binding_refs[name] = value.oid
    state.outputs[cell.id] = trace.visible_output()
    state.exec_log.append((cell.id, trace_id))
    return trace


class Kernel:
    """One live notebook runtime: a State plus per-cell trace history.

    Re-planning always reads the trace from the last time a cell
    actually ran, so the kernel keeps the latest trace per cell id.
    """

    def __init__(self, env: FreshEnvironment, state: State | None = None):
        self.env = env
        self.state = state if state is not None else fresh_state(env)
        self.history: dict[str, CellTrace] = {}
        self.trace_seq = 0

    def run_cell(self, cell: SourceCell) -> CellTrace:
        trace = execute_cell(self.state, cell, self.trace_seq)
        self.trace_seq += 1
        self.history[cell.id] = trace
        return trace

    def run_notebook(self, nb: Notebook) -> list[CellTrace]:
        return [self.run_cell(c) for c in nb.cells]

    def restart(self) -> None:
        self.state.reset_to_fresh()

    def drop_missing_cells(self, nb: Notebook) -> None:
        """After an edit removes cells, their outputs are no longer part
        of the notebook's visible state."""
        keep = set(nb.ids())
        for cid in list(self.state.outputs):
            if cid not in keep:
                del self.state.outputs[cid]
