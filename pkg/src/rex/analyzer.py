"""Static per-cell analysis: defs, uses, potential mutations, external
effects, plus notebook-level joins and the out-of-scope linter.

Function bodies are analyzed separately; their free names and global
mutations join a cell's effective sets only where the function is
called. Collection arguments passed to user-defined functions are
conservatively treated as potential mutations; "collection-typed-
looking" is resolved at notebook level from binding shapes (displays,
range(), keys()/values(), aliases and subscripts of those).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .minilang import nodes as n
from .minilang.errors import LangError
from .notebook import Notebook
from .runtime.interpreter import (
    BUILTIN_FUNCTIONS,
    MUTATING_LIST_METHODS,
    MUTATING_MAP_METHODS,
    CellTrace,
    parse_cached,
)

Path = tuple

_MUTATING_METHODS = MUTATING_LIST_METHODS | MUTATING_MAP_METHODS
_FS_BUILTINS = {"file_write", "file_append", "file_read", "file_exists"}
_FS_WRITE_OPS = {"write", "append"}


@dataclass(frozen=True)
class MutationSite:
    root: str
    path: Path
    kind: str  # "setitem" | "method" | "call_arg"


@dataclass
class CellAnalysis:
    defines: set[str] = field(default_factory=set)
    uses: set[str] = field(default_factory=set)
    may_mutate: set[MutationSite] = field(default_factory=set)
    fs_effects: set[tuple[str, str | None]] = field(default_factory=set)
    defines_functions: set[str] = field(default_factory=set)
    calls_user_functions: set[tuple[str, tuple[str, ...]]] = field(
        default_factory=set
    )
    # last-binding shape per name: "collection", ("alias", root), "other"
    binding_shapes: dict[str, object] = field(default_factory=dict)

    def syntactic_mutations(self) -> set[MutationSite]:
        return {m for m in self.may_mutate if m.kind != "call_arg"}


@dataclass
class FunctionInfo:
    name: str
    params: tuple[str, ...]
    frees: set[str] = field(default_factory=set)
    global_mutations: set[MutationSite] = field(default_factory=set)
    fs_effects: set[tuple[str, str | None]] = field(default_factory=set)
    calls: set[str] = field(default_factory=set)


def _expr_shape(e: n.Expr) -> object:
    if isinstance(e, (n.ListDisplay, n.MapDisplay)):
        return "collection"
    if isinstance(e, n.Call) and e.callee == "range":
        return "collection"
    if isinstance(e, n.MethodCall) and e.method in ("keys", "values"):
        return "collection"
    if isinstance(e, n.Name):
        return ("alias", e.id)
    if isinstance(e, n.Subscript):
        return _expr_shape(e.base)
    if isinstance(e, n.BinOp) and e.op == "+":
        left, right = _expr_shape(e.left), _expr_shape(e.right)
        if left == "collection" or right == "collection":
            return "collection"
        for shape in (left, right):
            if isinstance(shape, tuple):
                return shape
    return "other"


def _chain_root(e: n.Expr) -> tuple[str, Path] | None:
    """Root name and literal path prefix of a Name/Subscript chain; the
    path is truncated at the first computed key."""
    steps: list = []
    while isinstance(e, n.Subscript):
        if isinstance(e.index, n.IntLit):
            steps.append(e.index.value)
        elif isinstance(e.index, n.TextLit):
            steps.append(e.index.value)
        else:
            steps.append(None)
        e = e.base
    if not isinstance(e, n.Name):
        return None
    steps.reverse()
    literal: list = []
    for s in steps:
        if s is None:
            break
        literal.append(s)
    return e.id, tuple(literal)


class _Walker:
    """Collects uses/mutations/effects for one scope (cell top level or
    one function body)."""

    def __init__(self, locals_: set[str] | None = None):
        # names local to a function body; None means cell scope
        self.locals = locals_
        self.bound: set[str] = set()  # definitely bound so far
        self.defines: set[str] = set()
        self.uses: set[str] = set()
        self.mutations: set[MutationSite] = set()
        self.fs_effects: set[tuple[str, str | None]] = set()
        self.calls: set[tuple[str, tuple[str, ...]]] = set()
        self.shapes: dict[str, object] = {}

    def read(self, name: str) -> None:
        if self.locals is not None and name in self.locals:
            return
        if name in self.bound or name in BUILTIN_FUNCTIONS:
            return
        self.uses.add(name)

    def mutate_site(self, root: str, path: Path, kind: str) -> None:
        if self.locals is not None and root in self.locals:
            return
        if root in self.bound:
            # mutation through a binding created earlier in the same
            # scope; only the dynamic tracer can see where it points
            return
        self.mutations.add(MutationSite(root, path, kind))
        self.read(root)

    def walk_block(self, stmts: list[n.Stmt], definite: bool) -> None:
        for s in stmts:
            self.walk_stmt(s, definite)

    def walk_stmt(self, s: n.Stmt, definite: bool) -> None:
        if isinstance(s, n.Assign):
            for v in s.values:
                self.walk_expr(v)
            for target, v in zip(s.targets, s.values):
                if isinstance(target, n.Name):
                    self.defines.add(target.id)
                    self.shapes[target.id] = _expr_shape(v)
                    if definite:
                        self.bound.add(target.id)
                else:
                    self.walk_subscript_target(target)
        elif isinstance(s, n.ExprStmt):
            self.walk_expr(s.expr)
        elif isinstance(s, n.FuncDef):
            self.defines.add(s.name)
            if definite:
                self.bound.add(s.name)
        elif isinstance(s, n.If):
            self.walk_expr(s.cond)
            self.walk_block(s.then_body, definite=False)
            self.walk_block(s.else_body, definite=False)
        elif isinstance(s, n.For):
            self.walk_expr(s.iterable)
            self.defines.add(s.var)
            self.walk_block(s.body, definite=False)
        elif isinstance(s, n.Return):
            if s.value is not None:
                self.walk_expr(s.value)

    def walk_subscript_target(self, target: n.Subscript) -> None:
        self.walk_expr(target.base)
        self.walk_expr(target.index)
        rooted = _chain_root(target)
        if rooted is not None:
            root, path = rooted
            self.mutate_site(root, path, "setitem")

    def walk_expr(self, e: n.Expr) -> None:
        if isinstance(e, n.Name):
            self.read(e.id)
        elif isinstance(e, n.ListDisplay):
            for item in e.items:
                self.walk_expr(item)
        elif isinstance(e, n.MapDisplay):
            for k, v in e.entries:
                self.walk_expr(k)
                self.walk_expr(v)
        elif isinstance(e, n.Subscript):
            self.walk_expr(e.base)
            self.walk_expr(e.index)
        elif isinstance(e, n.Call):
            self.walk_call(e)
        elif isinstance(e, n.MethodCall):
            self.walk_expr(e.receiver)
            for a in e.args:
                self.walk_expr(a)
            if e.method in _MUTATING_METHODS:
                rooted = _chain_root(e.receiver)
                if rooted is not None:
                    root, path = rooted
                    self.mutate_site(root, path, "method")
        elif isinstance(e, (n.BinOp, n.BoolOp)):
            self.walk_expr(e.left)
            self.walk_expr(e.right)
        elif isinstance(e, n.UnaryOp):
            self.walk_expr(e.operand)
        # literals carry nothing

    def walk_call(self, e: n.Call) -> None:
        for a in e.args:
            self.walk_expr(a)
        if e.callee in _FS_BUILTINS:
            op = e.callee.removeprefix("file_")
            path = e.args[0].value if e.args and isinstance(e.args[0], n.TextLit) else None
            self.fs_effects.add((op, path))
            return
        if e.callee in BUILTIN_FUNCTIONS:
            return
        self.read(e.callee)
        arg_roots = []
        for a in e.args:
            rooted = _chain_root(a)
            if rooted is not None:
                root, path = rooted
                if self.locals is None or root not in self.locals:
                    arg_roots.append(root)
                    self.mutate_site(root, path, "call_arg")
        self.calls.add((e.callee, tuple(arg_roots)))


def _collect_assigned(stmts: list[n.Stmt]) -> set[str]:
    names: set[str] = set()
    for s in stmts:
        if isinstance(s, n.Assign):
            for t in s.targets:
                if isinstance(t, n.Name):
                    names.add(t.id)
        elif isinstance(s, n.If):
            names |= _collect_assigned(s.then_body)
            names |= _collect_assigned(s.else_body)
        elif isinstance(s, n.For):
            names.add(s.var)
            names |= _collect_assigned(s.body)
        elif isinstance(s, n.FuncDef):
            names.add(s.name)
    return names


def analyze_function(fd: n.FuncDef) -> FunctionInfo:
    body = list(fd.body)
    locals_ = set(fd.params) | _collect_assigned(body)
    walker = _Walker(locals_=locals_)
    walker.walk_block(body, definite=True)
    return FunctionInfo(
        name=fd.name,
        params=tuple(fd.params),
        frees=set(walker.uses),
        global_mutations=set(walker.mutations),
        fs_effects=set(walker.fs_effects),
        calls={callee for callee, _ in walker.calls},
    )


def analyze_cell(p: n.Program) -> CellAnalysis:
    """Pure function of the Program: top-level bound names, free names
    read, potential in-place mutations, and filesystem effects."""
    walker = _Walker(locals_=None)
    walker.walk_block(p.statements, definite=True)
    analysis = CellAnalysis(
        defines=set(walker.defines),
        uses=set(walker.uses),
        may_mutate=set(walker.mutations),
        fs_effects=set(walker.fs_effects),
        calls_user_functions=set(walker.calls),
        binding_shapes=dict(walker.shapes),
    )
    for s in p.statements:
        if isinstance(s, n.FuncDef):
            analysis.defines_functions.add(s.name)
    return analysis


@dataclass
class NotebookAnalysis:
    """Per-cell analyses joined across the notebook: function bodies are
    resolved at call sites and argument mutations filtered to
    collection-looking roots."""

    order: list[str]
    cells: dict[str, CellAnalysis]
    functions: dict[str, FunctionInfo]
    looking: set[str]

    def defines(self, cell_id: str) -> set[str]:
        return self.cells[cell_id].defines

    def _called_functions(self, cell_id: str) -> set[str]:
        seen: set[str] = set()
        work = [callee for callee, _ in self.cells[cell_id].calls_user_functions]
        while work:
            fn = work.pop()
            if fn in seen or fn not in self.functions:
                continue
            seen.add(fn)
            work.extend(self.functions[fn].calls)
        return seen

    def effective_uses(self, cell_id: str) -> set[str]:
        analysis = self.cells[cell_id]
        uses = set(analysis.uses)
        for fn in self._called_functions(cell_id):
            uses |= self.functions[fn].frees
        return uses

    def effective_may_mutate(self, cell_id: str) -> set[MutationSite]:
        analysis = self.cells[cell_id]
        sites = set(analysis.syntactic_mutations())
        for site in analysis.may_mutate:
            if site.kind == "call_arg" and site.root in self.looking:
                sites.add(site)
        for fn in self._called_functions(cell_id):
            sites |= self.functions[fn].global_mutations
        return sites

    def effective_fs(self, cell_id: str) -> set[tuple[str, str | None]]:
        effects = set(self.cells[cell_id].fs_effects)
        for fn in self._called_functions(cell_id):
            effects |= self.functions[fn].fs_effects
        return effects

    def binders(self) -> dict[str, list[str]]:
        """Name -> cells that (may) bind it, in spatial order."""
        out: dict[str, list[str]] = {}
        for cid in self.order:
            for name in sorted(self.cells[cid].defines):
                out.setdefault(name, []).append(cid)
        return out


def analyze_notebook(nb: Notebook) -> NotebookAnalysis:
    cells: dict[str, CellAnalysis] = {}
    functions: dict[str, FunctionInfo] = {}
    for cell in nb.cells:
        try:
            program = parse_cached(cell.source)
        except LangError:
            # a broken cell is reported at plan time and never executed;
            # it contributes nothing to the static picture
            cells[cell.id] = CellAnalysis()
            continue
        cells[cell.id] = analyze_cell(program)
        for s in program.statements:
            if isinstance(s, n.FuncDef):
                functions[s.name] = analyze_function(s)
    # collection-looking fixpoint over binding shapes
    looking: set[str] = set()
    changed = True
    while changed:
        changed = False
        for analysis in cells.values():
            for name, shape in analysis.binding_shapes.items():
                if name in looking:
                    continue
                if shape == "collection" or (
                    isinstance(shape, tuple) and shape[1] in looking
                ):
                    looking.add(name)
                    changed = True
    return NotebookAnalysis(
        order=nb.ids(), cells=cells, functions=functions, looking=looking
    )


# -- linting --


@dataclass(frozen=True)
class LintViolation:
    kind: str  # Redefinition | CrossCellMutation | ExternalEffect
    cells: tuple[str, ...]
    name: str
    message: str


def lint_notebook(nb: Notebook, scope: str = "static") -> list[LintViolation]:
    """Out-of-scope feature detection under the static-dataflow scope;
    permissive scopes report nothing."""
    if scope != "static":
        return []
    analysis = analyze_notebook(nb)
    violations: list[LintViolation] = []
    for name, binder_cells in sorted(analysis.binders().items()):
        if len(binder_cells) > 1:
            violations.append(
                LintViolation(
                    kind="Redefinition",
                    cells=tuple(binder_cells),
                    name=name,
                    message=(
                        f"name '{name}' is bound by more than one cell: "
                        + ", ".join(binder_cells)
                    ),
                )
            )
    definers = analysis.binders()
    for cid in analysis.order:
        for site in sorted(
            analysis.effective_may_mutate(cid), key=lambda m: (m.root, m.path, m.kind)
        ):
            owner_cells = [c for c in definers.get(site.root, []) if c != cid]
            if owner_cells and site.root not in analysis.defines(cid):
                violations.append(
                    LintViolation(
                        kind="CrossCellMutation",
                        cells=(cid,),
                        name=site.root,
                        message=(
                            f"cell {cid} may mutate '{site.root}' defined in "
                            + ", ".join(owner_cells)
                        ),
                    )
                )
                break  # one violation per cell is enough
    for cid in analysis.order:
        effects = analysis.effective_fs(cid)
        if effects:
            ops = ", ".join(sorted({op for op, _ in effects}))
            violations.append(
                LintViolation(
                    kind="ExternalEffect",
                    cells=(cid,),
                    name=ops,
                    message=f"cell {cid} touches the filesystem ({ops})",
                )
            )
    return violations


# -- feature flags --


@dataclass(frozen=True)
class FeatureSet:
    has_direct_assignment: bool
    has_reassignment: bool
    has_mutation: bool
    has_fs_effect: bool


def feature_set(nb: Notebook, traces: dict[str, CellTrace] | None = None) -> FeatureSet:
    analysis = analyze_notebook(nb)
    direct = any(analysis.cells[cid].defines for cid in analysis.order)
    reassignment = any(len(cells) > 1 for cells in analysis.binders().values())
    mutation = any(
        analysis.effective_may_mutate(cid) for cid in analysis.order
    )
    if traces:
        mutation = mutation or any(t.mutations for t in traces.values())
    fs = any(analysis.effective_fs(cid) for cid in analysis.order)
    if traces:
        fs = fs or any(t.fs_ops for t in traces.values())
    return FeatureSet(direct, reassignment, mutation, fs)
