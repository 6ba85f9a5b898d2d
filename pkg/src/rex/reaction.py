"""Reaction planning: dependency graph construction, the four policies,
and plan execution.

Policies:
  rerun-all       restart the runtime and execute every cell (filesystem
                  restored to the initial environment first)
  run-subsequent  the edited cell and everything spatially below it
  static          refuse notebooks with redefinitions, otherwise the
                  edited cell plus its forward def-use closure
  dynamic         trace-driven minimal closure with stale-state erasure;
                  coarse granularity treats every access path as the
                  whole object, fine granularity uses path overlap

An edit normalizes to seed cells: Add seeds the new cell with an empty
prior trace, Delete seeds a phantom carrying the removed cell's last
trace, Swap seeds both moved cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .analyzer import LintViolation, NotebookAnalysis, analyze_notebook, lint_notebook
from .minilang.errors import LangError
from .notebook import Notebook
from .runtime.interpreter import CellTrace, Kernel, parse_cached

Path = tuple


class Scope(Enum):
    IN_SCOPE = "in_scope"
    CAUGHT_BY_LINT = "caught_by_lint"
    OUT_OF_SCOPE_SILENT = "out_of_scope_silent"


CATEGORIES = ("direct_assignment", "reassignment", "mutation", "file_system")

POLICY_TOKENS = ("rerun-all", "run-subsequent", "static", "dynamic")


@dataclass(frozen=True)
class Policy:
    kind: str  # one of POLICY_TOKENS
    granularity: str = "coarse"  # dynamic only: "coarse" | "fine"
    lint_mutations: bool = False  # static only: also refuse mutations

    def __post_init__(self) -> None:
        if self.kind not in POLICY_TOKENS:
            raise ValueError(f"unknown policy: {self.kind}")
        if self.granularity not in ("coarse", "fine"):
            raise ValueError(f"unknown granularity: {self.granularity}")

    @property
    def label(self) -> str:
        if self.kind == "dynamic":
            return f"dynamic-{self.granularity}"
        if self.kind == "static" and self.lint_mutations:
            return "static+lint-mutations"
        return self.kind

    def scope_for(self, category: str) -> Scope:
        """Declared reactivity scope per modification category."""
        if self.kind == "rerun-all":
            return Scope.IN_SCOPE
        if self.kind == "run-subsequent":
            if category == "file_system":
                return Scope.OUT_OF_SCOPE_SILENT
            return Scope.IN_SCOPE
        if self.kind == "static":
            if category == "direct_assignment":
                return Scope.IN_SCOPE
            if category == "reassignment":
                return Scope.CAUGHT_BY_LINT
            if self.lint_mutations:
                return Scope.CAUGHT_BY_LINT
            return Scope.OUT_OF_SCOPE_SILENT
        # dynamic
        if category == "file_system":
            return Scope.OUT_OF_SCOPE_SILENT
        return Scope.IN_SCOPE


@dataclass(frozen=True)
class Edit:
    """One logical user modification."""

    kind: str  # "modify" | "add" | "delete" | "swap"
    cell_id: str
    other_id: str | None = None  # swap only
    new_source: str | None = None  # modify only
    deleted_position: int | None = None  # delete only: old spatial index
    deleted_source: str | None = None  # delete only


@dataclass
class ReactionPlan:
    cells: list[str]
    reset_fs: bool = False
    parse_error: str | None = None


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    kind: str  # DefUse | MutationFlow | SpatialOrder
    label: str


@dataclass
class DependencyGraph:
    nodes: list[str]
    edges: list[GraphEdge] = field(default_factory=list)

    def edges_from(self, cell_id: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.src == cell_id]

    def edges_into(self, cell_id: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.dst == cell_id]


def paths_overlap(p: Path, q: Path) -> bool:
    shorter, longer = (p, q) if len(p) <= len(q) else (q, p)
    return longer[: len(shorter)] == shorter


def build_graph(
    nb: Notebook,
    analysis: NotebookAnalysis,
    traces: dict[str, CellTrace],
) -> DependencyGraph:
    """Forward-only dependency edges: def-use from static analysis
    (nearest preceding definer), mutation flow from trace object/path
    overlap, and spatial order between consecutive cells."""
    order = nb.ids()
    graph = DependencyGraph(nodes=list(order))
    for j, cid in enumerate(order):
        for name in sorted(analysis.effective_uses(cid)):
            definer = None
            for i in range(j - 1, -1, -1):
                if name in analysis.defines(order[i]):
                    definer = order[i]
                    break
            if definer is not None:
                graph.edges.append(GraphEdge(definer, cid, "DefUse", name))
    for i, src in enumerate(order):
        trace = traces.get(src)
        if trace is None:
            continue
        writes = {(m.oid, m.path) for m in trace.mutations}
        writes |= {(oid, ()) for oid in trace.created}
        if not writes:
            continue
        for j in range(i + 1, len(order)):
            dst = order[j]
            dst_trace = traces.get(dst)
            if dst_trace is None:
                continue
            labels = sorted(
                f"obj{oid}" + ("" if not wp and not rp else f"@{wp or rp}")
                for oid, wp in writes
                for roid, rp in dst_trace.reads_objects
                if roid == oid and paths_overlap(wp, rp)
            )
            if labels:
                graph.edges.append(GraphEdge(src, dst, "MutationFlow", labels[0]))
    for i in range(len(order) - 1):
        graph.edges.append(GraphEdge(order[i], order[i + 1], "SpatialOrder", ""))
    return graph


# -- planning --


@dataclass
class _PlannerCell:
    cell_id: str
    pos: float
    trace: CellTrace | None
    uses: set[str]
    defines: set[str]
    setitem_anchors: set[tuple[str, Path]]
    mutation_sites: set[tuple[str, Path]] = field(default_factory=set)
    in_notebook: bool = True
    # filled for seed/traceless cells: object writes resolved from the
    # static mutation sites against the last-run name bindings
    synthetic_writes: set[tuple[int, Path]] = field(default_factory=set)


def _normalize(path: Path, granularity: str) -> Path:
    return path if granularity == "fine" else ()


def _planner_cells(
    nb: Notebook,
    analysis: NotebookAnalysis,
    history: dict[str, CellTrace],
    edit: Edit,
) -> dict[str, _PlannerCell]:
    cells: dict[str, _PlannerCell] = {}
    for i, cell in enumerate(nb.cells):
        cell_analysis = analysis.cells[cell.id]
        anchors = {
            (m.root, m.path)
            for m in cell_analysis.syntactic_mutations()
            if m.kind == "setitem"
        }
        cells[cell.id] = _PlannerCell(
            cell_id=cell.id,
            pos=float(i),
            trace=history.get(cell.id),
            uses=analysis.effective_uses(cell.id),
            defines=set(cell_analysis.defines),
            setitem_anchors=anchors,
            mutation_sites={
                (m.root, m.path)
                for m in analysis.effective_may_mutate(cell.id)
            },
        )
    if edit.kind == "delete":
        # phantom: the removed cell's last run still owes stale-state
        # erasure; it sits just before the cell that took its slot
        try:
            program = parse_cached(edit.deleted_source or "")
            from .analyzer import analyze_cell  # local import to avoid cycle

            old = analyze_cell(program)
            uses, defines = set(old.uses), set(old.defines)
        except LangError:
            uses, defines = set(), set()
        cells[edit.cell_id] = _PlannerCell(
            cell_id=edit.cell_id,
            pos=float(edit.deleted_position or 0) - 0.5,
            trace=history.get(edit.cell_id),
            uses=uses,
            defines=defines,
            setitem_anchors=set(),
            in_notebook=False,
        )
    return cells


def _reads_names(pc: _PlannerCell) -> set[str]:
    names = set(pc.uses)
    if pc.trace is not None:
        names |= pc.trace.reads_names
    return names


def _writes_names(pc: _PlannerCell) -> set[str]:
    names = set(pc.defines)
    if pc.trace is not None:
        names |= pc.trace.writes
    return names


def _reads_objects(pc: _PlannerCell, granularity: str) -> set[tuple[int, Path]]:
    if pc.trace is None:
        return set()
    return {(oid, _normalize(p, granularity)) for oid, p in pc.trace.reads_objects}


def _writes_objects(pc: _PlannerCell, granularity: str) -> set[tuple[int, Path]]:
    out = {(oid, _normalize(p, granularity)) for oid, p in pc.synthetic_writes}
    if pc.trace is None:
        return out
    out |= {(oid, ()) for oid in pc.trace.created}
    out |= {
        (m.oid, _normalize(m.path, granularity)) for m in pc.trace.mutations
    }
    return out


def _dynamic_members(
    cells: dict[str, _PlannerCell],
    seeds: list[str],
    granularity: str,
) -> set[str]:
    creator: dict[int, str] = {}
    mutators: dict[int, list[str]] = {}
    for pc in cells.values():
        if pc.trace is None:
            continue
        for oid in pc.trace.created:
            creator.setdefault(oid, pc.cell_id)
        for rec in pc.trace.mutations:
            mutators.setdefault(rec.oid, []).append(pc.cell_id)

    # seed cells carry changed or never-run sources: their traces (if
    # any) may not reflect what they will mutate, so resolve their
    # static mutation sites against the last-run bindings
    name_to_oid: dict[str, int] = {}
    for pc in sorted(cells.values(), key=lambda c: c.pos):
        if pc.trace is not None:
            name_to_oid.update(pc.trace.binding_refs)
    for cid in set(seeds) | {c.cell_id for c in cells.values() if c.trace is None}:
        pc = cells.get(cid)
        if pc is None:
            continue
        for root, path in pc.mutation_sites:
            oid = name_to_oid.get(root)
            if oid is not None:
                pc.synthetic_writes.add((oid, path))

    def obj_overlap(
        a: set[tuple[int, Path]], b: set[tuple[int, Path]]
    ) -> bool:
        by_oid: dict[int, list[Path]] = {}
        for oid, p in b:
            by_oid.setdefault(oid, []).append(p)
        return any(
            paths_overlap(p, q)
            for oid, p in a
            for q in by_oid.get(oid, ())
        )

    members: set[str] = set(seeds)
    changed = True
    while changed:
        changed = False
        for mid in sorted(members):
            m = cells[mid]

            def add(cid: str | None) -> None:
                nonlocal changed
                if cid is not None and cid in cells and cid not in members:
                    members.add(cid)
                    changed = True

            # (b) stale-state erasure: objects this member mutated must be
            # rebuilt by their creator and earlier mutators, unless the
            # member's current source overwrites the same path absolutely
            if m.trace is not None:
                for rec in m.trace.mutations:
                    if (
                        granularity == "fine"
                        and rec.op == "setitem"
                        and rec.anchor is not None
                        and rec.anchor in m.setitem_anchors
                    ):
                        continue
                    add(creator.get(rec.oid))
                    for other in mutators.get(rec.oid, ()):
                        if cells[other].pos < m.pos:
                            add(other)
            # (d) stale inputs: a re-run member must see the value its
            # nearest preceding writer produced, not the live one
            for name in _reads_names(m):
                writers = [
                    pc
                    for pc in cells.values()
                    if pc.in_notebook and name in _writes_names(pc)
                ]
                if any(pc.pos >= m.pos for pc in writers):
                    preceding = [pc for pc in writers if pc.pos < m.pos]
                    if preceding:
                        add(max(preceding, key=lambda pc: pc.pos).cell_id)
            for oid, p in _reads_objects(m, granularity):
                later = [
                    other
                    for other in mutators.get(oid, ())
                    if cells[other].pos > m.pos
                    and any(
                        paths_overlap(_normalize(rec.path, granularity), p)
                        for rec in cells[other].trace.mutations
                        if rec.oid == oid
                    )
                ]
                if later:
                    add(creator.get(oid))
                    for other in mutators.get(oid, ()):
                        if cells[other].pos < m.pos:
                            add(other)
            # (c) forward propagation to readers of anything written
            member_writes = _writes_names(m)
            member_objs = _writes_objects(m, granularity)
            for pc in cells.values():
                if not pc.in_notebook or pc.pos <= m.pos or pc.cell_id in members:
                    continue
                if _reads_names(pc) & member_writes or obj_overlap(
                    _reads_objects(pc, granularity), member_objs
                ):
                    add(pc.cell_id)
            # (e) write-order restoration: once a member re-applies a
            # write, every later write to the same name or overlapping
            # data must replay after it or the final value inverts
            for oid, path in member_objs:
                for other in mutators.get(oid, ()):
                    if cells[other].pos <= m.pos:
                        continue
                    if any(
                        rec.oid == oid
                        and paths_overlap(_normalize(rec.path, granularity), path)
                        for rec in cells[other].trace.mutations
                    ):
                        add(other)
            for pc in cells.values():
                if not pc.in_notebook or pc.pos <= m.pos:
                    continue
                if _writes_names(pc) & member_writes:
                    add(pc.cell_id)
    return members


def _static_closure(
    nb: Notebook,
    analysis: NotebookAnalysis,
    seeds: list[str],
    seed_defines: set[str],
    positions: dict[str, int],
) -> list[str]:
    """Seed cells plus the forward def-use closure: cells using a name a
    member (re)defines, downstream of that definition."""
    members = set(seeds)
    # name -> spatial position from which its (re)definition flows;
    # -1 marks definitions removed by a delete edit (any reader is stale)
    frontier: dict[str, int] = {name: -1 for name in seed_defines}
    for cid in seeds:
        for name in analysis.defines(cid):
            pos = positions[cid]
            if frontier.get(name, pos + 1) > pos:
                frontier[name] = pos
    changed = True
    while changed:
        changed = False
        for cid in nb.ids():
            if cid in members:
                continue
            pos = positions[cid]
            if any(
                name in frontier and pos > frontier[name]
                for name in analysis.effective_uses(cid)
            ):
                members.add(cid)
                for name in analysis.defines(cid):
                    if frontier.get(name, pos + 1) > pos:
                        frontier[name] = pos
                changed = True
    return sorted(members, key=lambda c: positions[c])


def plan_edits(
    policy: Policy,
    nb: Notebook,
    edits: list[Edit],
    analysis: NotebookAnalysis | None,
    history: dict[str, CellTrace],
) -> ReactionPlan | list[LintViolation]:
    """Turn one or more pending edits into an ordered re-execution plan,
    or refuse with lint violations (static policy on out-of-scope
    notebooks)."""
    known = set(nb.ids())
    for edit in edits:
        if edit.kind != "delete" and edit.cell_id not in known:
            raise KeyError(f"unknown cell id: {edit.cell_id}")
        if edit.kind == "swap" and (
            edit.other_id is None or edit.other_id not in known
        ):
            raise KeyError(f"unknown cell id: {edit.other_id}")

    # a broken edit surfaces its parse error and runs nothing else
    broken: list[str] = []
    error = None
    for edit in edits:
        if edit.kind in ("modify", "add"):
            try:
                parse_cached(nb.cell(edit.cell_id).source)
            except LangError as err:
                broken.append(edit.cell_id)
                if error is None:
                    error = (
                        f"parse error: {err.message} "
                        f"(line {err.line}, col {err.col})"
                    )
    if broken:
        return ReactionPlan(cells=broken, parse_error=error)

    if analysis is None:
        analysis = analyze_notebook(nb)
    positions = {cid: i for i, cid in enumerate(nb.ids())}

    def seed_ids() -> list[str]:
        seeds: list[str] = []
        for edit in edits:
            if edit.kind != "delete":
                seeds.append(edit.cell_id)
            if edit.kind == "swap" and edit.other_id:
                seeds.append(edit.other_id)
        return seeds

    if policy.kind == "rerun-all":
        return ReactionPlan(cells=nb.ids(), reset_fs=True)

    if policy.kind == "run-subsequent":
        starts = []
        for edit in edits:
            if edit.kind == "delete":
                starts.append(edit.deleted_position or 0)
            elif edit.kind == "swap":
                starts.append(
                    min(positions[edit.cell_id], positions[edit.other_id or ""])
                )
            else:
                starts.append(positions[edit.cell_id])
        return ReactionPlan(cells=nb.ids()[min(starts):])

    if policy.kind == "static":
        violations = lint_notebook(nb, scope="static")
        blocking_kinds = {"Redefinition"}
        if policy.lint_mutations:
            blocking_kinds |= {"CrossCellMutation", "ExternalEffect"}
        blocking = [v for v in violations if v.kind in blocking_kinds]
        if blocking:
            return blocking
        deleted_defines: set[str] = set()
        for edit in edits:
            if edit.kind == "delete":
                try:
                    from .analyzer import analyze_cell

                    deleted_defines |= set(
                        analyze_cell(parse_cached(edit.deleted_source or "")).defines
                    )
                except LangError:
                    pass
        return ReactionPlan(
            cells=_static_closure(
                nb, analysis, seed_ids(), deleted_defines, positions
            )
        )

    # dynamic
    cells: dict[str, _PlannerCell] = {}
    for edit in edits:
        for cid, pc in _planner_cells(nb, analysis, history, edit).items():
            cells.setdefault(cid, pc)
    seeds = seed_ids() + [
        edit.cell_id for edit in edits if edit.kind == "delete"
    ]
    members = _dynamic_members(cells, seeds, policy.granularity)
    ordered = sorted(
        (cid for cid in members if cells[cid].in_notebook),
        key=lambda cid: cells[cid].pos,
    )
    return ReactionPlan(cells=ordered)


def plan_reaction(
    policy: Policy,
    nb: Notebook,
    edit: Edit,
    analysis: NotebookAnalysis | None,
    history: dict[str, CellTrace],
) -> ReactionPlan | list[LintViolation]:
    """Single-edit entry point; see plan_edits."""
    return plan_edits(policy, nb, [edit], analysis, history)


def execute_plan(
    kernel: Kernel, nb: Notebook, plan: ReactionPlan
) -> list[CellTrace]:
    """Execute a plan against the kernel's live state. Rerun-all plans
    restart the runtime first (cleared state, filesystem back to the
    initial environment). Runtime errors are recorded per cell and
    execution continues, notebook style."""
    if plan.reset_fs:
        kernel.restart()
    traces = []
    for cid in plan.cells:
        traces.append(kernel.run_cell(nb.cell(cid)))
    return traces
