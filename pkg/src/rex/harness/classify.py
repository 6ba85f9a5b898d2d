"""Modification classification.

Categories follow the complexity hierarchy: reassignment, then
mutation, then direct assignment, judged over the cells connected to
the edit through shared names or traced objects (its upstream and
downstream dependents). The filesystem flag is orthogonal.

A modification is reassignment when any connected cell binds a name
that some other cell also binds; else mutation when the edit itself
mutates (in place or an external resource) or any connected cell below
the edit does; else direct assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..analyzer import CellAnalysis, NotebookAnalysis, analyze_cell, analyze_notebook
from ..minilang.errors import LangError
from ..runtime.interpreter import CellTrace, parse_cached
from .cases import BenchmarkCase

_FS_WRITE_OPS = {"write", "append"}


@dataclass(frozen=True)
class Category:
    kind: str  # direct_assignment | reassignment | mutation
    fs_flag: bool

    @property
    def bucket(self) -> str:
        """Reporting bucket; filesystem cases form their own row."""
        return "file_system" if self.fs_flag else self.kind


def _safe_analyze(source: str) -> CellAnalysis:
    try:
        return analyze_cell(parse_cached(source))
    except LangError:
        return CellAnalysis()


@dataclass
class _Touch:
    names: set[str]
    objects: set[int]
    defines: set[str]
    mutates: bool
    fs_any: bool


def _touch_sets(
    case: BenchmarkCase,
    analysis: NotebookAnalysis,
    traces: dict[str, CellTrace],
) -> tuple[dict[str, _Touch], dict[str, float]]:
    touches: dict[str, _Touch] = {}
    positions: dict[str, float] = {}
    for i, cell in enumerate(case.modified.cells):
        cell_analysis = analysis.cells[cell.id]
        trace = traces.get(cell.id)
        names = set(cell_analysis.defines) | analysis.effective_uses(cell.id)
        objects: set[int] = set()
        mutates = bool(cell_analysis.syntactic_mutations())
        fs_any = bool(analysis.effective_fs(cell.id))
        mutates = mutates or any(
            op in _FS_WRITE_OPS for op, _ in analysis.effective_fs(cell.id)
        )
        if trace is not None:
            names |= trace.reads_names | trace.writes
            objects |= {oid for oid, _ in trace.reads_objects}
            objects |= trace.mutated_oids() | trace.created
            mutates = mutates or bool(trace.mutations)
            mutates = mutates or any(op in _FS_WRITE_OPS for op, _, _ in trace.fs_ops)
            fs_any = fs_any or bool(trace.fs_ops)
        touches[cell.id] = _Touch(
            names=names,
            objects=objects,
            defines=set(cell_analysis.defines),
            mutates=mutates,
            fs_any=fs_any,
        )
        positions[cell.id] = float(i)
    edit = case.edit
    if edit.kind == "delete":
        old = _safe_analyze(edit.deleted_source or "")
        trace = traces.get(edit.cell_id)
        names = set(old.defines) | set(old.uses)
        objects: set[int] = set()
        mutates = bool(old.syntactic_mutations()) or any(
            op in _FS_WRITE_OPS for op, _ in old.fs_effects
        )
        fs_any = bool(old.fs_effects)
        if trace is not None:
            names |= trace.reads_names | trace.writes
            objects |= {oid for oid, _ in trace.reads_objects}
            objects |= trace.mutated_oids() | trace.created
            mutates = mutates or bool(trace.mutations)
            mutates = mutates or any(op in _FS_WRITE_OPS for op, _, _ in trace.fs_ops)
            fs_any = fs_any or bool(trace.fs_ops)
        touches[edit.cell_id] = _Touch(names, objects, set(old.defines), mutates, fs_any)
        positions[edit.cell_id] = float(edit.deleted_position or 0) - 0.5
    elif edit.kind == "modify":
        # the edit spans both sources: fold the old one in
        old_cell = case.original.cell(edit.cell_id)
        old = _safe_analyze(old_cell.source)
        touch = touches[edit.cell_id]
        touch.names |= old.defines | old.uses
        touch.defines |= set(old.defines)
        touch.mutates = touch.mutates or bool(old.syntactic_mutations()) or any(
            op in _FS_WRITE_OPS for op, _ in old.fs_effects
        )
        touch.fs_any = touch.fs_any or bool(old.fs_effects)
    return touches, positions


def classify_modification(
    case: BenchmarkCase,
    analysis: NotebookAnalysis | None = None,
    traces: dict[str, CellTrace] | None = None,
) -> Category:
    if analysis is None:
        analysis = analyze_notebook(case.modified)
    traces = traces or {}
    touches, positions = _touch_sets(case, analysis, traces)

    seeds = [case.edit.cell_id]
    if case.edit.kind == "swap" and case.edit.other_id:
        seeds.append(case.edit.other_id)
    component = set(seeds)
    changed = True
    while changed:
        changed = False
        for cid, touch in touches.items():
            if cid in component:
                continue
            for member in list(component):
                m = touches[member]
                if touch.names & m.names or touch.objects & m.objects:
                    component.add(cid)
                    changed = True
                    break

    binders: dict[str, set[str]] = {}
    for cid, touch in touches.items():
        for name in touch.defines:
            binders.setdefault(name, set()).add(cid)
    for cid in sorted(component):
        for name in touches[cid].defines:
            if len(binders.get(name, set())) > 1:
                return Category("reassignment", _fs_flag(component, touches))

    anchor = min(positions[s] for s in seeds)
    edit_mutates = any(touches[s].mutates for s in seeds)
    downstream_mutates = any(
        touches[cid].mutates
        for cid in component
        if positions[cid] > anchor
    )
    if edit_mutates or downstream_mutates:
        return Category("mutation", _fs_flag(component, touches))
    return Category("direct_assignment", _fs_flag(component, touches))


def _fs_flag(component: set[str], touches: dict[str, _Touch]) -> bool:
    return any(touches[cid].fs_any for cid in component)
