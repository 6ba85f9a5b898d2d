"""Benchmark case files.

A case is a JSON document::

    {"name": "...", "fs_initial": {"<path>": "<text>"},
     "original": {"cells": [...]}, "modified": {"cells": [...]},
     "category_hint": "..."}

with exactly one cell modified, added, removed, or one adjacent pair
swapped between the two notebooks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..notebook import Notebook, NotebookFormatError, notebook_from_obj
from ..reaction import Edit


class CaseFormatError(ValueError):
    pass


class MultiEditError(CaseFormatError):
    pass


HINTS = ("direct_assignment", "reassignment", "mutation", "file_system")


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    fs_initial: dict[str, str]
    original: Notebook
    modified: Notebook
    edit: Edit
    category_hint: str | None = None
    evades_mutation_lint: bool = False


def diff_notebooks(original: Notebook, modified: Notebook) -> Edit:
    """Derive the single logical edit between two notebooks."""
    orig_ids, mod_ids = original.ids(), modified.ids()
    orig_sources = {c.id: c.source for c in original.cells}
    mod_sources = {c.id: c.source for c in modified.cells}

    if orig_ids == mod_ids:
        changed = [cid for cid in orig_ids if orig_sources[cid] != mod_sources[cid]]
        if len(changed) == 1:
            cid = changed[0]
            return Edit("modify", cid, new_source=mod_sources[cid])
        if not changed:
            raise MultiEditError("original and modified notebooks are identical")
        raise MultiEditError(
            f"more than one cell differs: {', '.join(changed)}"
        )

    if set(orig_ids) == set(mod_ids):
        moved = [cid for cid, oid in zip(mod_ids, _align(orig_ids, mod_ids)) if cid != oid]
        sources_same = all(orig_sources[cid] == mod_sources[cid] for cid in orig_ids)
        if len(moved) == 2 and sources_same:
            swapped = sorted(moved, key=orig_ids.index)
            reordered = list(orig_ids)
            i, j = orig_ids.index(swapped[0]), orig_ids.index(swapped[1])
            reordered[i], reordered[j] = reordered[j], reordered[i]
            if reordered == mod_ids:
                return Edit("swap", swapped[0], other_id=swapped[1])
        raise MultiEditError("cell order differs by more than one swap")

    if len(mod_ids) == len(orig_ids) + 1:
        extra = [cid for cid in mod_ids if cid not in set(orig_ids)]
        if len(extra) == 1 and [c for c in mod_ids if c != extra[0]] == orig_ids:
            if all(orig_sources[cid] == mod_sources[cid] for cid in orig_ids):
                return Edit("add", extra[0])
        raise MultiEditError("more than one cell added or other cells changed")

    if len(mod_ids) == len(orig_ids) - 1:
        missing = [cid for cid in orig_ids if cid not in set(mod_ids)]
        if len(missing) == 1 and [c for c in orig_ids if c != missing[0]] == mod_ids:
            if all(orig_sources[cid] == mod_sources[cid] for cid in mod_ids):
                return Edit(
                    "delete",
                    missing[0],
                    deleted_position=orig_ids.index(missing[0]),
                    deleted_source=orig_sources[missing[0]],
                )
        raise MultiEditError("more than one cell removed or other cells changed")

    raise MultiEditError("notebooks differ by more than one edit")


def _align(orig_ids: list[str], mod_ids: list[str]) -> list[str]:
    return orig_ids


def case_from_obj(obj: object, name_hint: str = "<case>") -> BenchmarkCase:
    if not isinstance(obj, dict):
        raise CaseFormatError(f"{name_hint}: case file must be a JSON object")
    for key in ("name", "original", "modified"):
        if key not in obj:
            raise CaseFormatError(f"{name_hint}: missing required key '{key}'")
    name = obj["name"]
    if not isinstance(name, str) or not name:
        raise CaseFormatError(f"{name_hint}: 'name' must be a non-empty string")
    fs_initial = obj.get("fs_initial", {})
    if not isinstance(fs_initial, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in fs_initial.items()
    ):
        raise CaseFormatError(f"{name}: 'fs_initial' must map paths to text")
    hint = obj.get("category_hint")
    if hint is not None and hint not in HINTS:
        raise CaseFormatError(f"{name}: unknown category_hint '{hint}'")
    try:
        original = notebook_from_obj(obj["original"])
        modified = notebook_from_obj(obj["modified"])
    except NotebookFormatError as err:
        raise CaseFormatError(f"{name}: {err}") from err
    edit = diff_notebooks(original, modified)
    return BenchmarkCase(
        name=name,
        fs_initial=dict(fs_initial),
        original=original,
        modified=modified,
        edit=edit,
        category_hint=hint,
        evades_mutation_lint=bool(obj.get("evades_mutation_lint", False)),
    )


def load_case(path: str | Path) -> BenchmarkCase:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as err:
            raise CaseFormatError(f"{path.name}: invalid JSON: {err}") from err
    return case_from_obj(obj, name_hint=path.name)


def load_suite(directory: str | Path) -> list[BenchmarkCase]:
    directory = Path(directory)
    cases = [load_case(p) for p in sorted(directory.glob("*.json"))]
    names = [c.name for c in cases]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise CaseFormatError(f"duplicate case names: {', '.join(dupes)}")
    return sorted(cases, key=lambda c: c.name)
