"""Notebook and cell containers plus the canonical notebook JSON format.

A notebook document is ``{"cells": [{"id": "...", "source": "..."}]}``;
array order is the spatial order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class NotebookFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SourceCell:
    id: str
    source: str


@dataclass
class Notebook:
    cells: list[SourceCell] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise NotebookFormatError(f"duplicate cell ids: {', '.join(dupes)}")

    def ids(self) -> list[str]:
        return [c.id for c in self.cells]

    def cell(self, cell_id: str) -> SourceCell:
        for c in self.cells:
            if c.id == cell_id:
                return c
        raise KeyError(cell_id)

    def position(self, cell_id: str) -> int:
        for i, c in enumerate(self.cells):
            if c.id == cell_id:
                return i
        raise KeyError(cell_id)

    def with_source(self, cell_id: str, source: str) -> "Notebook":
        cells = [
            SourceCell(c.id, source if c.id == cell_id else c.source)
            for c in self.cells
        ]
        return Notebook(cells)


def notebook_from_obj(obj: object) -> Notebook:
    if not isinstance(obj, dict) or "cells" not in obj:
        raise NotebookFormatError("notebook document must be an object with 'cells'")
    raw = obj["cells"]
    if not isinstance(raw, list):
        raise NotebookFormatError("'cells' must be an array")
    cells = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise NotebookFormatError(f"cell {i} must be an object")
        cell_id = entry.get("id")
        source = entry.get("source")
        if not isinstance(cell_id, str) or not cell_id:
            raise NotebookFormatError(f"cell {i} is missing a string 'id'")
        if not isinstance(source, str):
            raise NotebookFormatError(f"cell {cell_id!r} is missing a string 'source'")
        cells.append(SourceCell(cell_id, source))
    return Notebook(cells)


def notebook_to_obj(nb: Notebook) -> dict:
    return {"cells": [{"id": c.id, "source": c.source} for c in nb.cells]}


def load_notebook(path: str) -> Notebook:
    with open(path, encoding="utf-8") as f:
        return notebook_from_obj(json.load(f))
