"""Ground truth for reactions.

The oracle state is a fresh top-to-bottom run of the modified notebook
in an isolated kernel. The minimal reaction set is found by brute
force: restore the post-original snapshot, execute candidate subsets of
the modified notebook's cells in spatial order, and keep the first
subset (smallest, then lexicographically earliest by position) whose
result equals the oracle state. When no subset reaches the oracle from
the live state (stale filesystem appends cannot be erased by
re-execution), the set is recorded as requiring a reset and recomputed
from a fresh state instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .notebook import Notebook
from .runtime.interpreter import Kernel
from .runtime.state import (
    FreshEnvironment,
    State,
    Snapshot,
    fresh_state,
    restore,
    snapshot,
    states_equal,
)

DEFAULT_CELL_CAP = 12


class OracleCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(
            f"notebook has {count} cells, above the oracle cap of {cap}; "
            "refusing to enumerate subsets"
        )
        self.count = count
        self.cap = cap


@dataclass
class OracleResult:
    state: State
    outputs: dict[str, str]


@dataclass(frozen=True)
class MinimalSet:
    cells: tuple[str, ...]
    requires_reset: bool = False

    def size(self) -> int:
        return len(self.cells)


def oracle_state(modified: Notebook, env: FreshEnvironment) -> OracleResult:
    """Expected result: all modified cells executed sequentially from a
    fresh state; independent of the original notebook."""
    kernel = Kernel(env)
    kernel.run_notebook(modified)
    return OracleResult(state=kernel.state, outputs=dict(kernel.state.outputs))


def run_original(original: Notebook, env: FreshEnvironment) -> Kernel:
    kernel = Kernel(env)
    kernel.run_notebook(original)
    return kernel


def _trial_state(base: Snapshot | None, env: FreshEnvironment, modified: Notebook) -> State:
    if base is None:
        return fresh_state(env)
    state = restore(base)
    keep = set(modified.ids())
    for cid in list(state.outputs):
        if cid not in keep:
            del state.outputs[cid]
    return state


def _subset_reaches_oracle(
    base: Snapshot | None,
    env: FreshEnvironment,
    modified: Notebook,
    subset: tuple[int, ...],
    oracle: OracleResult,
) -> bool:
    state = _trial_state(base, env, modified)
    kernel = Kernel(env, state=state)
    for idx in subset:
        kernel.run_cell(modified.cells[idx])
    return states_equal(kernel.state, oracle.state)


def _first_sufficient_subset(
    base: Snapshot | None,
    env: FreshEnvironment,
    modified: Notebook,
    oracle: OracleResult,
) -> tuple[str, ...] | None:
    count = len(modified.cells)
    for size in range(count + 1):
        for subset in combinations(range(count), size):
            if _subset_reaches_oracle(base, env, modified, subset, oracle):
                return tuple(modified.cells[i].id for i in subset)
    return None


def minimal_reaction_set(
    original: Notebook,
    modified: Notebook,
    env: FreshEnvironment,
    cap: int = DEFAULT_CELL_CAP,
    post_original: Snapshot | None = None,
    oracle: OracleResult | None = None,
) -> MinimalSet:
    """Minimum-cardinality subset whose ordered execution from the
    post-original state (edit applied) reaches the oracle; ties broken
    by lexicographically smallest position sequence."""
    if len(modified.cells) > cap:
        raise OracleCapExceeded(len(modified.cells), cap)
    if oracle is None:
        oracle = oracle_state(modified, env)
    if post_original is None:
        post_original = snapshot(run_original(original, env).state)
    found = _first_sufficient_subset(post_original, env, modified, oracle)
    if found is not None:
        return MinimalSet(cells=found, requires_reset=False)
    # stale state cannot be erased by re-execution alone; only policies
    # that reset the environment can be sound, so minimality is measured
    # from a fresh state
    found = _first_sufficient_subset(None, env, modified, oracle)
    assert found is not None  # the full set from fresh is the oracle run
    return MinimalSet(cells=found, requires_reset=True)


def verify_minimality(
    original: Notebook,
    modified: Notebook,
    env: FreshEnvironment,
    minimal: MinimalSet,
    cap: int = DEFAULT_CELL_CAP,
) -> bool:
    """Exhaustively confirm that no strictly smaller subset reaches the
    oracle (from the snapshot, or from fresh for reset sets)."""
    if len(modified.cells) > cap:
        raise OracleCapExceeded(len(modified.cells), cap)
    oracle = oracle_state(modified, env)
    base = None if minimal.requires_reset else snapshot(
        run_original(original, env).state
    )
    if minimal.requires_reset:
        # also confirm no subset at all works from the live state
        live = snapshot(run_original(original, env).state)
        count = len(modified.cells)
        for size in range(count + 1):
            for subset in combinations(range(count), size):
                if _subset_reaches_oracle(live, env, modified, subset, oracle):
                    return False
    count = len(modified.cells)
    for size in range(minimal.size()):
        for subset in combinations(range(count), size):
            if _subset_reaches_oracle(base, env, modified, subset, oracle):
                return False
    ids = [modified.cells[i].id for i in range(count)]
    chosen = tuple(i for i, cid in enumerate(ids) if cid in set(minimal.cells))
    return _subset_reaches_oracle(base, env, modified, chosen, oracle)
