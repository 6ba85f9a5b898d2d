"""Instrumented interpreter, state snapshots, and alias-aware equality."""

from .interpreter import (
    BUILTIN_FUNCTIONS,
    CALL_DEPTH_CAP,
    CellTrace,
    Kernel,
    MutationRecord,
    execute_cell,
    parse_cached,
)
from .state import (
    FreshEnvironment,
    Snapshot,
    State,
    canonical_state_obj,
    fresh_state,
    restore,
    snapshot,
    state_diff_summary,
    state_digest,
    states_equal,
)

__all__ = [
    "BUILTIN_FUNCTIONS",
    "CALL_DEPTH_CAP",
    "CellTrace",
    "Kernel",
    "MutationRecord",
    "execute_cell",
    "parse_cached",
    "FreshEnvironment",
    "Snapshot",
    "State",
    "canonical_state_obj",
    "fresh_state",
    "restore",
    "snapshot",
    "state_diff_summary",
    "state_digest",
    "states_equal",
]
