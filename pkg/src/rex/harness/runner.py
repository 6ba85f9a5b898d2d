"""The per-case protocol and suite runner.

For each (case, policy): run the original notebook fresh, apply the
edit, let the policy plan and execute its reaction on the live state,
compute the oracle in an isolated fresh kernel, then classify the
outcome. A refused reaction on code the policy's declared scope says it
lints counts as caught; executing out-of-scope code is never caught, no
matter how the state ends up. Rerun ratios compare the policy's cell
count against the brute-force minimal set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..analyzer import analyze_notebook
from ..oracle import (
    MinimalSet,
    OracleCapExceeded,
    minimal_reaction_set,
    oracle_state,
)
from ..reaction import Policy, ReactionPlan, Scope, execute_plan, plan_reaction
from ..runtime import FreshEnvironment, Kernel, snapshot, state_digest, states_equal
from ..runtime.state import state_diff_summary
from .cases import BenchmarkCase, load_suite
from .classify import Category, classify_modification

VERDICTS = (
    "in_scope_match",
    "in_scope_mismatch",
    "out_of_scope_caught",
    "out_of_scope_not_caught",
    "not_applicable",
)


@dataclass
class CaseResult:
    case_name: str
    policy: str
    category: Category
    verdict: str
    c_sys: tuple[str, ...]
    c_e: tuple[str, ...]
    requires_reset: bool
    rerun_ratio: float | None
    state_match: bool
    diff: str | None = None
    refusals: tuple[str, ...] = ()
    reason: str | None = None
    digest: str | None = None  # post-reaction state digest

    @property
    def bucket(self) -> str:
        return self.category.bucket


def effective_scopes(policy: Policy, category: Category) -> set[Scope]:
    scopes = {policy.scope_for(category.kind)}
    if category.fs_flag:
        scopes.add(policy.scope_for("file_system"))
    return scopes


def run_case(
    case: BenchmarkCase,
    policy: Policy,
    oracle_cap: int = 12,
    minimal_cache: dict[str, MinimalSet] | None = None,
) -> CaseResult:
    env = FreshEnvironment(dict(case.fs_initial))

    # (1) fresh kernel runs the original top to bottom
    kernel = Kernel(env)
    kernel.run_notebook(case.original)
    post_original = snapshot(kernel.state)

    # (2) the single edit is applied; classification sees the original
    # traces plus both sources of the edited cell
    analysis = analyze_notebook(case.modified)
    category = classify_modification(case, analysis, kernel.history)

    # (3) the policy plans and executes its reaction on the live state
    plan_or_refusal = plan_reaction(
        policy, case.modified, case.edit, analysis, kernel.history
    )
    kernel.drop_missing_cells(case.modified)
    refused = isinstance(plan_or_refusal, list)
    if refused:
        refusals = tuple(v.message for v in plan_or_refusal)
        c_sys: tuple[str, ...] = ()
    else:
        assert isinstance(plan_or_refusal, ReactionPlan)
        execute_plan(kernel, case.modified, plan_or_refusal)
        refusals = ()
        c_sys = tuple(plan_or_refusal.cells)

    # (4) a second fresh kernel produces the expected result
    oracle = oracle_state(case.modified, env)
    match = states_equal(kernel.state, oracle.state)

    # minimal set C_E (shared across policies via the cache)
    try:
        if minimal_cache is not None and case.name in minimal_cache:
            minimal = minimal_cache[case.name]
        else:
            minimal = minimal_reaction_set(
                case.original,
                case.modified,
                env,
                cap=oracle_cap,
                post_original=post_original,
                oracle=oracle,
            )
            if minimal_cache is not None:
                minimal_cache[case.name] = minimal
    except OracleCapExceeded as err:
        return CaseResult(
            case_name=case.name,
            policy=policy.label,
            category=category,
            verdict="not_applicable",
            c_sys=c_sys,
            c_e=(),
            requires_reset=False,
            rerun_ratio=None,
            state_match=match,
            reason=str(err),
            digest=state_digest(kernel.state),
        )

    # (5) verdict
    scopes = effective_scopes(policy, category)
    if refused:
        if scopes != {Scope.IN_SCOPE}:
            verdict = "out_of_scope_caught"
        elif match:
            verdict = "in_scope_match"
        else:
            verdict = "in_scope_mismatch"
    elif scopes != {Scope.IN_SCOPE}:
        verdict = "out_of_scope_not_caught"
    else:
        verdict = "in_scope_match" if match else "in_scope_mismatch"

    ratio = None
    if verdict == "in_scope_match" and minimal.size() > 0:
        ratio = len(c_sys) / minimal.size()
    diff = None
    if not match:
        diff = state_diff_summary(kernel.state, oracle.state)
    return CaseResult(
        case_name=case.name,
        policy=policy.label,
        category=category,
        verdict=verdict,
        c_sys=c_sys,
        c_e=tuple(minimal.cells),
        requires_reset=minimal.requires_reset,
        rerun_ratio=ratio,
        state_match=match,
        diff=diff,
        refusals=refusals,
        digest=state_digest(kernel.state),
    )


BUCKETS = ("direct_assignment", "reassignment", "mutation", "file_system")


@dataclass
class SuiteReport:
    policies: list[str]
    results: list[CaseResult] = field(default_factory=list)

    def verdict_counts(self) -> dict[str, dict[str, dict[str, int]]]:
        counts: dict[str, dict[str, dict[str, int]]] = {}
        for policy in self.policies:
            counts[policy] = {
                bucket: {v: 0 for v in VERDICTS} for bucket in BUCKETS
            }
        for r in self.results:
            counts[r.policy][r.bucket][r.verdict] += 1
        return counts

    def mean_ratios(self) -> dict[str, dict[str, float | None]]:
        sums: dict[tuple[str, str], list[float]] = {}
        for r in self.results:
            if r.verdict == "in_scope_match" and r.rerun_ratio is not None:
                sums.setdefault((r.policy, r.bucket), []).append(r.rerun_ratio)
        out: dict[str, dict[str, float | None]] = {}
        for policy in self.policies:
            out[policy] = {}
            for bucket in BUCKETS:
                ratios = sums.get((policy, bucket))
                out[policy][bucket] = (
                    sum(ratios) / len(ratios) if ratios else None
                )
        return out

    def case_count(self) -> int:
        return len({r.case_name for r in self.results})

    def failures(self, policy: str | None = None) -> list[CaseResult]:
        bad = ("in_scope_mismatch", "out_of_scope_not_caught")
        return [
            r
            for r in self.results
            if r.verdict in bad and (policy is None or r.policy == policy)
        ]


def run_suite(
    cases: list[BenchmarkCase] | str | Path,
    policies: list[Policy],
    oracle_cap: int = 12,
) -> SuiteReport:
    """Run every (case, policy) pair; per-case failures become rows,
    they never abort the suite."""
    if not isinstance(cases, list):
        cases = load_suite(cases)
    report = SuiteReport(policies=[p.label for p in policies])
    minimal_cache: dict[str, MinimalSet] = {}
    for case in sorted(cases, key=lambda c: c.name):
        for policy in policies:
            report.results.append(
                run_case(case, policy, oracle_cap, minimal_cache)
            )
    report.results.sort(key=lambda r: (r.case_name, r.policy))
    return report
