"""Suite report rendering: schema-stable JSON and Markdown tables."""

from __future__ import annotations

import json

from .runner import BUCKETS, VERDICTS, SuiteReport

_BUCKET_TITLES = {
    "direct_assignment": "Direct Assignment",
    "reassignment": "Reassignment",
    "mutation": "Mutation",
    "file_system": "File System",
}
_VERDICT_TITLES = {
    "in_scope_match": "In-Scope Match",
    "in_scope_mismatch": "In-Scope Mismatch",
    "out_of_scope_caught": "Out-of-Scope Caught",
    "out_of_scope_not_caught": "Out-of-Scope Not Caught",
    "not_applicable": "Not Applicable",
}


def report_to_obj(report: SuiteReport) -> dict:
    counts = report.verdict_counts()
    ratios = report.mean_ratios()
    return {
        "suite": {
            "case_count": report.case_count(),
            "policies": list(report.policies),
            "categories": list(BUCKETS),
            "verdicts": list(VERDICTS),
        },
        "verdict_counts": counts,
        "mean_rerun_ratio": ratios,
        "cases": [
            {
                "name": r.case_name,
                "policy": r.policy,
                "category": r.category.kind,
                "fs_flag": r.category.fs_flag,
                "bucket": r.bucket,
                "verdict": r.verdict,
                "c_sys": list(r.c_sys),
                "c_e": list(r.c_e),
                "requires_reset": r.requires_reset,
                "rerun_ratio": r.rerun_ratio,
                "state_match": r.state_match,
                "diff": r.diff,
                "refusals": list(r.refusals),
                "reason": r.reason,
            }
            for r in report.results
        ],
    }


def _md_verdict_table(report: SuiteReport) -> list[str]:
    counts = report.verdict_counts()
    lines = []
    for bucket in BUCKETS:
        bucket_total = sum(
            counts[report.policies[0]][bucket].values()
        ) if report.policies else 0
        lines.append(f"### {_BUCKET_TITLES[bucket]} ({bucket_total} cases)")
        lines.append("")
        header = "| Verdict | " + " | ".join(report.policies) + " |"
        sep = "|---" * (len(report.policies) + 1) + "|"
        lines.append(header)
        lines.append(sep)
        for verdict in VERDICTS:
            row = [_VERDICT_TITLES[verdict]]
            for policy in report.policies:
                row.append(str(counts[policy][bucket][verdict]))
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    return lines


def _md_ratio_table(report: SuiteReport) -> list[str]:
    ratios = report.mean_ratios()
    lines = ["### Mean rerun ratio (in-scope matches only)", ""]
    header = "| Category | " + " | ".join(report.policies) + " |"
    lines.append(header)
    lines.append("|---" * (len(report.policies) + 1) + "|")
    for bucket in BUCKETS:
        row = [_BUCKET_TITLES[bucket]]
        for policy in report.policies:
            value = ratios[policy][bucket]
            row.append("—" if value is None else f"{value:.3f}")
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")
    return lines


def _md_case_rows(report: SuiteReport) -> list[str]:
    lines = ["### Per-case results", ""]
    lines.append("| Case | Category | Policy | Verdict | C_sys | C_E | Ratio |")
    lines.append("|---|---|---|---|---|---|---|")
    for r in report.results:
        ce = ",".join(r.c_e) + (" (requires reset)" if r.requires_reset else "")
        ratio = "—" if r.rerun_ratio is None else f"{r.rerun_ratio:.2f}"
        lines.append(
            f"| {r.case_name} | {r.bucket} | {r.policy} | {r.verdict} "
            f"| {','.join(r.c_sys)} | {ce} | {ratio} |"
        )
    lines.append("")
    return lines


def render_report(report: SuiteReport, fmt: str = "md") -> str:
    if fmt == "json":
        return json.dumps(report_to_obj(report), indent=2, sort_keys=True) + "\n"
    if fmt != "md":
        raise ValueError(f"unknown report format: {fmt}")
    lines = ["## Reaction conformance report", ""]
    lines += _md_verdict_table(report)
    lines += _md_ratio_table(report)
    lines += _md_case_rows(report)
    return "\n".join(lines)
