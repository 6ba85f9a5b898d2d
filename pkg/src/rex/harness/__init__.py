"""Benchmark cases, classification, the run protocol, and reports."""

from .cases import (
    BenchmarkCase,
    CaseFormatError,
    MultiEditError,
    case_from_obj,
    diff_notebooks,
    load_case,
    load_suite,
)
from .classify import Category, classify_modification
from .report import render_report, report_to_obj
from .runner import (
    BUCKETS,
    VERDICTS,
    CaseResult,
    SuiteReport,
    run_case,
    run_suite,
)

__all__ = [
    "BenchmarkCase",
    "CaseFormatError",
    "MultiEditError",
    "case_from_obj",
    "diff_notebooks",
    "load_case",
    "load_suite",
    "Category",
    "classify_modification",
    "render_report",
    "report_to_obj",
    "BUCKETS",
    "VERDICTS",
    "CaseResult",
    "SuiteReport",
    "run_case",
    "run_suite",
]
