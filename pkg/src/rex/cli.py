"""Command-line interface.

    rex run --suite <dir> --policy all|rerun-all|run-subsequent|static|dynamic
            [--granularity coarse|fine] [--lint-mutations]
            [--format md|json] [--out <file>]
    rex case <file> --policy <p> [--explain]
    rex oracle <file>
    rex lint <notebook file>
    rex serve [--port N]      (REX_PORT overrides the default 8787)

`rex run` exits 0 iff the selected policies produced no in-scope
mismatch and no uncaught out-of-scope execution.
"""

from __future__ import annotations

import json
import os
import sys
from importlib import resources
from pathlib import Path

import click

from .harness import load_case, load_suite, render_report, run_case, run_suite
from .notebook import load_notebook
from .oracle import OracleCapExceeded, minimal_reaction_set, oracle_state
from .reaction import POLICY_TOKENS, Policy
from .runtime import FreshEnvironment, state_digest
from .analyzer import lint_notebook


def builtin_corpus_dir() -> Path:
    return Path(str(resources.files("rex").joinpath("corpus")))


def _policies(token: str, granularity: str, lint_mutations: bool) -> list[Policy]:
    if token == "all":
        return [
            Policy("rerun-all"),
            Policy("run-subsequent"),
            Policy("static", lint_mutations=lint_mutations),
            Policy("dynamic", granularity=granularity),
        ]
    if token == "static":
        return [Policy("static", lint_mutations=lint_mutations)]
    if token == "dynamic":
        return [Policy("dynamic", granularity=granularity)]
    return [Policy(token)]


@click.group()
def main() -> None:
    """Reactive notebook kernel and reaction-conformance harness."""


@main.command()
@click.option(
    "--suite",
    "suite_dir",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="Case directory (defaults to the shipped corpus).",
)
@click.option(
    "--policy",
    "policy_token",
    type=click.Choice(("all",) + POLICY_TOKENS),
    default="all",
    show_default=True,
)
@click.option(
    "--granularity",
    type=click.Choice(["coarse", "fine"]),
    default="coarse",
    show_default=True,
)
@click.option("--lint-mutations", is_flag=True, default=False)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["md", "json"]),
    default="md",
    show_default=True,
)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def run(suite_dir, policy_token, granularity, lint_mutations, fmt, out_path):
    """Run the benchmark suite under one or all policies."""
    directory = Path(suite_dir) if suite_dir else builtin_corpus_dir()
    cases = load_suite(directory)
    policies = _policies(policy_token, granularity, lint_mutations)
    report = run_suite(cases, policies)
    text = render_report(report, fmt)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)
    failures = report.failures()
    if failures:
        click.echo(
            f"{len(failures)} failing (case, policy) pairs", err=True
        )
        sys.exit(1)


@main.command()
@click.argument("case_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--policy",
    "policy_token",
    type=click.Choice(POLICY_TOKENS),
    default="dynamic",
    show_default=True,
)
@click.option(
    "--granularity",
    type=click.Choice(["coarse", "fine"]),
    default="coarse",
    show_default=True,
)
@click.option("--lint-mutations", is_flag=True, default=False)
@click.option("--explain", is_flag=True, default=False)
def case(case_file, policy_token, granularity, lint_mutations, explain):
    """Run one case under one policy."""
    bench = load_case(case_file)
    policy = _policies(policy_token, granularity, lint_mutations)[0]
    result = run_case(bench, policy)
    click.echo(f"case:     {result.case_name}")
    click.echo(
        f"category: {result.category.kind}"
        + (" (+fs)" if result.category.fs_flag else "")
    )
    click.echo(f"policy:   {result.policy}")
    click.echo(f"verdict:  {result.verdict}")
    if explain:
        click.echo(f"plan:     {', '.join(result.c_sys) or '(refused)'}")
        minimal = ", ".join(result.c_e)
        if result.requires_reset:
            minimal += " (requires reset)"
        click.echo(f"C_E:      {minimal}")
        if result.rerun_ratio is not None:
            click.echo(f"ratio:    {result.rerun_ratio:.3f}")
        for message in result.refusals:
            click.echo(f"lint:     {message}")
        if result.diff:
            click.echo(f"diff:     {result.diff}")
    sys.exit(0 if result.verdict not in ("in_scope_mismatch", "out_of_scope_not_caught") else 1)


@main.command()
@click.argument("case_file", type=click.Path(exists=True, dir_okay=False))
def oracle(case_file):
    """Print the minimal reaction set and oracle state digest."""
    bench = load_case(case_file)
    env = FreshEnvironment(dict(bench.fs_initial))
    expected = oracle_state(bench.modified, env)
    try:
        minimal = minimal_reaction_set(bench.original, bench.modified, env)
    except OracleCapExceeded as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)
    if minimal.requires_reset:
        click.echo(f"C_E: {', '.join(minimal.cells)} (requires reset)")
    else:
        click.echo(f"C_E: {', '.join(minimal.cells)}")
    click.echo(f"oracle digest: {state_digest(expected.state)}")


@main.command()
@click.argument("notebook_file", type=click.Path(exists=True, dir_okay=False))
def lint(notebook_file):
    """Lint a notebook under the static-dataflow scope."""
    nb = load_notebook(notebook_file)
    violations = lint_notebook(nb, scope="static")
    for v in violations:
        click.echo(f"{v.kind}: {v.message}")
    if not violations:
        click.echo("no violations")
    sys.exit(1 if violations else 0)


@main.command()
@click.option("--port", type=int, default=None, help="Defaults to REX_PORT or 8787.")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Start the interactive session server."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("REX_PORT", "8787"))
    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
