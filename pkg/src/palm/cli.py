"""Command-line interface.

`--program` accepts either a built-in example name (see `palm examples`) or
a path to a PALM-J source file. Every operation of the workbench is
reachable headlessly: extraction, single-test execution, verification,
location, generation runs, coverage, differential checking, and the HTTP
service.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import corpus
from .builtins import list_builtins
from .coverage import measure
from .driver import (
    DomainConfig,
    EndpointConfig,
    write_run_log,
)
from .extraction import serialize_variant
from .interp import parse_test_literal, render_value, run_program
from .ops import VOID_VALUE
from .parser import SourceError, parse
from .tree import locate_path, serialize_tree, to_dot
from .workbench import Workspace, differential_check, make_backend, make_config


def _load_program(spec: str) -> tuple[str, str | None, DomainConfig]:
    """Returns (source, default entry, default domains) for a name or path."""
    try:
        entry = corpus.get(spec)
        return entry.source, entry.entry, entry.domains
    except KeyError:
        pass
    path = Path(spec)
    if not path.is_file():
        raise click.ClickException(
            f"'{spec}' is neither a built-in example nor a readable file")
    return path.read_text(), None, DomainConfig()


def _cfg_options(fn):
    fn = click.option("--entry", default=None, help="Entry function (defaults per program).")(fn)
    fn = click.option("--loop-bound", default=2, show_default=True, type=int)(fn)
    fn = click.option("--recursion-bound", default=2, show_default=True, type=int)(fn)
    fn = click.option("--max-paths", default=50, show_default=True, type=int)(fn)
    fn = click.option("--symbolic", multiple=True,
                      help="Additional symbolic function (repeatable).")(fn)
    return fn


def _domain_options(fn):
    fn = click.option("--int-bound", default=None, type=int)(fn)
    fn = click.option("--string-max-len", default=None, type=int)(fn)
    fn = click.option("--array-max-len", default=None, type=int)(fn)
    fn = click.option("--budget", default=None, type=int)(fn)
    return fn


def _build_workspace(program_spec, entry, loop_bound, recursion_bound,
                     max_paths, symbolic) -> tuple[Workspace, DomainConfig]:
    source, default_entry, domains = _load_program(program_spec)
    try:
        program = parse(source)
        cfg = make_config(
            program,
            entry=entry or default_entry,
            loop_bound=loop_bound,
            recursion_bound=recursion_bound,
            max_paths=max_paths,
            symbolic=tuple(symbolic),
        )
        return Workspace.create(program, cfg), domains
    except SourceError as e:
        raise click.ClickException(str(e))


def _apply_domains(domains: DomainConfig, int_bound, string_max_len,
                   array_max_len, budget) -> DomainConfig:
    kwargs = {}
    if int_bound is not None:
        kwargs["int_bound"] = int_bound
    if string_max_len is not None:
        kwargs["string_max_len"] = string_max_len
    if array_max_len is not None:
        kwargs["array_max_len"] = array_max_len
    if budget is not None:
        kwargs["budget"] = budget
    return replace(domains, **kwargs) if kwargs else domains


@click.group()
def main():
    """Path-aware test generation workbench for PALM-J programs."""


@main.command()
@click.option("--json", "as_json", is_flag=True)
def examples(as_json):
    """List the built-in example programs."""
    if as_json:
        click.echo(json.dumps([
            {"name": p.name, "description": p.description, "entry": p.entry}
            for p in corpus.ALL_PROGRAMS
        ], indent=2))
        return
    for p in corpus.ALL_PROGRAMS:
        click.echo(f"{p.name:<20} {p.description}")


@main.command()
def builtins():
    """List builtin function signatures available to subject programs."""
    for sig in list_builtins():
        click.echo(sig)


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@_cfg_options
@click.option("--out", default="-", help="Tree JSON output path ('-' for stdout).")
@click.option("--dot", default=None, help="Also write a DOT rendering here.")
@click.option("--variants", "show_variants", is_flag=True,
              help="Print each variant's serialized form instead of the tree.")
def extract(program_spec, entry, loop_bound, recursion_bound, max_paths,
            symbolic, out, dot, show_variants):
    """Enumerate paths and print the symbolic tree (or the variants)."""
    ws, _ = _build_workspace(program_spec, entry, loop_bound,
                             recursion_bound, max_paths, symbolic)
    if show_variants:
        payload = json.dumps([serialize_variant(v) for v in ws.variants], indent=2)
    else:
        payload = json.dumps(serialize_tree(ws.tree), indent=2)
    if out == "-":
        click.echo(payload)
    else:
        Path(out).write_text(payload + "\n")
        click.echo(f"wrote {out}")
    if dot:
        Path(dot).write_text(to_dot(ws.tree) + "\n")
        click.echo(f"wrote {dot}")


@main.command("exec")
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--run-test", "test_text", required=True,
              help='Test call literal, e.g. \'tutorial(1, 6, 0)\'.')
@click.option("--step-limit", default=100_000, show_default=True, type=int)
def exec_cmd(program_spec, test_text, step_limit):
    """Run one test on the original program and report the outcome."""
    source, _, _ = _load_program(program_spec)
    try:
        program = parse(source)
        test = parse_test_literal(program, test_text)
    except SourceError as e:
        raise click.ClickException(str(e))
    result = run_program(program, test, step_limit)
    if result.returned:
        if result.value is VOID_VALUE:
            click.echo("returned")
        else:
            click.echo(f"returned {render_value(result.value)}")
    else:
        click.echo(f"{result.outcome}: {result.error_message or ''}".strip())
        sys.exit(1)


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--path", "path_id", required=True, help="Path id, e.g. p2.")
@click.option("--test", "test_text", required=True)
@_cfg_options
def verify(program_spec, path_id, test_text, entry, loop_bound,
           recursion_bound, max_paths, symbolic):
    """Check whether a test exercises the given path."""
    ws, _ = _build_workspace(program_spec, entry, loop_bound,
                             recursion_bound, max_paths, symbolic)
    from .driver import verify_test

    if path_id not in ws.variants_by_id:
        raise click.ClickException(f"unknown path {path_id}")
    verdict = verify_test(ws.program, ws.tree, ws.variants_by_id, path_id, test_text)
    if verdict.kind == "diverged":
        click.echo(f"diverged at {verdict.assert_text}")
    elif verdict.kind == "covered":
        click.echo("covered")
    else:
        click.echo(f"{verdict.kind}: {verdict.message or ''}".strip())
    sys.exit(0 if verdict.covered else 1)


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--test", "test_text", required=True)
@_cfg_options
def locate(program_spec, test_text, entry, loop_bound, recursion_bound,
           max_paths, symbolic):
    """Find which enumerated path a test exercises."""
    ws, _ = _build_workspace(program_spec, entry, loop_bound,
                             recursion_bound, max_paths, symbolic)
    try:
        test = parse_test_literal(ws.program, test_text)
    except SourceError as e:
        raise click.ClickException(str(e))
    result = locate_path(ws.tree, ws.program, test)
    outcome_text = "".join("T" if o else "F" for o in result.outcomes)
    if result.located:
        click.echo(f"{result.path_id} (outcomes {outcome_text})")
    else:
        click.echo(f"none ({result.reason}; outcomes {outcome_text})")
        sys.exit(1)


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--backend", type=click.Choice(["brute-force", "scripted", "llm-http"]),
              default="brute-force", show_default=True)
@click.option("--script", "script_file", default=None,
              help="JSON replies for the scripted backend (list or {pathId: [..]}).")
@click.option("--endpoint", default=None, help="Chat-completions base URL.")
@click.option("--model", default=None, help="Model id for llm-http.")
@click.option("--trial-limit", default=5, show_default=True, type=int)
@click.option("--out", default=None, help="Write a JSON-lines trial log here.")
@_cfg_options
@_domain_options
def run(program_spec, backend, script_file, endpoint, model, trial_limit, out,
        entry, loop_bound, recursion_bound, max_paths, symbolic,
        int_bound, string_max_len, array_max_len, budget):
    """Generate tests for every feasible path and print the result per path."""
    ws, domains = _build_workspace(program_spec, entry, loop_bound,
                                   recursion_bound, max_paths, symbolic)
    domains = _apply_domains(domains, int_bound, string_max_len, array_max_len, budget)
    script = None
    if script_file:
        script = json.loads(Path(script_file).read_text())
    ep = None
    if backend == "llm-http":
        if not endpoint or not model:
            raise click.ClickException("llm-http needs --endpoint and --model")
        ep = EndpointConfig(base_url=endpoint, model=model)
    from .driver import generate_all

    be = make_backend(backend, ws, domains=domains, script=script, endpoint=ep)
    state = generate_all(ws.program, ws.tree, ws.variants, be, ws.cfg,
                         trial_limit=trial_limit)
    if out:
        write_run_log(state, out)
    covered = set(state.covered)
    feasible_after = 0
    for v in ws.variants:
        status = ws.tree.leaf_status(v.id)
        if status not in ("infeasible", "bound-exceeded"):
            feasible_after += 1
        trials = len(state.trials.get(v.id, []))
        click.echo(f"{v.id:<6} {status:<15} trials={trials}")
    click.echo(f"covered {len(covered)}/{feasible_after} feasible paths")
    if state.error:
        click.echo(f"backend error: {state.error}", err=True)
        sys.exit(2)


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--tests", "tests_file", required=True,
              help="JSON file: a list of test literals, or {\"tests\": [...]}.")
@click.option("--json", "as_json", is_flag=True)
@_cfg_options
def coverage(program_spec, tests_file, as_json, entry, loop_bound,
             recursion_bound, max_paths, symbolic):
    """Measure path, branch, and line coverage of a test suite."""
    ws, _ = _build_workspace(program_spec, entry, loop_bound,
                             recursion_bound, max_paths, symbolic)
    data = json.loads(Path(tests_file).read_text())
    texts = data["tests"] if isinstance(data, dict) else data
    try:
        tests = [parse_test_literal(ws.program, t) for t in texts]
    except SourceError as e:
        raise click.ClickException(str(e))
    report = measure(ws.program, ws.tree, ws.variants, tests)
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        click.echo(report.to_text())


@main.command()
@click.option("--program", "-p", "program_spec", required=True)
@click.option("--samples", default=500, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@_cfg_options
@_domain_options
def difftest(program_spec, samples, seed, entry, loop_bound, recursion_bound,
             max_paths, symbolic, int_bound, string_max_len, array_max_len, budget):
    """Differential check: each in-bounds input is accepted by exactly one
    variant, whose return value matches the original program's."""
    ws, domains = _build_workspace(program_spec, entry, loop_bound,
                                   recursion_bound, max_paths, symbolic)
    domains = _apply_domains(domains, int_bound, string_max_len, array_max_len, budget)
    checked, mismatches = differential_check(ws, samples, seed, domains)
    for m in mismatches:
        click.echo(f"MISMATCH {m.test}: {m.issue}")
    click.echo(f"checked {checked} inputs, {len(mismatches)} mismatches")
    if mismatches:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--ui-dir", default=None,
              help="Static UI directory (defaults to ./frontend/dist if present).")
def serve(host, port, ui_dir):
    """Start the HTTP service (and the web UI when built)."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        candidate = Path("frontend/dist")
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
