"""Acceptance criteria for the workbench.

Each test implements one criterion at its stated tolerance; a summary hook
in conftest prints one pass/fail line per criterion. Everything here runs
offline with the brute-force or scripted backend.
"""

import json
import time

from click.testing import CliRunner

from palm import (
    BruteForceBackend,
    ScriptedBackend,
    Workspace,
    generate_all,
    locate_path,
    measure,
    parse_test_literal,
    run_program,
    run_variant,
    serialize_tree,
)
from palm.ast import Block, If, While
from palm.cli import main as cli_main
from palm.corpus import ALL_PROGRAMS, ARG_PARSE, INFEASIBLE_BRANCH, PALINDROME, TUTORIAL
from palm.coverage import feasible_leaves
from palm.interp import TestCase
from palm.printer import render_assert_text
from palm.tree import to_dot
from palm.workbench import differential_check

STRAIGHT = "int f(int x){ int y = x + 1; return y * 2; }"

TWO_IFS = """
int f(int a, int b) {
    int r = 0;
    if (a > 0) {
        r = r + 1;
    }
    if (b > 0) {
        r = r + 2;
    }
    return r;
}
"""

SINGLE_LOOP = """
int f(int n) {
    int i = 0;
    while (i < n) {
        i = i + 1;
    }
    return i;
}
"""


def corpus_workspace(entry) -> Workspace:
    return Workspace.from_source(entry.source, {"entry": entry.entry})


def palindrome_condition_ids(program):
    """(loop condition id, inner condition id) of the palindrome source."""
    fn = program.function("is_palindrome")
    loop = next(s for s in fn.body.stmts if isinstance(s, While))
    body = loop.body if isinstance(loop.body, Block) else Block(stmts=[loop.body])
    inner = next(s for s in body.stmts if isinstance(s, If))
    return loop.cond.nid, inner.cond.nid


def test_enumeration_goldens():
    """Straight-line, two ifs, and a K=2 loop enumerate exactly as specified."""
    start = time.monotonic()

    ws = Workspace.from_source(STRAIGHT)
    assert len(ws.variants) == 1
    assert ws.variants[0].assert_steps() == []

    ws = Workspace.from_source(TWO_IFS)
    assert [tuple(v.outcomes()) for v in ws.variants] == [
        (True, True), (True, False), (False, True), (False, False)]

    ws = Workspace.from_source(SINGLE_LOOP, {"loop_bound": 2})
    exits = [v for v in ws.variants if not v.bound_exceeded]
    grays = [v for v in ws.variants if v.bound_exceeded]
    assert len(exits) == 3 and len(grays) == 1
    assert [tuple(v.outcomes()) for v in exits] == [
        (False,), (True, False), (True, True, False)]
    assert tuple(grays[0].outcomes()) == (True, True)

    assert time.monotonic() - start < 1.0


def test_palindrome_fidelity():
    """The K=2 variant set reproduces both published palindrome paths, and
    validation diverges/passes on the published inputs."""
    ws = corpus_workspace(PALINDROME)
    loop_id, inner_id = palindrome_condition_ids(ws.program)

    # a path whose asserts begin with the folded loop entry, then inner-true
    path_c = None
    for v in ws.variants:
        steps = v.assert_steps()
        if len(steps) >= 2:
            first = render_assert_text(steps[0].stmt.cond, steps[0].stmt.expected)
            if (first == "assertTrue(0<len)"
                    and steps[1].provenance == inner_id and steps[1].stmt.expected):
                path_c = v
                break
    assert path_c is not None
    assert tuple(path_c.outcomes()) == (True, True)

    # the 4-assertion path: loop-true, inner-false, loop-true, inner-true
    path_d = None
    for v in ws.variants:
        steps = v.assert_steps()
        if [(s.provenance, s.stmt.expected) for s in steps] == [
            (loop_id, True), (inner_id, False), (loop_id, True), (inner_id, True),
        ]:
            path_d = v
            break
    assert path_d is not None

    bad = run_variant(path_d, ws.program, TestCase("is_palindrome", ["ab"]))
    assert bad.outcome == "assertionViolated"
    violated = path_d.steps[bad.assert_step]
    assert violated.provenance == inner_id

    good = run_variant(path_d, ws.program, TestCase("is_palindrome", ["abca"]))
    assert good.outcome == "returned"


def test_tutorial_fidelity():
    """The reconstructed two-branch program behaves exactly as published."""
    ws = corpus_workspace(TUTORIAL)
    feasible = [v for v in ws.variants if not v.pruned_infeasible and not v.bound_exceeded]
    assert len(feasible) == 4

    tt = next(v for v in ws.variants if tuple(v.outcomes()) == (True, True))

    res = run_variant(tt, ws.program, parse_test_literal(ws.program, "tutorial(1, 6, 0)"))
    assert res.outcome == "returned"

    res = run_variant(tt, ws.program, parse_test_literal(ws.program, "tutorial(1, 1, 0)"))
    assert res.outcome == "assertionViolated"
    assert res.assert_text == "assertTrue(y+z>0)"

    located = locate_path(ws.tree, ws.program,
                          parse_test_literal(ws.program, "tutorial(1, 6, 0)"))
    assert located.path_id == tt.id


def test_tutorial_four_paths_against_exhaustive_oracle():
    """Independent oracle: exhaustive interpretation over x,y,z in [-8,8]
    observes exactly the four outcome sequences the enumeration claims."""
    ws = corpus_workspace(TUTORIAL)
    observed = set()
    for x in range(-8, 9):
        for y in range(-8, 9):
            for z in range(-8, 9):
                r = run_program(ws.program, TestCase("tutorial", [x, y, z]))
                observed.add(tuple(o for _, o in r.branch_trace()))
    assert observed == {(True, True), (True, False), (False, True), (False, False)}
    assert {tuple(v.outcomes()) for v in ws.variants} == observed


def test_differential_semantics():
    """500 random in-bounds inputs per corpus program: exactly one accepting
    non-truncated variant, matching return value, agreeing locate."""
    start = time.monotonic()
    for entry in ALL_PROGRAMS:
        ws = corpus_workspace(entry)
        checked, mismatches = differential_check(ws, 500, seed=7, domains=entry.domains)
        assert not mismatches, f"{entry.name}: {mismatches[:3]}"
        assert checked == 500, f"{entry.name}: only {checked} in-bounds samples found"
    assert time.monotonic() - start < 30.0


def test_driver_contract():
    """A scripted backend returning five wrong tests consumes exactly five
    trials, leaves the leaf uncovered, and feeds back each divergence."""
    ws = corpus_workspace(TUTORIAL)
    seen = []

    class Spy(ScriptedBackend):
        def generate(self, request):
            seen.append(request)
            return super().generate(request)

    backend = Spy({"p0": ["tutorial(1, 1, 0)"] * 5})
    state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
    records = state.trials["p0"]
    assert len(records) == 5
    assert ws.tree.leaf_status("p0") == "uncovered"
    requests = [r for r in seen if r.variant["id"] == "p0"]
    for k in range(1, 5):
        feedback = requests[k].previous_trials[-1][1]
        assert feedback == records[k - 1].assert_text == "assertTrue(y+z>0)"


def test_oracle_completeness():
    """The brute-force backend covers every feasible leaf of every corpus
    program, and the resulting suite measures 1.0 path and branch coverage."""
    start = time.monotonic()
    for entry in ALL_PROGRAMS:
        ws = corpus_workspace(entry)
        backend = BruteForceBackend(ws.program, ws.variants_by_id, entry.domains)
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        remaining = feasible_leaves(ws.tree)
        uncovered = [pid for pid in remaining if ws.tree.leaf_status(pid) != "covered"]
        assert not uncovered, f"{entry.name}: uncovered {uncovered}"
        suite = [
            parse_test_literal(ws.program, recs[-1].test_text)
            for recs in state.trials.values()
            if recs[-1].verdict == "covered"
        ]
        report = measure(ws.program, ws.tree, ws.variants, suite)
        assert report.path_coverage == 1.0, f"{entry.name}: {report.to_text()}"
        assert report.branch_coverage == 1.0, f"{entry.name}: {report.to_text()}"
    assert time.monotonic() - start < 300.0


def test_pruning():
    """A branch on constants yields a pruned leaf, shown gray and excluded
    from feasible-path denominators."""
    ws = corpus_workspace(INFEASIBLE_BRANCH)
    pruned = [v for v in ws.variants if v.pruned_infeasible]
    assert len(pruned) == 1
    leaf_status = ws.tree.leaf_status(pruned[0].id)
    assert leaf_status == "infeasible"
    doc = serialize_tree(ws.tree)
    leaf = next(n for n in doc["nodes"] if n["id"] == doc["leaves"][pruned[0].id])
    assert leaf["status"] == "infeasible"
    assert "gray80" in to_dot(ws.tree)
    assert pruned[0].id not in feasible_leaves(ws.tree)
    report = measure(ws.program, ws.tree, ws.variants,
                     [parse_test_literal(ws.program, "infeasible_branch(1)")])
    assert report.path_total == 1 and report.path_coverage == 1.0


def test_argparse_bug_surfacing():
    """The flag-following-argument path exists, the oracle covers it, and a
    flag-like follower exercises exactly that leaf."""
    ws = corpus_workspace(ARG_PARSE)
    # the leaf that finds "-f" at the first element and takes a follower
    target = next(v for v in ws.variants
                  if tuple(v.outcomes()) == (True, True, True))
    backend = BruteForceBackend(ws.program, ws.variants_by_id, ARG_PARSE.domains)
    state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
    produced = state.trials[target.id][-1]
    assert produced.verdict == "covered"
    produced_test = parse_test_literal(ws.program, produced.test_text)
    assert locate_path(ws.tree, ws.program, produced_test).path_id == target.id

    # the published style of edge case: the follower is itself a flag
    edge = parse_test_literal(ws.program, 'parse_file_path({"-f", "-v"})')
    assert locate_path(ws.tree, ws.program, edge).path_id == target.id
    result = run_program(ws.program, edge)
    assert result.value == "-v"  # the flag is erroneously taken as the path


def test_headless_parity(tmp_path):
    """Every criterion above is drivable through the CLI alone: extraction
    goldens, fidelity checks, differential runs, the driver contract, oracle
    completeness with coverage, pruning, and the arg-parse edge case."""
    runner = CliRunner()

    def ok(args):
        r = runner.invoke(cli_main, args)
        assert r.exit_code == 0, f"palm {' '.join(args)}\n{r.output}"
        return r.output

    # enumeration goldens
    straight = tmp_path / "straight.pj"
    straight.write_text(STRAIGHT)
    docs = json.loads(ok(["extract", "-p", str(straight), "--variants"]))
    assert len(docs) == 1

    two_ifs = tmp_path / "two_ifs.pj"
    two_ifs.write_text(TWO_IFS)
    docs = json.loads(ok(["extract", "-p", str(two_ifs), "--variants"]))
    seqs = [[s["assertExpected"] for s in d["steps"] if s["kind"] == "assert"]
            for d in docs]
    assert seqs == [[True, True], [True, False], [False, True], [False, False]]

    loop = tmp_path / "loop.pj"
    loop.write_text(SINGLE_LOOP)
    docs = json.loads(ok(["extract", "-p", str(loop), "--variants"]))
    assert sum(1 for d in docs if d["boundExceeded"]) == 1
    assert sum(1 for d in docs if not d["boundExceeded"]) == 3

    # palindrome fidelity
    out = ok(["extract", "-p", "palindrome", "--variants"])
    docs = json.loads(out)
    d_id = next(
        d["id"] for d in docs
        if [s.get("assertExpected") for s in d["steps"] if s["kind"] == "assert"]
        == [True, False, True, True])
    r = runner.invoke(cli_main, ["verify", "-p", "palindrome", "--path", d_id,
                                 "--test", 'is_palindrome("ab")'])
    assert r.exit_code == 1 and "diverged at" in r.output and "charAt" in r.output
    ok(["verify", "-p", "palindrome", "--path", d_id,
        "--test", 'is_palindrome("abca")'])

    # tutorial fidelity
    ok(["verify", "-p", "tutorial", "--path", "p0", "--test", "tutorial(1, 6, 0)"])
    r = runner.invoke(cli_main, ["verify", "-p", "tutorial", "--path", "p0",
                                 "--test", "tutorial(1, 1, 0)"])
    assert r.exit_code == 1 and "assertTrue(y+z>0)" in r.output
    assert "p0" in ok(["locate", "-p", "tutorial", "--test", "tutorial(1, 6, 0)"])

    # differential semantics (reduced sample size; the full 500 runs above)
    for entry in ALL_PROGRAMS:
        assert "0 mismatches" in ok(["difftest", "-p", entry.name, "--samples", "60"])

    # driver contract via the scripted backend
    script = tmp_path / "script.json"
    script.write_text(json.dumps({"p0": ["tutorial(1, 1, 0)"] * 5}))
    log = tmp_path / "run.jsonl"
    out = ok(["run", "-p", "tutorial", "--backend", "scripted",
              "--script", str(script), "--out", str(log)])
    assert "p0     uncovered       trials=5" in out
    records = [json.loads(x) for x in log.read_text().splitlines()]
    assert len([r for r in records if r["path_id"] == "p0"]) == 5

    # oracle completeness plus coverage for one loop-bearing program
    log2 = tmp_path / "palin.jsonl"
    out = ok(["run", "-p", "palindrome", "--out", str(log2)])
    assert "covered 5/5 feasible paths" in out
    covered_tests = [json.loads(x)["test_text"]
                     for x in log2.read_text().splitlines()
                     if json.loads(x)["verdict"] == "covered"]
    tests_file = tmp_path / "tests.json"
    tests_file.write_text(json.dumps(covered_tests))
    doc = json.loads(ok(["coverage", "-p", "palindrome",
                         "--tests", str(tests_file), "--json"]))
    assert doc["pathCoverage"] == 1.0 and doc["branchCoverage"] == 1.0

    # pruning
    docs = json.loads(ok(["extract", "-p", "infeasible-branch", "--variants"]))
    assert sum(1 for d in docs if d["prunedInfeasible"]) == 1
    out = ok(["run", "-p", "infeasible-branch"])
    assert "covered 1/1 feasible paths" in out

    # arg-parse edge case
    out = ok(["locate", "-p", "arg-parse", "--test", 'parse_file_path({"-f", "-v"})'])
    located = out.split()[0]
    out = ok(["extract", "-p", "arg-parse", "--variants"])
    target = next(
        d["id"] for d in json.loads(out)
        if [s.get("assertExpected") for s in d["steps"] if s["kind"] == "assert"]
        == [True, True, True])
    assert located == target
