"""CLI tests via click's in-process runner."""

import json

import pytest
from click.testing import CliRunner

from palm.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestExamplesAndExec:
    def test_examples(self, runner):
        r = runner.invoke(main, ["examples"])
        assert r.exit_code == 0
        assert "tutorial" in r.output and "palindrome" in r.output

    def test_builtins(self, runner):
        r = runner.invoke(main, ["builtins"])
        assert "String.split(String) -> String[]" in r.output

    def test_exec_returns_value(self, runner):
        r = runner.invoke(main, ["exec", "-p", "tutorial", "--run-test",
                                 "tutorial(1, 6, 0)"])
        assert r.exit_code == 0
        assert "returned 1" in r.output

    def test_exec_runtime_error_exit_code(self, runner, tmp_path):
        src = tmp_path / "div.pj"
        src.write_text("int f(int a){ return 1 / a; }")
        r = runner.invoke(main, ["exec", "-p", str(src), "--run-test", "f(0)"])
        assert r.exit_code == 1
        assert "runtimeError" in r.output

    def test_program_file_loading(self, runner, tmp_path):
        src = tmp_path / "p.pj"
        src.write_text("int g(int x){ return x; }")
        r = runner.invoke(main, ["exec", "-p", str(src), "--run-test", "g(7)"])
        assert "returned 7" in r.output

    def test_unknown_program(self, runner):
        r = runner.invoke(main, ["exec", "-p", "ghost", "--run-test", "f(1)"])
        assert r.exit_code != 0


class TestExtract:
    def test_tree_json(self, runner):
        r = runner.invoke(main, ["extract", "-p", "tutorial"])
        doc = json.loads(r.output)
        assert len(doc["leaves"]) == 4

    def test_variants_json(self, runner):
        r = runner.invoke(main, ["extract", "-p", "tutorial", "--variants"])
        docs = json.loads(r.output)
        assert [d["id"] for d in docs] == ["p0", "p1", "p2", "p3"]

    def test_dot_output(self, runner, tmp_path):
        out = tmp_path / "t.json"
        dot = tmp_path / "t.dot"
        r = runner.invoke(main, ["extract", "-p", "tutorial",
                                 "--out", str(out), "--dot", str(dot)])
        assert r.exit_code == 0
        assert "digraph" in dot.read_text()
        assert json.loads(out.read_text())["rootId"] is not None

    def test_loop_bound_option(self, runner):
        r = runner.invoke(main, ["extract", "-p", "palindrome",
                                 "--loop-bound", "1", "--variants"])
        docs = json.loads(r.output)
        assert len(docs) == 4  # exit0, first-iter return, exit1, gray


class TestVerifyLocate:
    def test_verify_covered(self, runner):
        r = runner.invoke(main, ["verify", "-p", "tutorial", "--path", "p0",
                                 "--test", "tutorial(1, 6, 0)"])
        assert r.exit_code == 0
        assert "covered" in r.output

    def test_verify_diverged(self, runner):
        r = runner.invoke(main, ["verify", "-p", "tutorial", "--path", "p0",
                                 "--test", "tutorial(1, 1, 0)"])
        assert r.exit_code == 1
        assert "diverged at assertTrue(y+z>0)" in r.output

    def test_locate(self, runner):
        r = runner.invoke(main, ["locate", "-p", "tutorial", "--test",
                                 "tutorial(1, 1, 0)"])
        assert "p1" in r.output

    def test_locate_out_of_bounds(self, runner, tmp_path):
        src = tmp_path / "loop.pj"
        src.write_text(
            "int f(int n){ int i = 0; while (i < n) { i = i + 1; } return i; }")
        r = runner.invoke(main, ["locate", "-p", str(src), "--test", "f(5)"])
        assert r.exit_code == 1
        assert "bound-exceeded" in r.output


class TestRunAndCoverage:
    def test_brute_force_run_writes_log(self, runner, tmp_path):
        log = tmp_path / "run.jsonl"
        r = runner.invoke(main, ["run", "-p", "tutorial", "--out", str(log)])
        assert r.exit_code == 0
        assert "covered 4/4 feasible paths" in r.output
        lines = [json.loads(x) for x in log.read_text().splitlines()]
        assert len(lines) == 4

    def test_scripted_run(self, runner, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps({"p0": ["tutorial(1, 6, 0)"]}))
        r = runner.invoke(main, ["run", "-p", "tutorial", "--backend", "scripted",
                                 "--script", str(script)])
        assert r.exit_code == 0
        assert "p0     covered" in r.output
        assert "covered 1/4 feasible paths" in r.output

    def test_coverage_command(self, runner, tmp_path):
        tests = tmp_path / "tests.json"
        tests.write_text(json.dumps({"tests": [
            "tutorial(1, 6, 0)", "tutorial(1, 1, 0)",
            "tutorial(0, 1, 0)", "tutorial(0, 0, 0)"]}))
        r = runner.invoke(main, ["coverage", "-p", "tutorial",
                                 "--tests", str(tests), "--json"])
        doc = json.loads(r.output)
        assert doc["pathCoverage"] == 1.0
        assert doc["branchCoverage"] == 1.0

    def test_difftest(self, runner):
        r = runner.invoke(main, ["difftest", "-p", "tutorial", "--samples", "40"])
        assert r.exit_code == 0
        assert "0 mismatches" in r.output
