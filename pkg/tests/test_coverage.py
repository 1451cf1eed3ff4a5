"""Coverage measurement: path, branch, and line ratios and attribution."""

from palm import (
    BruteForceBackend,
    Workspace,
    generate_all,
    measure,
    parse_test_literal,
)
from palm.corpus import TUTORIAL
from palm.coverage import executable_lines, feasible_leaves, in_bounds_branch_pairs


def make_suite(ws, *texts):
    return [parse_test_literal(ws.program, t) for t in texts]


class TestMeasure:
    def test_empty_suite_all_zero(self, tutorial_ws):
        report = measure(tutorial_ws.program, tutorial_ws.tree,
                         tutorial_ws.variants, [])
        assert report.path_coverage == 0.0
        assert report.branch_coverage == 0.0
        assert report.line_coverage == 0.0

    def test_full_tutorial_suite(self):
        ws = Workspace.from_source(TUTORIAL.source)
        state = generate_all(ws.program, ws.tree, ws.variants,
                             BruteForceBackend(ws.program, ws.variants_by_id), ws.cfg)
        suite = make_suite(ws, *[recs[0].test_text
                                for recs in state.trials.values()])
        report = measure(ws.program, ws.tree, ws.variants, suite)
        assert report.path_coverage == 1.0
        assert report.branch_coverage == 1.0
        assert report.line_coverage == 1.0

    def test_duplicate_tests_count_leaf_once(self, tutorial_ws):
        suite = make_suite(tutorial_ws, "tutorial(1, 6, 0)", "tutorial(2, 7, 0)")
        report = measure(tutorial_ws.program, tutorial_ws.tree,
                         tutorial_ws.variants, suite)
        assert report.path_covered == 1
        assert report.path_total == 4

    def test_monotonicity(self, tutorial_ws):
        texts = ["tutorial(1, 6, 0)", "tutorial(1, 1, 0)", "tutorial(0, 1, 0)",
                 "tutorial(0, 0, 0)"]
        prev = (0.0, 0.0, 0.0)
        for k in range(1, len(texts) + 1):
            report = measure(tutorial_ws.program, tutorial_ws.tree,
                             tutorial_ws.variants, make_suite(tutorial_ws, *texts[:k]))
            cur = (report.path_coverage, report.branch_coverage, report.line_coverage)
            assert all(c >= p for c, p in zip(cur, prev))
            prev = cur
        assert prev[0] == 1.0 and prev[1] == 1.0

    def test_attribution_maps_tests_to_leaves(self, tutorial_ws):
        suite = make_suite(tutorial_ws, "tutorial(1, 6, 0)", "tutorial(1, 1, 0)")
        report = measure(tutorial_ws.program, tutorial_ws.tree,
                         tutorial_ws.variants, suite)
        assert report.attribution["tutorial(1, 6, 0)"] == "p0"
        assert report.attribution["tutorial(1, 1, 0)"] == "p1"

    def test_runtime_error_contributes_partial_trace(self):
        ws = Workspace.from_source(
            "int f(int a, int b){ if (a > 0) { return a / b; } return 0; }")
        report = measure(ws.program, ws.tree, ws.variants,
                         make_suite(ws, "f(1, 0)"))
        assert report.path_covered == 0
        assert report.branch_covered == 1  # (a>0, True) observed before the fault
        assert report.errors
        assert report.attribution["f(1, 0)"] is None

    def test_pruned_leaf_excluded_from_denominator(self, infeasible_ws):
        report = measure(infeasible_ws.program, infeasible_ws.tree,
                         infeasible_ws.variants,
                         make_suite(infeasible_ws, "infeasible_branch(3)"))
        assert report.path_total == 1
        assert report.path_coverage == 1.0

    def test_gray_leaves_excluded(self, palindrome_ws):
        assert len(feasible_leaves(palindrome_ws.tree)) == 5
        pairs = in_bounds_branch_pairs(palindrome_ws.tree, palindrome_ws.variants)
        # loop condition and inner condition, both outcomes each
        assert len(pairs) == 4

    def test_text_table(self, tutorial_ws):
        report = measure(tutorial_ws.program, tutorial_ws.tree,
                         tutorial_ws.variants, make_suite(tutorial_ws, "tutorial(1, 6, 0)"))
        table = report.to_text()
        assert "path" in table and "branch" in table and "line" in table
        doc = report.to_json()
        assert set(doc) >= {"pathCoverage", "branchCoverage", "lineCoverage"}


class TestExecutableLines:
    def test_braces_and_blanks_excluded(self):
        src = (
            "int f(int x)\n"  # 1: header, not executable
            "{\n"             # 2: brace only
            "    if (x > 0)\n"  # 3: condition
            "    {\n"           # 4
            "        return 1;\n"  # 5
            "    }\n"              # 6
            "\n"                   # 7
            "    return 0;\n"      # 8
            "}\n"
        )
        ws = Workspace.from_source(src)
        lines = executable_lines(ws.program)
        assert lines == {3, 5, 8}

    def test_field_lines_counted(self):
        ws = Workspace.from_source("int seed = 1;\nint f(){ return seed; }")
        assert 1 in executable_lines(ws.program)
