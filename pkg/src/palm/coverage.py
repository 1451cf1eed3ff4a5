"""Path, branch, and line coverage of a test suite against a program.

Path coverage counts feasible tree leaves (infeasible and bound-exceeded
leaves are excluded from the denominator). Branch coverage counts
(condition, outcome) pairs reachable within the enumeration bounds, i.e.
pairs occurring on feasible leaves' walks. Line coverage counts source
lines holding at least one statement or condition; brace-only and blank
lines are not executable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (
    Assert,
    Assign,
    Block,
    Decl,
    DoWhile,
    ExprStmt,
    For,
    If,
    Return,
    Stmt,
    SubjectProgram,
    While,
)
from .extraction import PathVariant
from .interp import TestCase, run_program
from .tree import SymTree, locate_path


def executable_lines(program: SubjectProgram) -> set[int]:
    lines: set[int] = set()
    for fd in program.fields:
        if fd.line:
            lines.add(fd.line)

    def visit(st: Stmt) -> None:
        if isinstance(st, Block):
            for s in st.stmts:
                visit(s)
            return
        if st.line:
            lines.add(st.line)
        if isinstance(st, If):
            if st.cond.line:
                lines.add(st.cond.line)
            visit(st.then)
            if st.els is not None:
                visit(st.els)
        elif isinstance(st, While):
            if st.cond.line:
                lines.add(st.cond.line)
            visit(st.body)
        elif isinstance(st, DoWhile):
            visit(st.body)
            if st.cond.line:
                lines.add(st.cond.line)
        elif isinstance(st, For):
            for part in (st.init, st.update):
                if part is not None:
                    visit(part)
            if st.cond is not None and st.cond.line:
                lines.add(st.cond.line)
            visit(st.body)

    for fn in program.functions:
        visit(fn.body)
    return lines


def feasible_leaves(tree: SymTree) -> list[str]:
    return [
        pid
        for pid, leaf in tree.leaf_index.items()
        if leaf.status not in ("infeasible", "bound-exceeded")
    ]


def in_bounds_branch_pairs(tree: SymTree, variants: list[PathVariant]) -> set[tuple[int, bool]]:
    """(condition id, outcome) pairs on feasible leaves' walks."""
    feasible = set(feasible_leaves(tree))
    pairs: set[tuple[int, bool]] = set()
    for v in variants:
        if v.id not in feasible:
            continue
        for step in v.steps:
            if isinstance(step.stmt, Assert):
                pairs.add((step.provenance, step.stmt.expected))
    return pairs


@dataclass
class CoverageReport:
    path_covered: int
    path_total: int
    branch_covered: int
    branch_total: int
    line_covered: int
    line_total: int
    attribution: dict[str, str | None] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def path_coverage(self) -> float:
        return self.path_covered / self.path_total if self.path_total else 0.0

    @property
    def branch_coverage(self) -> float:
        return self.branch_covered / self.branch_total if self.branch_total else 0.0

    @property
    def line_coverage(self) -> float:
        return self.line_covered / self.line_total if self.line_total else 0.0

    def to_json(self) -> dict:
        return {
            "pathCoverage": self.path_coverage,
            "branchCoverage": self.branch_coverage,
            "lineCoverage": self.line_coverage,
            "pathCovered": self.path_covered,
            "pathTotal": self.path_total,
            "branchCovered": self.branch_covered,
            "branchTotal": self.branch_total,
            "lineCovered": self.line_covered,
            "lineTotal": self.line_total,
            "attribution": self.attribution,
            "errors": self.errors,
        }

    def to_text(self) -> str:
        rows = [
            ("path", self.path_covered, self.path_total, self.path_coverage),
            ("branch", self.branch_covered, self.branch_total, self.branch_coverage),
            ("line", self.line_covered, self.line_total, self.line_coverage),
        ]
        lines = [f"{'metric':<8} {'covered':>8} {'total':>8} {'ratio':>8}"]
        for name, covered, total, ratio in rows:
            lines.append(f"{name:<8} {covered:>8} {total:>8} {ratio:>8.1%}")
        return "\n".join(lines)


def measure(
    program: SubjectProgram,
    tree: SymTree,
    variants: list[PathVariant],
    tests: list[TestCase],
    step_limit: int | None = None,
) -> CoverageReport:
    """Run each test on the original program and aggregate coverage."""
    from .interp import DEFAULT_STEP_LIMIT

    limit = step_limit or DEFAULT_STEP_LIMIT
    exe_lines = executable_lines(program)
    branch_denominator = in_bounds_branch_pairs(tree, variants)
    feasible = set(feasible_leaves(tree))

    covered_leaves: set[str] = set()
    covered_pairs: set[tuple[int, bool]] = set()
    covered_lines: set[int] = set()
    attribution: dict[str, str | None] = {}
    errors: dict[str, str] = {}

    for test in tests:
        text = test.render()
        result = run_program(program, test, limit,
                             symbolic_functions=tree.symbolic_functions)
        covered_lines.update(result.lines_executed & exe_lines)
        for nid, outcome in result.branch_trace(symbolic_only=False):
            if (nid, outcome) in branch_denominator:
                covered_pairs.add((nid, outcome))
        if result.outcome in ("runtimeError", "stepLimitExceeded"):
            errors[text] = result.error_message or result.outcome
            attribution[text] = None
            continue
        located = locate_path(tree, program, test, limit)
        attribution[text] = located.path_id
        if located.path_id is not None and located.path_id in feasible:
            covered_leaves.add(located.path_id)

    return CoverageReport(
        path_covered=len(covered_leaves),
        path_total=len(feasible),
        branch_covered=len(covered_pairs),
        branch_total=len(branch_denominator),
        line_covered=len(covered_lines),
        line_total=len(exe_lines),
        attribution=attribution,
        errors=errors,
    )
