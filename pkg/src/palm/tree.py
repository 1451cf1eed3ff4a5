"""Prefix-sharing symbolic execution tree over enumerated path variants.

Internal nodes are shared step prefixes; condition nodes (one per branch
evaluation point) key their children by the asserted outcome; every path
ends in its own terminal leaf carrying coverage status. Loop-truncated
paths hang their gray leaf off a virtual (K+1)-th evaluation of the loop
condition, which merges with the exit path's final condition node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import Assert, SubjectProgram
from .extraction import PathVariant, Step
from .interp import ExecResult, TestCase, run_program
from .printer import render_expr, render_simple_stmt

STATUSES = ("covered", "uncovered", "infeasible", "bound-exceeded")


class DuplicatePath(Exception):
    pass


class UnknownPath(Exception):
    pass


@dataclass(eq=False)
class SymNode:
    id: int
    kind: str  # "statement" | "condition" | "terminal"
    label: str
    outcome: bool | None = None  # edge label from a condition-node parent
    status: str | None = None  # terminals only
    provenance: int | None = None
    path_id: str | None = None  # terminals only
    children: list["SymNode"] = field(default_factory=list)


@dataclass
class SymTree:
    root: SymNode
    nodes: list[SymNode]
    leaf_index: dict[str, SymNode]
    entry: str
    symbolic_functions: set[str]

    def leaf_status(self, path_id: str) -> str:
        if path_id not in self.leaf_index:
            raise UnknownPath(path_id)
        return self.leaf_index[path_id].status or "uncovered"

    def summary_covered(self, node: SymNode) -> bool:
        if node.kind == "terminal":
            return node.status == "covered"
        return any(self.summary_covered(c) for c in node.children)


def _step_label(step: Step) -> str:
    if isinstance(step.stmt, Assert):
        return render_expr(step.stmt.cond, compact=True)
    text = render_simple_stmt(step.stmt, compact=True)
    return text[:-1] if text.endswith(";") else text


def build_tree(
    paths: list[PathVariant],
    symbolic_functions: set[str] | None = None,
) -> SymTree:
    """Merge variants by longest common prefix into a symbolic tree."""
    if not paths:
        raise ValueError("cannot build a tree from zero paths")
    entry = paths[0].entry
    if symbolic_functions is None:
        symbolic_functions = {entry}
        for v in paths:
            for s in v.steps:
                symbolic_functions.update(s.chain)

    nodes: list[SymNode] = []

    def new_node(kind: str, label: str, outcome, provenance=None) -> SymNode:
        node = SymNode(id=len(nodes), kind=kind, label=label,
                       outcome=outcome, provenance=provenance)
        nodes.append(node)
        return node

    # Anchor for the merge walk; not part of the tree. Every path starts at
    # the same program point, so the anchor ends up with exactly one child,
    # which becomes the root.
    anchor = SymNode(id=-1, kind="statement", label=entry)
    leaf_index: dict[str, SymNode] = {}
    seen_signatures: set[tuple] = set()

    for v in paths:
        sig: list[tuple] = []
        cur = anchor
        pending: bool | None = None
        for step in v.steps:
            is_assert = isinstance(step.stmt, Assert)
            kind = "condition" if is_assert else "statement"
            key = (pending, kind, step.provenance)
            sig.append(key)
            child = next(
                (c for c in cur.children
                 if c.kind == kind and c.provenance == step.provenance and c.outcome == pending),
                None,
            )
            if child is None:
                child = new_node(kind, _step_label(step), pending, step.provenance)
                cur.children.append(child)
            cur = child
            pending = step.stmt.expected if is_assert else None
        if v.truncation is not None and v.truncation.kind == "loop":
            # Virtual extra evaluation of the loop condition.
            key = (pending, "condition", v.truncation.node_id)
            sig.append(key)
            child = next(
                (c for c in cur.children
                 if c.kind == "condition" and c.provenance == v.truncation.node_id
                 and c.outcome == pending),
                None,
            )
            if child is None:
                child = new_node("condition", v.truncation.label, pending,
                                 v.truncation.node_id)
                cur.children.append(child)
            cur = child
            pending = True
        signature = tuple(sig) + ((pending,),)
        if signature in seen_signatures:
            raise DuplicatePath(f"variant {v.id} duplicates an earlier step sequence")
        seen_signatures.add(signature)
        if v.pruned_infeasible:
            status = "infeasible"
        elif v.bound_exceeded:
            status = "bound-exceeded"
        else:
            status = "uncovered"
        leaf = new_node("terminal", v.id, pending)
        leaf.status = status
        leaf.path_id = v.id
        cur.children.append(leaf)
        leaf_index[v.id] = leaf

    assert len(anchor.children) == 1, "paths must share their first step"
    return SymTree(root=anchor.children[0], nodes=nodes, leaf_index=leaf_index,
                   entry=entry, symbolic_functions=symbolic_functions)


def mark_status(tree: SymTree, path_id: str, status: str) -> SymTree:
    if status not in STATUSES:
        raise ValueError(f"unknown status {status!r}")
    leaf = tree.leaf_index.get(path_id)
    if leaf is None:
        raise UnknownPath(path_id)
    leaf.status = status
    return tree


def serialize_tree(tree: SymTree) -> dict:
    nodes = []
    for n in tree.nodes:
        entry: dict = {
            "id": n.id,
            "kind": n.kind,
            "label": n.label,
            "children": [c.id for c in n.children],
        }
        if n.outcome is not None:
            entry["outcome"] = n.outcome
        if n.kind == "terminal":
            entry["status"] = n.status
        elif tree.summary_covered(n):
            entry["status"] = "covered"
        nodes.append(entry)
    return {
        "nodes": nodes,
        "rootId": tree.root.id,
        "leaves": {pid: leaf.id for pid, leaf in tree.leaf_index.items()},
    }


_DOT_COLORS = {
    "covered": "palegreen",
    "uncovered": "lightcoral",
    "infeasible": "gray80",
    "bound-exceeded": "gray80",
}


def to_dot(tree: SymTree) -> str:
    lines = ["digraph symtree {", "  node [fontname=monospace];"]
    for n in tree.nodes:
        label = n.label.replace("\\", "\\\\").replace('"', '\\"')
        if n.kind == "condition":
            shape = "diamond, style=filled, fillcolor=khaki"
        elif n.kind == "terminal":
            color = _DOT_COLORS.get(n.status or "uncovered", "white")
            shape = f"circle, style=filled, fillcolor={color}"
        else:
            shape = "box, style=filled, fillcolor=lightblue"
        lines.append(f'  n{n.id} [label="{label}", shape={shape}];')
    for n in tree.nodes:
        for c in n.children:
            attr = ""
            if c.outcome is not None:
                attr = f' [label="{"T" if c.outcome else "F"}"]'
            lines.append(f"  n{n.id} -> n{c.id}{attr};")
    lines.append("}")
    return "\n".join(lines)


# -- locating the path a test exercises ------------------------------------------


@dataclass
class LocateResult:
    path_id: str | None
    reason: str  # "located" | "bound-exceeded" | "runtime-error" | "no-match"
    outcomes: list[bool]
    exec_result: ExecResult | None = None

    @property
    def located(self) -> bool:
        return self.path_id is not None


def locate_path(
    tree: SymTree,
    program: SubjectProgram,
    test: TestCase,
    step_limit: int | None = None,
) -> LocateResult:
    """Replay a test on the original program and walk its branch outcomes
    down the tree to the unique leaf that accepts it, if any."""
    from .interp import DEFAULT_STEP_LIMIT

    if test.entry != tree.entry:
        return LocateResult(None, "no-match", [],
                            None)
    result = run_program(program, test, step_limit or DEFAULT_STEP_LIMIT,
                         symbolic_functions=tree.symbolic_functions)
    entries = result.branch_trace(symbolic_only=True)
    outcomes = [o for _, o in entries]
    if result.outcome in ("runtimeError", "stepLimitExceeded"):
        return LocateResult(None, "runtime-error", outcomes, result)

    def finalize(leaf: SymNode, consumed: int) -> LocateResult:
        if leaf.status == "bound-exceeded":
            return LocateResult(None, "bound-exceeded", outcomes, result)
        if consumed != len(entries):
            return LocateResult(None, "no-match", outcomes, result)
        return LocateResult(leaf.path_id, "located", outcomes, result)

    node = tree.root
    i = 0
    while True:
        if node.kind == "terminal":
            return finalize(node, i)
        if node.kind == "condition":
            if i >= len(entries):
                return LocateResult(None, "no-match", outcomes, result)
            nid, outcome = entries[i]
            if nid != node.provenance:
                return LocateResult(None, "no-match", outcomes, result)
            i += 1
            child = next((c for c in node.children if c.outcome == outcome), None)
            if child is None:
                return LocateResult(None, "no-match", outcomes, result)
            node = child
            continue
        real = [c for c in node.children if c.kind != "terminal"]
        terminals = [c for c in node.children if c.kind == "terminal"]
        if real:
            node = real[0]
        elif terminals:
            node = terminals[0]
        else:
            return LocateResult(None, "no-match", outcomes, result)
