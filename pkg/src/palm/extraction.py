"""Path enumeration and variant construction.

Execution paths of the entry function are enumerated by recursive AST
traversal: an ``if`` splits into both branches, each prefixed by an
assertTrue/assertFalse over the branch condition; a ``while`` unrolls into
exit-after-j-iterations paths for j in [0, K] plus one truncated
bound-exceeded path; ``for`` and ``do-while`` desugar to the ``while`` form;
blocks compose the cross product of sub-paths; ``return`` ends a path.
Enumeration is depth-first, true branch first, loop-exit count ascending,
and halts once ``max_paths`` paths have been produced.

Calls to symbolic functions are then inlined (fanning a path out into one
variant per callee path, bounded by the recursion bound), duplicated locals
are renamed with numeric suffixes, and int/boolean/char constants are
propagated and folded, pruning trivially infeasible paths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from itertools import islice
from typing import Iterator, NamedTuple

from .ast import (
    ArrayLen,
    Assert,
    Assign,
    Binary,
    Block,
    BoolLit,
    BOOL,
    Call,
    CharLit,
    CHAR,
    Decl,
    DoWhile,
    Expr,
    ExprStmt,
    For,
    FunctionDecl,
    If,
    Index,
    INT,
    IntLit,
    MethodCall,
    NewArray,
    Param,
    Return,
    Stmt,
    SubjectProgram,
    SubjectType,
    Unary,
    VarRef,
    VOID,
    While,
    walk_exprs,
    stmt_exprs,
)
from .builtins import FREE_FUNCTION_NAMES
from .ops import EvalFault, apply_binary, apply_unary, Char
from .printer import render_expr, render_simple_stmt


class CalleeNotFound(Exception):
    def __init__(self, name: str):
        super().__init__(f"symbolic function '{name}' has no declaration")
        self.name = name


@dataclass(frozen=True)
class ExtractionConfig:
    loop_bound: int = 2
    recursion_bound: int = 2
    max_paths: int = 50
    entry_function: str = ""
    symbolic_functions: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.max_paths < 1:
            raise ValueError("max_paths must be >= 1")
        if self.loop_bound < 0 or self.recursion_bound < 0:
            raise ValueError("bounds must be non-negative")

    def symbolic_set(self) -> frozenset[str]:
        return self.symbolic_functions | {self.entry_function}


@dataclass(frozen=True)
class Truncation:
    kind: str  # "loop" | "recursion"
    node_id: int  # loop condition id, or call-site id
    label: str = ""  # display text of the condition or call


@dataclass(frozen=True)
class Step:
    stmt: Stmt
    provenance: int  # originating node id in the source program
    chain: tuple[str, ...] = ()  # inline ancestry, for the recursion bound
    satisfied: bool = False  # assert statically satisfied; hidden from display

    @property
    def kind(self) -> str:
        if isinstance(self.stmt, Assert):
            return "assert"
        if isinstance(self.stmt, Decl):
            return "decl"
        if isinstance(self.stmt, Assign):
            return "assign"
        if isinstance(self.stmt, Return):
            return "return"
        return "expr"


@dataclass
class PathVariant:
    """One linearized execution path with embedded branch assertions."""

    id: str
    entry: str
    params: list[Param]
    return_type: SubjectType
    steps: tuple[Step, ...]
    bound_exceeded: bool = False
    pruned_infeasible: bool = False
    truncation: Truncation | None = None
    # original name -> per-instance renamed forms, in declaration order
    rename_map: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def assert_steps(self) -> list[Step]:
        return [s for s in self.steps if isinstance(s.stmt, Assert)]

    def outcomes(self) -> list[bool]:
        return [s.stmt.expected for s in self.assert_steps()]

    def visible_steps(self) -> list[Step]:
        return [s for s in self.steps if not s.satisfied]


class Seg(NamedTuple):
    steps: tuple[Step, ...]
    term: str  # "flow" | "return" | "truncated"
    trunc: Truncation | None


FLOW, RETURN, TRUNCATED = "flow", "return", "truncated"


def _assert_step(cond: Expr, expected: bool) -> Step:
    st = Assert(cond=cond, expected=expected, line=cond.line, col=cond.col)
    return Step(st, provenance=cond.nid)


def _stmt_segs(st: Stmt, cfg: ExtractionConfig) -> Iterator[Seg]:
    if isinstance(st, (Decl, Assign, ExprStmt)):
        yield Seg((Step(st, st.nid),), FLOW, None)
    elif isinstance(st, Return):
        yield Seg((Step(st, st.nid),), RETURN, None)
    elif isinstance(st, Block):
        yield from _seq_segs(st.stmts, 0, cfg)
    elif isinstance(st, If):
        t = _assert_step(st.cond, True)
        for seg in _stmt_segs(st.then, cfg):
            yield Seg((t,) + seg.steps, seg.term, seg.trunc)
        f = _assert_step(st.cond, False)
        if st.els is None:
            yield Seg((f,), FLOW, None)
        else:
            for seg in _stmt_segs(st.els, cfg):
                yield Seg((f,) + seg.steps, seg.term, seg.trunc)
    elif isinstance(st, While):
        body = _capped_segs(st.body, cfg)
        yield from _while_segs(st.cond, body, cfg)
    elif isinstance(st, DoWhile):
        body = _capped_segs(st.body, cfg)
        for first in body:
            if first.term != FLOW:
                yield first
            else:
                for rest in _while_segs(st.cond, body, cfg):
                    yield Seg(first.steps + rest.steps, rest.term, rest.trunc)
    elif isinstance(st, For):
        yield from _for_segs(st, cfg)
    else:  # pragma: no cover - Assert never occurs in source programs
        raise TypeError(f"cannot enumerate {type(st).__name__}")


def _seq_segs(stmts: list[Stmt], idx: int, cfg: ExtractionConfig) -> Iterator[Seg]:
    if idx == len(stmts):
        yield Seg((), FLOW, None)
        return
    for head in _stmt_segs(stmts[idx], cfg):
        if head.term != FLOW:
            yield head
        else:
            for rest in _seq_segs(stmts, idx + 1, cfg):
                yield Seg(head.steps + rest.steps, rest.term, rest.trunc)


def _capped_segs(body: Stmt, cfg: ExtractionConfig) -> list[Seg]:
    # A loop reuses its body's paths once per unrolled iteration. Capping the
    # materialized list at max_paths + 1 is sound: a body with more paths
    # already exceeds the overall budget during the first iteration.
    return list(islice(_stmt_segs(body, cfg), cfg.max_paths + 1))


def _while_segs(cond: Expr, body: list[Seg], cfg: ExtractionConfig) -> Iterator[Seg]:
    t = _assert_step(cond, True)
    f = _assert_step(cond, False)
    yield Seg((f,), FLOW, None)  # exit after 0 iterations
    flows: list[tuple[Step, ...]] = [()]
    for _ in range(cfg.loop_bound):
        new_flows: list[tuple[Step, ...]] = []
        for pre in flows:
            for seg in body:
                steps = pre + (t,) + seg.steps
                if seg.term == FLOW:
                    new_flows.append(steps)
                else:
                    yield Seg(steps, seg.term, seg.trunc)
        flows = new_flows
        for pre in flows:
            yield Seg(pre + (f,), FLOW, None)
    # Truncated continuations carry the K true-asserts and no exit assertion;
    # the tree hangs them off a virtual (K+1)-th condition evaluation.
    trunc = Truncation("loop", cond.nid, render_expr(cond, compact=True))
    for pre in flows:
        yield Seg(pre, TRUNCATED, trunc)


def _for_segs(st: For, cfg: ExtractionConfig) -> Iterator[Seg]:
    if st.cond is not None:
        cond = st.cond
    else:
        # Condition-free `for`: a synthetic always-true condition whose
        # provenance is the statement itself, matching the interpreter trace.
        cond = BoolLit(value=True, nid=st.nid, line=st.line, col=st.col, ty=BOOL)
    body = _capped_segs(st.body, cfg)
    if st.update is not None:
        upd = Step(st.update, st.update.nid)
        body = [
            Seg(seg.steps + (upd,), FLOW, None) if seg.term == FLOW else seg
            for seg in body
        ]
    loop = _while_segs(cond, body, cfg)
    if st.init is None:
        yield from loop
        return
    init = Step(st.init, st.init.nid)
    for seg in loop:
        yield Seg((init,) + seg.steps, seg.term, seg.trunc)


def _function_segs(fn: FunctionDecl, cfg: ExtractionConfig) -> list[Seg]:
    return list(islice(_seq_segs(fn.body.stmts, 0, cfg), cfg.max_paths + 1))


def _variant_from_seg(fn: FunctionDecl, seg: Seg) -> PathVariant:
    return PathVariant(
        id="",
        entry=fn.name,
        params=fn.params,
        return_type=fn.return_type,
        steps=seg.steps,
        bound_exceeded=seg.term == TRUNCATED,
        truncation=seg.trunc,
    )


def enumerate_paths(program: SubjectProgram, cfg: ExtractionConfig) -> list[PathVariant]:
    """Intra-procedural path variants of the entry function (calls opaque)."""
    fn = program.function(cfg.entry_function)
    if fn is None:
        raise CalleeNotFound(cfg.entry_function)
    segs = islice(_seq_segs(fn.body.stmts, 0, cfg), cfg.max_paths)
    return [_variant_from_seg(fn, seg) for seg in segs]


# -- function inlining ---------------------------------------------------------


def _first_symbolic_call(st: Stmt, symbolic: frozenset[str]) -> Call | None:
    for top in stmt_exprs(st):
        for e in walk_exprs(top):
            if isinstance(e, Call) and e.name in symbolic and e.name not in FREE_FUNCTION_NAMES:
                return e
    return None


def _replace_in_expr(e: Expr, target: Expr, repl: Expr) -> Expr:
    if e is target:
        return repl
    if isinstance(e, Unary):
        return replace(e, operand=_replace_in_expr(e.operand, target, repl))
    if isinstance(e, Binary):
        return replace(
            e,
            left=_replace_in_expr(e.left, target, repl),
            right=_replace_in_expr(e.right, target, repl),
        )
    if isinstance(e, Call):
        return replace(e, args=[_replace_in_expr(a, target, repl) for a in e.args])
    if isinstance(e, MethodCall):
        return replace(
            e,
            receiver=_replace_in_expr(e.receiver, target, repl),
            args=[_replace_in_expr(a, target, repl) for a in e.args],
        )
    if isinstance(e, Index):
        return replace(
            e,
            base=_replace_in_expr(e.base, target, repl),
            index=_replace_in_expr(e.index, target, repl),
        )
    if isinstance(e, ArrayLen):
        return replace(e, base=_replace_in_expr(e.base, target, repl))
    if isinstance(e, NewArray):
        return replace(e, size=_replace_in_expr(e.size, target, repl))
    return e


def _replace_in_stmt(st: Stmt, target: Expr, repl: Expr) -> Stmt:
    if isinstance(st, Decl) and st.init is not None:
        return replace(st, init=_replace_in_expr(st.init, target, repl))
    if isinstance(st, Assign):
        idx = _replace_in_expr(st.index, target, repl) if st.index is not None else None
        return replace(st, index=idx, value=_replace_in_expr(st.value, target, repl))
    if isinstance(st, Return) and st.value is not None:
        return replace(st, value=_replace_in_expr(st.value, target, repl))
    if isinstance(st, ExprStmt):
        return replace(st, expr=_replace_in_expr(st.expr, target, repl))
    if isinstance(st, Assert):
        return replace(st, cond=_replace_in_expr(st.cond, target, repl))
    return st


class _Inliner:
    def __init__(self, program: SubjectProgram, cfg: ExtractionConfig):
        self.program = program
        self.cfg = cfg
        self.symbolic = cfg.symbolic_set()
        self._memo: dict[str, list[Seg]] = {}

    def callee_segs(self, name: str) -> list[Seg]:
        if name not in self._memo:
            fn = self.program.function(name)
            if fn is None:
                raise CalleeNotFound(name)
            self._memo[name] = _function_segs(fn, self.cfg)
        return self._memo[name]

    def expand(self, steps: tuple[Step, ...]) -> Iterator[tuple[tuple[Step, ...], Truncation | None]]:
        """Expand every symbolic call in the step list, fanning out per callee path."""
        idx = 0
        done: list[Step] = []
        while idx < len(steps):
            step = steps[idx]
            call = _first_symbolic_call(step.stmt, self.symbolic)
            if call is None:
                done.append(step)
                idx += 1
                continue
            prefix = tuple(done)
            if step.chain.count(call.name) >= self.cfg.recursion_bound:
                # Too deep: a single truncated variant, cut before this statement.
                yield prefix, Truncation("recursion", call.nid,
                                         render_expr(call, compact=True))
                return
            yield from self._expand_call(prefix, step, call, steps[idx + 1 :])
            return
        yield tuple(done), None

    def _expand_call(
        self,
        prefix: tuple[Step, ...],
        step: Step,
        call: Call,
        rest: tuple[Step, ...],
    ) -> Iterator[tuple[tuple[Step, ...], Truncation | None]]:
        callee = self.program.function(call.name)
        if callee is None:
            raise CalleeNotFound(call.name)
        callee_chain = step.chain + (call.name,)
        segs = self.callee_segs(call.name)
        is_void = callee.return_type == VOID
        # Result names must be unique among completed splices: references
        # injected after a later same-named declaration would rebind to it.
        pattern = re.compile(re.escape(call.name) + r"_ret\d*$")
        earlier = sum(
            1 for s in prefix
            if isinstance(s.stmt, Decl) and pattern.fullmatch(s.stmt.name)
        )
        ret_name = f"{call.name}_ret" + (str(earlier) if earlier else "")
        # When some callee path can fall off the end, bind the result through
        # a zero-initialized local assigned by each return.
        predecl = (not is_void) and any(s.term == FLOW for s in segs)
        for seg in segs:
            spliced: list[Step] = []
            for p, arg in zip(callee.params, call.args):
                decl = Decl(decl_type=p.ty, name=p.name, init=arg,
                            nid=call.nid, line=call.line, col=call.col)
                spliced.append(Step(decl, provenance=call.nid, chain=step.chain))
            if predecl:
                decl = Decl(decl_type=callee.return_type, name=ret_name, init=None,
                            nid=call.nid, line=call.line, col=call.col)
                spliced.append(Step(decl, provenance=call.nid, chain=callee_chain))
            for cs in seg.steps:
                st = cs.stmt
                if isinstance(st, Return):
                    if is_void:
                        continue
                    if predecl:
                        repl: Stmt = Assign(
                            name=ret_name, index=None, value=st.value,
                            nid=st.nid, line=st.line, col=st.col,
                            target_ty=callee.return_type, target_binding="local",
                        )
                    else:
                        repl = Decl(decl_type=callee.return_type, name=ret_name,
                                    init=st.value, nid=st.nid, line=st.line, col=st.col)
                    spliced.append(Step(repl, provenance=cs.provenance, chain=callee_chain))
                else:
                    spliced.append(Step(st, cs.provenance, chain=callee_chain))
            if seg.term == TRUNCATED:
                for suffix, inner in self.expand(tuple(spliced)):
                    yield prefix + suffix, inner or seg.trunc
                continue
            if is_void and isinstance(step.stmt, ExprStmt) and step.stmt.expr is call:
                tail: list[Step] = list(spliced)
            else:
                ret_ref = VarRef(name=ret_name, nid=call.nid, line=call.line,
                                 col=call.col, ty=callee.return_type, binding="local")
                new_stmt = _replace_in_stmt(step.stmt, call, ret_ref)
                tail = list(spliced) + [Step(new_stmt, step.provenance, step.chain, step.satisfied)]
            tail.extend(rest)
            for suffix, inner in self.expand(tuple(tail)):
                yield prefix + suffix, inner


def _variant_signature(v: PathVariant) -> tuple:
    """The identity the tree merges on: step keys plus the truncation point.

    Truncation can cut away the steps that distinguished two fan-out
    branches (e.g. a caller assert whose condition held the truncated
    call), collapsing them into one path.
    """
    keys = tuple(
        (type(s.stmt).__name__, s.provenance,
         s.stmt.expected if isinstance(s.stmt, Assert) else None)
        for s in v.steps
    )
    trunc = (v.truncation.kind, v.truncation.node_id) if v.truncation else None
    return keys, trunc


def _dedupe(variants: Iterator[PathVariant]) -> Iterator[PathVariant]:
    seen: set[tuple] = set()
    for v in variants:
        sig = _variant_signature(v)
        if sig in seen:
            continue
        seen.add(sig)
        yield v


def inline_symbolic_calls(
    paths: list[PathVariant], program: SubjectProgram, cfg: ExtractionConfig
) -> list[PathVariant]:
    """Inline symbolic callees into each path, one variant per callee path."""
    inliner = _Inliner(program, cfg)

    def all_expanded() -> Iterator[PathVariant]:
        for v in paths:
            for steps, trunc in inliner.expand(v.steps):
                final_trunc = trunc or v.truncation
                yield replace(
                    v,
                    steps=steps,
                    truncation=final_trunc,
                    bound_exceeded=final_trunc is not None,
                )

    return list(islice(_dedupe(all_expanded()), cfg.max_paths))


# -- variable renaming ---------------------------------------------------------


def _rewrite_uses(e: Expr, binding: dict[str, str]) -> Expr:
    if isinstance(e, VarRef):
        if e.binding != "field" and e.name in binding and binding[e.name] != e.name:
            return replace(e, name=binding[e.name])
        return e
    if isinstance(e, Unary):
        return replace(e, operand=_rewrite_uses(e.operand, binding))
    if isinstance(e, Binary):
        return replace(e, left=_rewrite_uses(e.left, binding),
                       right=_rewrite_uses(e.right, binding))
    if isinstance(e, Call):
        return replace(e, args=[_rewrite_uses(a, binding) for a in e.args])
    if isinstance(e, MethodCall):
        return replace(e, receiver=_rewrite_uses(e.receiver, binding),
                       args=[_rewrite_uses(a, binding) for a in e.args])
    if isinstance(e, Index):
        return replace(e, base=_rewrite_uses(e.base, binding),
                       index=_rewrite_uses(e.index, binding))
    if isinstance(e, ArrayLen):
        return replace(e, base=_rewrite_uses(e.base, binding))
    if isinstance(e, NewArray):
        return replace(e, size=_rewrite_uses(e.size, binding))
    return e


def rename_variables(variant: PathVariant) -> PathVariant:
    """Give per-instance numeric suffixes to locals declared more than once.

    Entry parameters are never renamed; a local colliding with a parameter
    name counts the parameter as instance 0 and is suffixed from _1.
    """
    param_names = {p.name for p in variant.params}
    decl_total: dict[str, int] = {}
    for step in variant.steps:
        if isinstance(step.stmt, Decl):
            name = step.stmt.name
            decl_total[name] = decl_total.get(name, 0) + 1
    occupants = {
        name: total + (1 if name in param_names else 0)
        for name, total in decl_total.items()
    }
    if all(v <= 1 for v in occupants.values()):
        return variant

    next_idx = {name: (1 if name in param_names else 0) for name in decl_total}
    binding: dict[str, str] = {}
    rename_map: dict[str, list[str]] = {}
    new_steps: list[Step] = []
    for step in variant.steps:
        st = step.stmt
        # Uses are rewritten against bindings established by earlier steps;
        # a declaration's initializer still sees the previous binding.
        if isinstance(st, Decl):
            init = _rewrite_uses(st.init, binding) if st.init is not None else None
            if occupants.get(st.name, 0) > 1:
                new_name = f"{st.name}_{next_idx[st.name]}"
                next_idx[st.name] += 1
                binding[st.name] = new_name
                rename_map.setdefault(st.name, []).append(new_name)
                st2: Stmt = replace(st, name=new_name, init=init)
            else:
                binding[st.name] = st.name
                st2 = replace(st, init=init) if init is not st.init else st
        elif isinstance(st, Assign):
            idx = _rewrite_uses(st.index, binding) if st.index is not None else None
            value = _rewrite_uses(st.value, binding)
            name = st.name
            if st.target_binding != "field" and name in binding:
                name = binding[name]
            st2 = replace(st, name=name, index=idx, value=value)
        elif isinstance(st, Return):
            st2 = replace(st, value=_rewrite_uses(st.value, binding)) if st.value is not None else st
        elif isinstance(st, ExprStmt):
            st2 = replace(st, expr=_rewrite_uses(st.expr, binding))
        elif isinstance(st, Assert):
            st2 = replace(st, cond=_rewrite_uses(st.cond, binding))
        else:  # pragma: no cover
            st2 = st
        new_steps.append(Step(st2, step.provenance, step.chain, step.satisfied))
    return replace(variant, steps=tuple(new_steps),
                   rename_map={k: tuple(v) for k, v in rename_map.items()})


# -- constant propagation and folding -------------------------------------------


_TRACKABLE = (INT, BOOL, CHAR)


def _lit_value(e: Expr):
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, CharLit):
        return Char(e.value)
    return None


def _make_lit(value, model: Expr) -> Expr:
    kw = dict(nid=model.nid, line=model.line, col=model.col)
    if isinstance(value, bool):
        return BoolLit(value=value, ty=BOOL, **kw)
    if isinstance(value, Char):
        return CharLit(value=value.c, ty=CHAR, **kw)
    return IntLit(value=value, ty=INT, **kw)


def _fold_expr(e: Expr, env: dict[str, object]) -> Expr:
    if isinstance(e, VarRef):
        if e.binding != "field" and e.name in env:
            return _make_lit(env[e.name], e)
        return e
    if isinstance(e, Unary):
        operand = _fold_expr(e.operand, env)
        v = _lit_value(operand)
        if v is not None and not isinstance(v, Char):
            try:
                return _make_lit(apply_unary(e.op, v), e)
            except (EvalFault, TypeError):
                pass
        return replace(e, operand=operand)
    if isinstance(e, Binary):
        left = _fold_expr(e.left, env)
        lv = _lit_value(left)
        if e.op in ("&&", "||") and isinstance(lv, bool):
            # Short-circuit on a constant left operand is always sound.
            if e.op == "&&":
                return _fold_expr(e.right, env) if lv else _make_lit(False, e)
            return _make_lit(True, e) if lv else _fold_expr(e.right, env)
        right = _fold_expr(e.right, env)
        rv = _lit_value(right)
        if lv is not None and rv is not None:
            try:
                return _make_lit(apply_binary(e.op, lv, rv), e)
            except (EvalFault, TypeError):
                pass
        if e.op == "&&" and isinstance(rv, bool) and rv:
            return left
        if e.op == "||" and isinstance(rv, bool) and not rv:
            return left
        return replace(e, left=left, right=right)
    if isinstance(e, Call):
        return replace(e, args=[_fold_expr(a, env) for a in e.args])
    if isinstance(e, MethodCall):
        return replace(e, receiver=_fold_expr(e.receiver, env),
                       args=[_fold_expr(a, env) for a in e.args])
    if isinstance(e, Index):
        return replace(e, base=_fold_expr(e.base, env), index=_fold_expr(e.index, env))
    if isinstance(e, ArrayLen):
        return replace(e, base=_fold_expr(e.base, env))
    if isinstance(e, NewArray):
        return replace(e, size=_fold_expr(e.size, env))
    return e


def _subst_operands(e: Expr, env: dict[str, object]) -> Expr:
    """Fold the operands of a comparison but keep its top-level shape, so a
    statically violated assert still reads e.g. ``assertTrue(1<0)``."""
    if isinstance(e, Binary) and e.op not in ("&&", "||"):
        return replace(e, left=_fold_expr(e.left, env), right=_fold_expr(e.right, env))
    return _fold_expr(e, env)


def fold_constants(variant: PathVariant) -> PathVariant:
    """Propagate int/boolean/char constants forward and fold them.

    An assert whose condition folds to the negation of its expected value
    marks the path pruned-infeasible; one folding to its expected value is
    kept for provenance but hidden from display.
    """
    env: dict[str, object] = {}
    new_steps: list[Step] = []
    pruned = variant.pruned_infeasible
    for step in variant.steps:
        st = step.stmt
        satisfied = step.satisfied
        if isinstance(st, Assert):
            folded = _fold_expr(st.cond, env)
            fv = _lit_value(folded)
            if isinstance(fv, bool):
                if fv == st.expected:
                    satisfied = True
                    st2: Stmt = st
                else:
                    pruned = True
                    st2 = replace(st, cond=_subst_operands(st.cond, env))
            else:
                st2 = replace(st, cond=folded)
        elif isinstance(st, Decl):
            init = _fold_expr(st.init, env) if st.init is not None else None
            st2 = replace(st, init=init) if init is not st.init else st
            env.pop(st.name, None)
            if init is not None and st.decl_type in _TRACKABLE:
                v = _lit_value(init)
                if v is not None:
                    env[st.name] = v
        elif isinstance(st, Assign):
            idx = _fold_expr(st.index, env) if st.index is not None else None
            value = _fold_expr(st.value, env)
            st2 = replace(st, index=idx, value=value)
            if st.index is None and st.target_binding != "field":
                env.pop(st.name, None)
                if st.target_ty in _TRACKABLE:
                    v = _lit_value(value)
                    if v is not None:
                        env[st.name] = v
        elif isinstance(st, Return):
            st2 = replace(st, value=_fold_expr(st.value, env)) if st.value is not None else st
        elif isinstance(st, ExprStmt):
            st2 = replace(st, expr=_fold_expr(st.expr, env))
        else:  # pragma: no cover
            st2 = st
        new_steps.append(Step(st2, step.provenance, step.chain, satisfied))
    return replace(variant, steps=tuple(new_steps), pruned_infeasible=pruned)


# -- top-level pipeline ----------------------------------------------------------


@dataclass
class ExtractionResult:
    variants: list[PathVariant]
    truncated_by_max_paths: bool = False

    def by_id(self) -> dict[str, PathVariant]:
        return {v.id: v for v in self.variants}


def extract(program: SubjectProgram, cfg: ExtractionConfig) -> ExtractionResult:
    """Full pipeline: enumerate, inline, rename, fold, assign stable ids."""
    fn = program.function(cfg.entry_function)
    if fn is None:
        raise CalleeNotFound(cfg.entry_function)
    for name in cfg.symbolic_set():
        if program.function(name) is None:
            raise CalleeNotFound(name)

    inliner = _Inliner(program, cfg)

    def pipeline() -> Iterator[PathVariant]:
        for seg in _seq_segs(fn.body.stmts, 0, cfg):
            base = _variant_from_seg(fn, seg)
            for steps, trunc in inliner.expand(base.steps):
                final_trunc = trunc or base.truncation
                yield replace(base, steps=steps, truncation=final_trunc,
                              bound_exceeded=final_trunc is not None)

    raw = list(islice(_dedupe(pipeline()), cfg.max_paths + 1))
    truncated = len(raw) > cfg.max_paths
    variants = []
    for i, v in enumerate(raw[: cfg.max_paths]):
        v = fold_constants(rename_variables(v))
        v.id = f"p{i}"
        variants.append(v)
    return ExtractionResult(variants, truncated)


# -- serialization and display ----------------------------------------------------


def serialize_variant(v: PathVariant) -> dict:
    steps = []
    for s in v.visible_steps():
        entry = {
            "kind": s.kind,
            "text": render_simple_stmt(s.stmt, compact=True),
            "provenanceNodeId": s.provenance,
        }
        if isinstance(s.stmt, Assert):
            entry["assertExpected"] = s.stmt.expected
        steps.append(entry)
    return {
        "id": v.id,
        "steps": steps,
        "boundExceeded": v.bound_exceeded,
        "prunedInfeasible": v.pruned_infeasible,
    }


def render_variant(v: PathVariant) -> str:
    """Executable-looking display form of a path variant."""
    params = ", ".join(f"{p.ty} {p.name}" for p in v.params)
    lines = [f"{v.return_type} {v.entry}({params}) {{"]
    for s in v.visible_steps():
        lines.append("    " + render_simple_stmt(s.stmt, compact=True))
    if v.bound_exceeded:
        lines.append("    // truncated: bound exceeded")
    lines.append("}")
    return "\n".join(lines)


def check_variant_scopes(variant: PathVariant, program: SubjectProgram) -> None:
    """Validate that a variant's bindings are unique and every use resolves."""
    declared = {p.name for p in variant.params}
    fields = program.field_names
    for step in variant.steps:
        st = step.stmt
        if isinstance(st, (If, While, DoWhile, For, Block)):
            raise AssertionError(f"variant contains control flow: {type(st).__name__}")
        for top in stmt_exprs(st):
            for e in walk_exprs(top):
                if isinstance(e, VarRef):
                    if e.binding == "field":
                        if e.name not in fields:
                            raise AssertionError(f"unknown field '{e.name}'")
                    elif e.name not in declared:
                        raise AssertionError(f"use of '{e.name}' before declaration")
        if isinstance(st, Decl):
            if st.name in declared:
                raise AssertionError(f"duplicate declaration of '{st.name}'")
            declared.add(st.name)
        elif isinstance(st, Assign) and st.target_binding != "field":
            if st.name not in declared:
                raise AssertionError(f"assignment to undeclared '{st.name}'")
