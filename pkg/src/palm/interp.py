"""Tree-walking interpreter for PALM-J programs and path variants.

Executes programs on concrete inputs, records an execution trace (every
visited node, with the outcome of each branch-condition evaluation), and
checks the assertions embedded in path variants. A step limit guards
against nontermination; the first violated assertion ends a variant run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

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
    DOUBLE,
    DoubleLit,
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
    Return,
    STRING,
    Stmt,
    StringLit,
    SubjectProgram,
    SubjectType,
    Unary,
    VarRef,
    While,
)
from .builtins import FREE_FUNCTIONS, STRING_METHODS
from .check import assignable
from .ops import (
    Char,
    EvalFault,
    VOID_VALUE,
    ValueArray,
    apply_binary,
    apply_unary,
    wrap64,
)
from .parser import ParseError, tokenize
from .printer import format_double, render_assert_text

DEFAULT_STEP_LIMIT = 100_000


@dataclass
class TestCase:
    """A concrete invocation of the entry function."""

    __test__ = False  # not a pytest class, despite the name

    entry: str
    args: list

    def render(self) -> str:
        return f"{self.entry}({', '.join(render_value(a) for a in self.args)})"


def render_value(v) -> str:
    if v is VOID_VALUE:
        return "void"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_double(v)
    if isinstance(v, Char):
        from .printer import escape_char

        return f"'{escape_char(v.c)}'"
    if isinstance(v, str):
        from .printer import escape_string

        return f'"{escape_string(v)}"'
    if isinstance(v, ValueArray):
        return "{" + ", ".join(render_value(x) for x in v.items) + "}"
    return str(v)


@dataclass
class TraceEntry:
    node_id: int
    outcome: bool | None  # set for branch-condition evaluations
    symbolic: bool  # evaluated inside symbolic (path-enumerated) context


@dataclass
class BoundsInfo:
    """Loop-iteration and recursion maxima observed in symbolic context."""

    loop_true_max: dict[int, int] = field(default_factory=dict)
    call_depth_max: dict[str, int] = field(default_factory=dict)

    def within(self, loop_bound: int, recursion_bound: int, entry: str) -> bool:
        if any(v > loop_bound for v in self.loop_true_max.values()):
            return False
        for fn, depth in self.call_depth_max.items():
            allowed = recursion_bound + (1 if fn == entry else 0)
            if depth > allowed:
                return False
        return True


@dataclass
class ExecResult:
    outcome: str  # "returned" | "assertionViolated" | "runtimeError" | "stepLimitExceeded"
    value: object = None
    assert_step: int | None = None
    assert_text: str | None = None
    assert_expected: bool | None = None
    error_kind: str | None = None
    error_message: str | None = None
    error_position: tuple[int, int] | None = None
    trace: list[TraceEntry] = field(default_factory=list)
    lines_executed: set[int] = field(default_factory=set)
    bounds: BoundsInfo = field(default_factory=BoundsInfo)

    @property
    def returned(self) -> bool:
        return self.outcome == "returned"

    def branch_trace(self, symbolic_only: bool = True) -> list[tuple[int, bool]]:
        return [
            (t.node_id, t.outcome)
            for t in self.trace
            if t.outcome is not None and (t.symbolic or not symbolic_only)
        ]


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _StepLimit(Exception):
    pass


def zero_value(ty: SubjectType):
    if ty.array:
        return ValueArray(ty.elem, [])
    return {
        "int": 0,
        "double": 0.0,
        "boolean": False,
        "char": Char("\0"),
        "string": "",
    }[ty.base]


def coerce(value, ty: SubjectType):
    """Apply int-to-double widening where the static type requires it."""
    if ty == DOUBLE and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


class Interpreter:
    def __init__(
        self,
        program: SubjectProgram,
        step_limit: int = DEFAULT_STEP_LIMIT,
        symbolic_functions: set[str] | None = None,
    ):
        self.program = program
        self.step_limit = step_limit
        self.symbolic = symbolic_functions or set()
        self.steps = 0
        self.trace: list[TraceEntry] = []
        self.lines: set[int] = set()
        self.bounds = BoundsInfo()
        self.fields: dict[str, object] = {}
        self.field_types = {f.name: f.ftype for f in program.fields}
        self._active: dict[str, int] = {}

    # -- bookkeeping -------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise _StepLimit()

    def _visit(self, node, outcome: bool | None, symbolic: bool) -> None:
        self.trace.append(TraceEntry(node.nid, outcome, symbolic))
        if node.line:
            self.lines.add(node.line)

    def init_fields(self) -> None:
        for f in self.program.fields:
            self.fields[f.name] = zero_value(f.ftype)
        for f in self.program.fields:
            if f.init is not None:
                self.fields[f.name] = coerce(self._eval(f.init, {}, {}, False), f.ftype)
                if f.line:
                    self.lines.add(f.line)

    def _result(self, outcome: str, **kw) -> ExecResult:
        return ExecResult(
            outcome=outcome,
            trace=self.trace,
            lines_executed=self.lines,
            bounds=self.bounds,
            **kw,
        )

    # -- program execution ---------------------------------------------------

    def run_test(self, test: TestCase) -> ExecResult:
        fn = self.program.function(test.entry)
        if fn is None:
            raise ValueError(f"unknown entry function '{test.entry}'")
        try:
            self.init_fields()
            value = self._call_function(fn, list(test.args), symbolic=True)
            return self._result("returned", value=value)
        except EvalFault as e:
            return self._result("runtimeError", error_kind=e.kind, error_message=str(e))
        except _StepLimit:
            return self._result("stepLimitExceeded", error_kind="stepLimitExceeded",
                                error_message=f"exceeded {self.step_limit} steps")
        except RecursionError:
            return self._result("stepLimitExceeded", error_kind="stepLimitExceeded",
                                error_message="host recursion limit reached")

    def _call_function(self, fn: FunctionDecl, args: list, symbolic: bool):
        symbolic = symbolic and fn.name in self.symbolic
        env: dict[str, object] = {}
        types: dict[str, SubjectType] = {}
        for p, a in zip(fn.params, args):
            env[p.name] = coerce(a, p.ty)
            types[p.name] = p.ty
        self._active[fn.name] = self._active.get(fn.name, 0) + 1
        if symbolic:
            cur = self.bounds.call_depth_max.get(fn.name, 0)
            self.bounds.call_depth_max[fn.name] = max(cur, self._active[fn.name])
        try:
            self._exec_block(fn.body, env, types, symbolic)
        except _Return as r:
            return coerce(r.value, fn.return_type)
        finally:
            self._active[fn.name] -= 1
        if fn.return_type.base == "void" and not fn.return_type.array:
            return VOID_VALUE
        raise EvalFault("missing-return", f"'{fn.name}' ended without returning a value")

    # -- statements ----------------------------------------------------------

    def _exec_block(self, block: Block, env, types, symbolic) -> None:
        # Locals of an exited scope are dropped so sibling scopes can reuse names.
        declared: list[str] = []
        for st in block.stmts:
            self._exec_stmt(st, env, types, symbolic, declared)
        for name in declared:
            env.pop(name, None)
            types.pop(name, None)

    def _exec_substmt(self, st: Stmt, env, types, symbolic) -> None:
        if isinstance(st, Block):
            self._exec_block(st, env, types, symbolic)
        else:
            declared: list[str] = []
            self._exec_stmt(st, env, types, symbolic, declared)
            for name in declared:
                env.pop(name, None)
                types.pop(name, None)

    def _exec_stmt(self, st: Stmt, env, types, symbolic, declared: list[str]) -> None:
        self._tick()
        if isinstance(st, Decl):
            self._visit(st, None, symbolic)
            value = zero_value(st.decl_type) if st.init is None else self._eval(st.init, env, types, symbolic)
            env[st.name] = coerce(value, st.decl_type)
            types[st.name] = st.decl_type
            declared.append(st.name)
        elif isinstance(st, Assign):
            self._visit(st, None, symbolic)
            value = self._eval(st.value, env, types, symbolic)
            if st.index is not None:
                arr = env[st.name] if st.name in env else self.fields[st.name]
                idx = self._eval(st.index, env, types, symbolic)
                if not isinstance(arr, ValueArray) or idx < 0 or idx >= len(arr.items):
                    raise EvalFault("index-out-of-bounds",
                                    f"index {idx} out of bounds for '{st.name}'")
                arr.items[idx] = coerce(value, st.target_ty or arr.elem)
            elif st.name in env:
                env[st.name] = coerce(value, types.get(st.name, st.target_ty) or st.target_ty)
            else:
                self.fields[st.name] = coerce(value, self.field_types[st.name])
        elif isinstance(st, If):
            outcome = self._eval_condition(st.cond, env, types, symbolic)
            if outcome:
                self._exec_substmt(st.then, env, types, symbolic)
            elif st.els is not None:
                self._exec_substmt(st.els, env, types, symbolic)
        elif isinstance(st, While):
            true_count = 0
            while True:
                outcome = self._eval_condition(st.cond, env, types, symbolic)
                if not outcome:
                    break
                true_count += 1
                self._note_loop(st.cond.nid, true_count, symbolic)
                self._exec_substmt(st.body, env, types, symbolic)
        elif isinstance(st, DoWhile):
            true_count = 0
            while True:
                self._exec_substmt(st.body, env, types, symbolic)
                outcome = self._eval_condition(st.cond, env, types, symbolic)
                if not outcome:
                    break
                true_count += 1
                self._note_loop(st.cond.nid, true_count, symbolic)
        elif isinstance(st, For):
            inner_declared: list[str] = []
            if st.init is not None:
                self._exec_stmt(st.init, env, types, symbolic, inner_declared)
            true_count = 0
            while True:
                if st.cond is not None:
                    outcome = self._eval_condition(st.cond, env, types, symbolic)
                else:
                    # Condition-free `for` still records a branch outcome so
                    # traces stay aligned with the enumerated asserts.
                    self._tick()
                    self._visit(st, True, symbolic)
                    outcome = True
                if not outcome:
                    break
                true_count += 1
                self._note_loop(st.cond.nid if st.cond is not None else st.nid,
                                true_count, symbolic)
                self._exec_substmt(st.body, env, types, symbolic)
                if st.update is not None:
                    self._exec_stmt(st.update, env, types, symbolic, inner_declared)
            for name in inner_declared:
                env.pop(name, None)
                types.pop(name, None)
        elif isinstance(st, Return):
            self._visit(st, None, symbolic)
            value = VOID_VALUE if st.value is None else self._eval(st.value, env, types, symbolic)
            raise _Return(value)
        elif isinstance(st, Block):
            self._exec_block(st, env, types, symbolic)
        elif isinstance(st, ExprStmt):
            self._visit(st, None, symbolic)
            self._eval(st.expr, env, types, symbolic)
        elif isinstance(st, Assert):
            # Asserts only appear in variants, which use run_variant().
            raise EvalFault("internal", "assert statement outside a variant run")
        else:  # pragma: no cover
            raise EvalFault("internal", f"unknown statement {type(st).__name__}")

    def _note_loop(self, nid: int, count: int, symbolic: bool) -> None:
        if symbolic:
            cur = self.bounds.loop_true_max.get(nid, 0)
            if count > cur:
                self.bounds.loop_true_max[nid] = count

    def _eval_condition(self, cond: Expr, env, types, symbolic) -> bool:
        self._tick()
        value = self._eval(cond, env, types, symbolic)
        self._visit(cond, bool(value), symbolic)
        return bool(value)

    # -- expressions -----------------------------------------------------------

    def _eval(self, e: Expr, env, types, symbolic):
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, DoubleLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, StringLit):
            return e.value
        if isinstance(e, CharLit):
            return Char(e.value)
        if isinstance(e, VarRef):
            if e.name in env:
                return env[e.name]
            return self.fields[e.name]
        if isinstance(e, Unary):
            return apply_unary(e.op, self._eval(e.operand, env, types, symbolic))
        if isinstance(e, Binary):
            if e.op == "&&":
                left = self._eval(e.left, env, types, symbolic)
                if not left:
                    return False
                return bool(self._eval(e.right, env, types, symbolic))
            if e.op == "||":
                left = self._eval(e.left, env, types, symbolic)
                if left:
                    return True
                return bool(self._eval(e.right, env, types, symbolic))
            left = self._eval(e.left, env, types, symbolic)
            right = self._eval(e.right, env, types, symbolic)
            return apply_binary(e.op, left, right)
        if isinstance(e, Call):
            args = [self._eval(a, env, types, symbolic) for a in e.args]
            if e.name in FREE_FUNCTIONS:
                return self._call_builtin(e, args)
            fn = self.program.function(e.name)
            if fn is None:
                raise EvalFault("internal", f"unknown function '{e.name}'")
            self._tick()
            return self._call_function(fn, args, symbolic)
        if isinstance(e, MethodCall):
            recv = self._eval(e.receiver, env, types, symbolic)
            args = [self._eval(a, env, types, symbolic) for a in e.args]
            sig = STRING_METHODS[e.name]
            return sig.impl(recv, *args)
        if isinstance(e, Index):
            arr = self._eval(e.base, env, types, symbolic)
            idx = self._eval(e.index, env, types, symbolic)
            if not isinstance(arr, ValueArray) or idx < 0 or idx >= len(arr.items):
                raise EvalFault("index-out-of-bounds", f"index {idx} out of bounds")
            return arr.items[idx]
        if isinstance(e, ArrayLen):
            arr = self._eval(e.base, env, types, symbolic)
            return len(arr.items)
        if isinstance(e, NewArray):
            size = self._eval(e.size, env, types, symbolic)
            if size < 0:
                raise EvalFault("index-out-of-bounds", f"negative array size {size}")
            return ValueArray(e.elem_type, [zero_value(e.elem_type) for _ in range(size)])
        raise EvalFault("internal", f"unknown expression {type(e).__name__}")

    def _call_builtin(self, e: Call, args: list):
        overloads = FREE_FUNCTIONS[e.name]
        # Exact int overload first, then the double overload with widening.
        for sig in overloads:
            if len(sig.params) == len(args) and all(
                (p == INT and isinstance(a, int) and not isinstance(a, bool))
                or (p == DOUBLE and isinstance(a, float))
                for a, p in zip(args, sig.params)
            ):
                return sig.impl(*args)
        for sig in overloads:
            if len(sig.params) == len(args) and all(
                p == DOUBLE and isinstance(a, (int, float)) and not isinstance(a, bool)
                for a, p in zip(args, sig.params)
            ):
                return sig.impl(*[float(a) for a in args])
        raise EvalFault("internal", f"no applicable overload for {e.name}")


def run_program(
    program: SubjectProgram,
    test: TestCase,
    step_limit: int = DEFAULT_STEP_LIMIT,
    symbolic_functions: set[str] | None = None,
) -> ExecResult:
    """Execute the original program on a test, tracing branch outcomes."""
    symbolic = symbolic_functions if symbolic_functions is not None else {test.entry}
    return Interpreter(program, step_limit, symbolic).run_test(test)


def run_variant(
    variant,
    program: SubjectProgram,
    test: TestCase,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ExecResult:
    """Execute a linearized path variant; stops at the first violated assert."""
    from .extraction import PathVariant

    assert isinstance(variant, PathVariant)
    if test.entry != variant.entry:
        raise ValueError(f"test calls '{test.entry}' but variant belongs to '{variant.entry}'")
    interp = Interpreter(program, step_limit, symbolic_functions=set())
    env: dict[str, object] = {}
    types: dict[str, SubjectType] = {}
    try:
        interp.init_fields()
        for p, a in zip(variant.params, test.args):
            env[p.name] = coerce(a, p.ty)
            types[p.name] = p.ty
        for i, step in enumerate(variant.steps):
            st = step.stmt
            interp._tick()
            if isinstance(st, Assert):
                value = bool(interp._eval(st.cond, env, types, False))
                interp.trace.append(TraceEntry(step.provenance, value, True))
                if st.line:
                    interp.lines.add(st.line)
                if value != st.expected:
                    return interp._result(
                        "assertionViolated",
                        assert_step=i,
                        assert_text=render_assert_text(st.cond, st.expected),
                        assert_expected=st.expected,
                    )
                continue
            interp.trace.append(TraceEntry(step.provenance, None, True))
            if st.line:
                interp.lines.add(st.line)
            if isinstance(st, Decl):
                value = zero_value(st.decl_type) if st.init is None else interp._eval(st.init, env, types, False)
                env[st.name] = coerce(value, st.decl_type)
                types[st.name] = st.decl_type
            elif isinstance(st, Assign):
                value = interp._eval(st.value, env, types, False)
                if st.index is not None:
                    arr = env[st.name] if st.name in env else interp.fields[st.name]
                    idx = interp._eval(st.index, env, types, False)
                    if not isinstance(arr, ValueArray) or idx < 0 or idx >= len(arr.items):
                        raise EvalFault("index-out-of-bounds",
                                        f"index {idx} out of bounds for '{st.name}'")
                    arr.items[idx] = coerce(value, st.target_ty or arr.elem)
                elif st.name in env:
                    env[st.name] = coerce(value, types.get(st.name) or st.target_ty)
                else:
                    interp.fields[st.name] = coerce(value, interp.field_types[st.name])
            elif isinstance(st, ExprStmt):
                interp._eval(st.expr, env, types, False)
            elif isinstance(st, Return):
                value = VOID_VALUE if st.value is None else interp._eval(st.value, env, types, False)
                ret_ty = variant.return_type
                return interp._result("returned", value=coerce(value, ret_ty))
            else:
                raise EvalFault("internal", f"unexpected step {type(st).__name__}")
        # Fell off the end: fine for void functions and truncated variants.
        if variant.return_type.base == "void" and not variant.return_type.array:
            return interp._result("returned", value=VOID_VALUE)
        if variant.bound_exceeded:
            return interp._result("returned", value=None)
        raise EvalFault("missing-return", f"'{variant.entry}' ended without returning a value")
    except EvalFault as e:
        return interp._result("runtimeError", error_kind=e.kind, error_message=str(e))
    except _StepLimit:
        return interp._result("stepLimitExceeded", error_kind="stepLimitExceeded",
                              error_message=f"exceeded {step_limit} steps")
    except RecursionError:
        return interp._result("stepLimitExceeded", error_kind="stepLimitExceeded",
                              error_message="host recursion limit reached")


# -- test-call literals --------------------------------------------------------


def parse_test_literal(program: SubjectProgram, text: str) -> TestCase:
    """Parse ``name(arg, ...)`` with PALM-J literals; arrays as ``{v1, v2}``.

    Checks arity and types against the entry signature, applying int-to-double
    widening. Raises ParseError on malformed or ill-typed input.
    """
    toks = tokenize(text)
    pos = 0

    def cur():
        return toks[pos]

    def take(kind: str, value: str | None = None):
        nonlocal pos
        t = toks[pos]
        if t.kind != kind or (value is not None and t.value != value):
            raise ParseError(f"malformed test literal near {t.value!r}", t.line, t.col,
                             (value or kind,))
        pos += 1
        return t

    def literal():
        nonlocal pos
        t = cur()
        if t.kind == "punct" and t.value == "-":
            pos += 1
            t2 = cur()
            if t2.kind == "int":
                pos += 1
                return wrap64(-int(t2.value))
            if t2.kind == "double":
                pos += 1
                return -float(t2.value)
            raise ParseError("'-' must prefix a numeric literal", t.line, t.col)
        if t.kind == "int":
            pos += 1
            return wrap64(int(t.value))
        if t.kind == "double":
            pos += 1
            return float(t.value)
        if t.kind == "string":
            pos += 1
            return t.value
        if t.kind == "char":
            pos += 1
            return Char(t.value)
        if t.kind == "kw" and t.value in ("true", "false"):
            pos += 1
            return t.value == "true"
        if t.kind == "punct" and t.value == "{":
            pos += 1
            items = []
            if not (cur().kind == "punct" and cur().value == "}"):
                while True:
                    items.append(literal())
                    if cur().kind == "punct" and cur().value == ",":
                        pos += 1
                        continue
                    break
            take("punct", "}")
            return items  # element type resolved against the signature
        raise ParseError(f"expected a literal, found {t.value!r}", t.line, t.col)

    name_tok = take("ident")
    take("punct", "(")
    args = []
    if not (cur().kind == "punct" and cur().value == ")"):
        while True:
            args.append(literal())
            if cur().kind == "punct" and cur().value == ",":
                pos += 1
                continue
            break
    take("punct", ")")
    if cur().kind == "punct" and cur().value == ";":
        pos += 1
    if cur().kind != "eof":
        t = cur()
        raise ParseError(f"trailing input after test call: {t.value!r}", t.line, t.col)

    fn = program.function(name_tok.value)
    if fn is None:
        raise ParseError(f"unknown function '{name_tok.value}'", name_tok.line, name_tok.col)
    if len(args) != len(fn.params):
        raise ParseError(
            f"'{fn.name}' expects {len(fn.params)} argument(s), got {len(args)}",
            name_tok.line, name_tok.col)
    coerced = []
    for raw, p in zip(args, fn.params):
        coerced.append(_coerce_literal(raw, p.ty, p.name, name_tok))
    return TestCase(fn.name, coerced)


def _value_type(v) -> SubjectType:
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, float):
        return DOUBLE
    if isinstance(v, Char):
        return CHAR
    if isinstance(v, str):
        return STRING
    raise TypeError(f"unsupported literal value {v!r}")


def _coerce_literal(raw, ty: SubjectType, pname: str, tok) -> object:
    if isinstance(raw, list):
        if not ty.array:
            raise ParseError(f"parameter '{pname}' is {ty}, got an array", tok.line, tok.col)
        items = [_coerce_literal(x, ty.elem, pname, tok) for x in raw]
        return ValueArray(ty.elem, items)
    if ty.array:
        raise ParseError(f"parameter '{pname}' is {ty}, got a scalar", tok.line, tok.col)
    vty = _value_type(raw)
    if not assignable(vty, ty):
        raise ParseError(f"parameter '{pname}' is {ty}, got {vty}", tok.line, tok.col)
    return coerce(raw, ty)
