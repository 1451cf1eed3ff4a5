"""Rendering of PALM-J programs, statements, and expressions.

Two expression styles are used throughout the workbench:

  - spaced  (``x > 0``): full program pretty-printing; round-trips through
    the parser to a structurally equal program;
  - compact (``y+z>0``): path variants, tree labels, and assertion texts in
    verdicts, so feedback strings match the displayed variant exactly.
"""

from __future__ import annotations

from .ast import (
    ArrayLen,
    Assert,
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    CharLit,
    Decl,
    DoubleLit,
    DoWhile,
    Expr,
    ExprStmt,
    FieldDecl,
    For,
    FunctionDecl,
    If,
    Index,
    IntLit,
    MethodCall,
    NewArray,
    Return,
    Stmt,
    StringLit,
    SubjectProgram,
    Unary,
    VarRef,
    While,
)
from .parser import UNESCAPES

_PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def escape_string(s: str) -> str:
    return "".join(UNESCAPES.get(c, '\\"' if c == '"' else c) for c in s)


def escape_char(c: str) -> str:
    if c == "'":
        return "\\'"
    return UNESCAPES.get(c, c)


def format_double(v: float) -> str:
    text = repr(v)
    if "e" in text or "E" in text or "." not in text:
        text = f"{v:.17f}".rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def render_expr(e: Expr, compact: bool = False) -> str:
    return _expr(e, 0, compact)


def _expr(e: Expr, parent_prec: int, compact: bool) -> str:
    if isinstance(e, IntLit):
        s = str(e.value)
        return f"({s})" if e.value < 0 and parent_prec >= _UNARY_PREC else s
    if isinstance(e, DoubleLit):
        return format_double(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, StringLit):
        return f'"{escape_string(e.value)}"'
    if isinstance(e, CharLit):
        return f"'{escape_char(e.value)}'"
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, Unary):
        inner = _expr(e.operand, _UNARY_PREC, compact)
        text = e.op + inner
        return f"({text})" if parent_prec > _UNARY_PREC else text
    if isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        left = _expr(e.left, prec, compact)
        # Right operand of a left-associative chain needs parens at equal
        # precedence: a - (b - c).
        right = _expr(e.right, prec + 1, compact)
        op = e.op if compact else f" {e.op} "
        text = f"{left}{op}{right}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(e, Call):
        args = ", ".join(_expr(a, 0, compact) for a in e.args)
        if compact:
            args = args.replace(", ", ",")
        return f"{e.name}({args})"
    if isinstance(e, MethodCall):
        recv = _expr(e.receiver, _UNARY_PREC + 1, compact)
        args = ", ".join(_expr(a, 0, compact) for a in e.args)
        if compact:
            args = args.replace(", ", ",")
        return f"{recv}.{e.name}({args})"
    if isinstance(e, Index):
        base = _expr(e.base, _UNARY_PREC + 1, compact)
        return f"{base}[{_expr(e.index, 0, compact)}]"
    if isinstance(e, ArrayLen):
        base = _expr(e.base, _UNARY_PREC + 1, compact)
        return f"{base}.length"
    if isinstance(e, NewArray):
        return f"new {e.elem_type}[{_expr(e.size, 0, compact)}]"
    raise TypeError(f"cannot render {type(e).__name__}")


def render_simple_stmt(st: Stmt, compact: bool = False) -> str:
    """A single non-compound statement, with trailing semicolon."""
    if isinstance(st, Decl):
        if st.init is None:
            return f"{st.decl_type} {st.name};"
        return f"{st.decl_type} {st.name} = {render_expr(st.init, compact)};"
    if isinstance(st, Assign):
        target = st.name if st.index is None else f"{st.name}[{render_expr(st.index, compact)}]"
        return f"{target} = {render_expr(st.value, compact)};"
    if isinstance(st, Return):
        if st.value is None:
            return "return;"
        return f"return {render_expr(st.value, compact)};"
    if isinstance(st, ExprStmt):
        return f"{render_expr(st.expr, compact)};"
    if isinstance(st, Assert):
        name = "assertTrue" if st.expected else "assertFalse"
        return f"{name}({render_expr(st.cond, compact)});"
    raise TypeError(f"not a simple statement: {type(st).__name__}")


def render_assert_text(cond: Expr, expected: bool) -> str:
    """Assertion text as shown in variants and divergence verdicts."""
    name = "assertTrue" if expected else "assertFalse"
    return f"{name}({render_expr(cond, compact=True)})"


class _Printer:
    def __init__(self):
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("    " * depth + text)

    def stmt(self, st: Stmt, depth: int) -> None:
        if isinstance(st, Block):
            if not st.stmts:
                self.emit(depth, "{ }")
                return
            self.emit(depth, "{")
            for s in st.stmts:
                self.stmt(s, depth + 1)
            self.emit(depth, "}")
        elif isinstance(st, If):
            self.emit(depth, f"if ({render_expr(st.cond)})")
            self.nested(st.then, depth)
            if st.els is not None:
                self.emit(depth, "else")
                self.nested(st.els, depth)
        elif isinstance(st, While):
            self.emit(depth, f"while ({render_expr(st.cond)})")
            self.nested(st.body, depth)
        elif isinstance(st, DoWhile):
            self.emit(depth, "do")
            self.nested(st.body, depth)
            self.emit(depth, f"while ({render_expr(st.cond)});")
        elif isinstance(st, For):
            init = render_simple_stmt(st.init)[:-1] if st.init is not None else ""
            cond = render_expr(st.cond) if st.cond is not None else ""
            update = render_simple_stmt(st.update)[:-1] if st.update is not None else ""
            self.emit(depth, f"for ({init}; {cond}; {update})")
            self.nested(st.body, depth)
        else:
            self.emit(depth, render_simple_stmt(st))

    def nested(self, st: Stmt, depth: int) -> None:
        if isinstance(st, Block):
            self.stmt(st, depth)
        else:
            self.stmt(st, depth + 1)

    def function(self, fn: FunctionDecl) -> None:
        params = ", ".join(f"{p.ty} {p.name}" for p in fn.params)
        self.emit(0, f"{fn.return_type} {fn.name}({params})")
        self.stmt(fn.body, 0)

    def field(self, fd: FieldDecl) -> None:
        if fd.init is None:
            self.emit(0, f"{fd.ftype} {fd.name};")
        else:
            self.emit(0, f"{fd.ftype} {fd.name} = {render_expr(fd.init)};")


def pretty_print(program: SubjectProgram) -> str:
    """Canonical source text; re-parsing yields a structurally equal program."""
    pr = _Printer()
    for fd in program.fields:
        pr.field(fd)
    for fn in program.functions:
        if pr.lines:
            pr.lines.append("")
        pr.function(fn)
    return "\n".join(pr.lines) + "\n"


def render_function_source(fn: FunctionDecl) -> str:
    pr = _Printer()
    pr.function(fn)
    return "\n".join(pr.lines)


def render_fields_source(program: SubjectProgram) -> str:
    pr = _Printer()
    for fd in program.fields:
        pr.field(fd)
    return "\n".join(pr.lines)
