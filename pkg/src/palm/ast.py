"""AST for PALM-J, a small Java-flavored imperative subject language.

A program is a list of module-level field declarations plus functions.
Every node carries a numeric id, unique within its program and assigned in
parse order, plus a source position. Transformation passes copy nodes with
``dataclasses.replace``, which keeps the original node's id: the id of a
copied statement therefore acts as its provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields


@dataclass(frozen=True)
class SubjectType:
    """Static type: a scalar base or a one-dimensional array of a scalar."""

    base: str  # "int" | "double" | "boolean" | "char" | "string" | "void"
    array: bool = False

    def __str__(self) -> str:
        name = "String" if self.base == "string" else self.base
        return name + ("[]" if self.array else "")

    @property
    def elem(self) -> SubjectType:
        return SubjectType(self.base)

    @property
    def is_numeric(self) -> bool:
        return not self.array and self.base in ("int", "double")


INT = SubjectType("int")
DOUBLE = SubjectType("double")
BOOL = SubjectType("boolean")
CHAR = SubjectType("char")
STRING = SubjectType("string")
VOID = SubjectType("void")

# Node fields that carry bookkeeping, not program structure.
META_FIELDS = {"nid", "line", "col", "ty", "binding", "target_ty", "target_binding",
               "source_text"}


@dataclass(eq=False)
class Node:
    nid: int = field(default=-1, kw_only=True)
    line: int = field(default=0, kw_only=True)
    col: int = field(default=0, kw_only=True)


@dataclass(eq=False)
class Expr(Node):
    # Static type, filled in by the checker.
    ty: SubjectType | None = field(default=None, kw_only=True, repr=False)


@dataclass(eq=False)
class IntLit(Expr):
    value: int


@dataclass(eq=False)
class DoubleLit(Expr):
    value: float


@dataclass(eq=False)
class BoolLit(Expr):
    value: bool


@dataclass(eq=False)
class StringLit(Expr):
    value: str


@dataclass(eq=False)
class CharLit(Expr):
    value: str  # exactly one character


@dataclass(eq=False)
class VarRef(Expr):
    name: str
    # "field" | "param" | "local", filled in by the checker.
    binding: str | None = field(default=None, kw_only=True, repr=False)


@dataclass(eq=False)
class Unary(Expr):
    op: str  # "-" | "!"
    operand: Expr


@dataclass(eq=False)
class Binary(Expr):
    op: str  # + - * / % < <= > >= == != && ||
    left: Expr
    right: Expr


@dataclass(eq=False)
class Call(Expr):
    """Call of a declared function or a free builtin (abs/min/max/floor)."""

    name: str
    args: list[Expr]


@dataclass(eq=False)
class MethodCall(Expr):
    """Builtin method on a string receiver, e.g. ``text.charAt(i)``."""

    receiver: Expr
    name: str
    args: list[Expr]


@dataclass(eq=False)
class Index(Expr):
    base: Expr
    index: Expr


@dataclass(eq=False)
class ArrayLen(Expr):
    base: Expr


@dataclass(eq=False)
class NewArray(Expr):
    elem_type: SubjectType
    size: Expr


@dataclass(eq=False)
class Stmt(Node):
    pass


@dataclass(eq=False)
class Decl(Stmt):
    decl_type: SubjectType
    name: str
    init: Expr | None


@dataclass(eq=False)
class Assign(Stmt):
    name: str
    index: Expr | None  # set for array element assignment
    value: Expr
    target_ty: SubjectType | None = field(default=None, kw_only=True, repr=False)
    # "field" | "param" | "local", filled in by the checker.
    target_binding: str | None = field(default=None, kw_only=True, repr=False)


@dataclass(eq=False)
class If(Stmt):
    cond: Expr
    then: Stmt
    els: Stmt | None


@dataclass(eq=False)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(eq=False)
class DoWhile(Stmt):
    body: Stmt
    cond: Expr


@dataclass(eq=False)
class For(Stmt):
    init: Stmt | None  # Decl or Assign or ExprStmt
    cond: Expr | None
    update: Stmt | None
    body: Stmt


@dataclass(eq=False)
class Return(Stmt):
    value: Expr | None


@dataclass(eq=False)
class Block(Stmt):
    stmts: list[Stmt]


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(eq=False)
class Assert(Stmt):
    """Branch-outcome assertion. Produced by path extraction, never parsed."""

    cond: Expr
    expected: bool


@dataclass(eq=False)
class Param(Node):
    name: str
    ty: SubjectType


@dataclass(eq=False)
class FieldDecl(Node):
    ftype: SubjectType
    name: str
    init: Expr | None


@dataclass(eq=False)
class FunctionDecl(Node):
    name: str
    params: list[Param]
    return_type: SubjectType
    body: Block


@dataclass(eq=False)
class SubjectProgram(Node):
    fields: list[FieldDecl]
    functions: list[FunctionDecl]
    source_text: str

    def function(self, name: str) -> FunctionDecl | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    @property
    def field_names(self) -> set[str]:
        return {f.name for f in self.fields}


def ast_equal(a, b) -> bool:
    """Structural equality, ignoring node ids, positions, and checker marks."""
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, Node):
        for f in dc_fields(a):
            if f.name in META_FIELDS:
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, list):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    return a == b


def walk_exprs(e: Expr):
    """Yield every expression node in evaluation order (post-order)."""
    if isinstance(e, Unary):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from walk_exprs(e.left)
        yield from walk_exprs(e.right)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk_exprs(a)
    elif isinstance(e, MethodCall):
        yield from walk_exprs(e.receiver)
        for a in e.args:
            yield from walk_exprs(a)
    elif isinstance(e, Index):
        yield from walk_exprs(e.base)
        yield from walk_exprs(e.index)
    elif isinstance(e, ArrayLen):
        yield from walk_exprs(e.base)
    elif isinstance(e, NewArray):
        yield from walk_exprs(e.size)
    yield e


def stmt_exprs(st: Stmt):
    """Top-level expressions of a single (non-compound) statement."""
    if isinstance(st, Decl) and st.init is not None:
        yield st.init
    elif isinstance(st, Assign):
        if st.index is not None:
            yield st.index
        yield st.value
    elif isinstance(st, Return) and st.value is not None:
        yield st.value
    elif isinstance(st, ExprStmt):
        yield st.expr
    elif isinstance(st, Assert):
        yield st.cond
