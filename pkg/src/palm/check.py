"""Name resolution and static type checking for PALM-J programs.

Rules, roughly Java's:
  - function names are unique and may not reuse builtin names;
  - parameter names are unique within a function;
  - locals may shadow fields, but not visible locals or parameters;
  - int widens implicitly to double in assignments, arguments, returns,
    and mixed arithmetic;
  - field initializers may reference earlier fields but may not call.

The checker annotates every expression with its static type and every
variable reference with its binding kind (field/param/local).
"""

from __future__ import annotations

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
    VOID,
    While,
    walk_exprs,
)
from .builtins import FREE_FUNCTIONS, FREE_FUNCTION_NAMES, STRING_METHODS
from .parser import SourceError


class ResolveError(SourceError):
    def __init__(self, name: str, line: int, col: int, message: str | None = None):
        super().__init__(message or f"unresolved identifier '{name}'", line, col)
        self.name = name


class TypeCheckError(SourceError):
    def __init__(self, message: str, line: int, col: int,
                 found: SubjectType | None = None, expected: SubjectType | None = None):
        super().__init__(message, line, col)
        self.found = found
        self.expected = expected


def assignable(value_ty: SubjectType, target_ty: SubjectType) -> bool:
    if value_ty == target_ty:
        return True
    return value_ty == INT and target_ty == DOUBLE  # widening


class Checker:
    def __init__(self, program: SubjectProgram):
        self.program = program
        self.functions: dict[str, FunctionDecl] = {}
        self.field_types: dict[str, SubjectType] = {}
        self.scopes: list[dict[str, SubjectType]] = []
        self.current: FunctionDecl | None = None

    def run(self) -> None:
        p = self.program
        for fn in p.functions:
            if fn.name in self.functions:
                raise ResolveError(fn.name, fn.line, fn.col, f"duplicate function '{fn.name}'")
            if fn.name in FREE_FUNCTION_NAMES:
                raise ResolveError(fn.name, fn.line, fn.col,
                                   f"'{fn.name}' is a builtin and cannot be redefined")
            self.functions[fn.name] = fn
        for fd in p.fields:
            if fd.name in self.field_types:
                raise ResolveError(fd.name, fd.line, fd.col, f"duplicate field '{fd.name}'")
            if fd.ftype == VOID:
                raise TypeCheckError("fields cannot be void", fd.line, fd.col)
            if fd.init is not None:
                for e in walk_exprs(fd.init):
                    if isinstance(e, (Call, MethodCall)):
                        raise TypeCheckError("field initializers cannot contain calls",
                                             e.line, e.col)
                ity = self.type_expr(fd.init)
                if not assignable(ity, fd.ftype):
                    raise TypeCheckError(
                        f"cannot initialize {fd.ftype} field '{fd.name}' with {ity}",
                        fd.line, fd.col, found=ity, expected=fd.ftype)
            self.field_types[fd.name] = fd.ftype
        for fn in p.functions:
            self.check_function(fn)

    # -- scopes ----------------------------------------------------------

    def lookup_var(self, name: str) -> tuple[SubjectType, str] | None:
        for i, scope in enumerate(reversed(self.scopes)):
            if name in scope:
                kind = "param" if len(self.scopes) - 1 - i == 0 else "local"
                return scope[name], kind
        if name in self.field_types:
            return self.field_types[name], "field"
        return None

    def declare(self, name: str, ty: SubjectType, line: int, col: int) -> None:
        for scope in self.scopes:
            if name in scope:
                raise ResolveError(name, line, col,
                                   f"'{name}' is already declared in an enclosing scope")
        self.scopes[-1][name] = ty

    # -- functions and statements -----------------------------------------

    def check_function(self, fn: FunctionDecl) -> None:
        self.current = fn
        params: dict[str, SubjectType] = {}
        for p in fn.params:
            if p.name in params:
                raise ResolveError(p.name, p.line, p.col, f"duplicate parameter '{p.name}'")
            if p.ty == VOID:
                raise TypeCheckError("parameters cannot be void", p.line, p.col)
            params[p.name] = p.ty
        self.scopes = [params]
        self.check_block(fn.body)
        self.scopes = []
        self.current = None

    def check_block(self, block: Block) -> None:
        self.scopes.append({})
        for st in block.stmts:
            self.check_stmt(st)
        self.scopes.pop()

    def check_stmt(self, st: Stmt) -> None:
        if isinstance(st, Decl):
            if st.decl_type == VOID:
                raise TypeCheckError("variables cannot be void", st.line, st.col)
            if st.init is not None:
                ity = self.type_expr(st.init)
                if not assignable(ity, st.decl_type):
                    raise TypeCheckError(
                        f"cannot initialize {st.decl_type} '{st.name}' with {ity}",
                        st.line, st.col, found=ity, expected=st.decl_type)
            self.declare(st.name, st.decl_type, st.line, st.col)
        elif isinstance(st, Assign):
            found = self.lookup_var(st.name)
            if found is None:
                raise ResolveError(st.name, st.line, st.col)
            vty, kind = found
            st.target_binding = kind
            if st.index is not None:
                if not vty.array:
                    raise TypeCheckError(f"'{st.name}' is not an array", st.line, st.col)
                idx_ty = self.type_expr(st.index)
                if idx_ty != INT:
                    raise TypeCheckError("array index must be int", st.line, st.col,
                                         found=idx_ty, expected=INT)
                target = vty.elem
            else:
                target = vty
            value_ty = self.type_expr(st.value)
            if not assignable(value_ty, target):
                raise TypeCheckError(f"cannot assign {value_ty} to {target}",
                                     st.line, st.col, found=value_ty, expected=target)
            st.target_ty = target
        elif isinstance(st, If):
            self.require_bool(st.cond)
            self.check_substmt(st.then)
            if st.els is not None:
                self.check_substmt(st.els)
        elif isinstance(st, While):
            self.require_bool(st.cond)
            self.check_substmt(st.body)
        elif isinstance(st, DoWhile):
            self.check_substmt(st.body)
            self.require_bool(st.cond)
        elif isinstance(st, For):
            self.scopes.append({})
            if st.init is not None:
                self.check_stmt(st.init)
            if st.cond is not None:
                self.require_bool(st.cond)
            if st.update is not None:
                self.check_stmt(st.update)
            self.check_substmt(st.body)
            self.scopes.pop()
        elif isinstance(st, Return):
            assert self.current is not None
            ret = self.current.return_type
            if st.value is None:
                if ret != VOID:
                    raise TypeCheckError(f"'{self.current.name}' must return {ret}",
                                         st.line, st.col, expected=ret)
            else:
                if ret == VOID:
                    raise TypeCheckError(f"void function '{self.current.name}' cannot return a value",
                                         st.line, st.col)
                vty = self.type_expr(st.value)
                if not assignable(vty, ret):
                    raise TypeCheckError(f"cannot return {vty} from {ret} function",
                                         st.line, st.col, found=vty, expected=ret)
        elif isinstance(st, Block):
            self.check_block(st)
        elif isinstance(st, ExprStmt):
            self.type_expr(st.expr)
        elif isinstance(st, Assert):
            self.require_bool(st.cond)
        else:  # pragma: no cover - parser produces no other statements
            raise TypeCheckError(f"unsupported statement {type(st).__name__}", st.line, st.col)

    def check_substmt(self, st: Stmt) -> None:
        """A branch/loop body gets its own scope even when not a block."""
        if isinstance(st, Block):
            self.check_block(st)
        else:
            self.scopes.append({})
            self.check_stmt(st)
            self.scopes.pop()

    def require_bool(self, e: Expr) -> None:
        ty = self.type_expr(e)
        if ty != BOOL:
            raise TypeCheckError("condition must be boolean", e.line, e.col,
                                 found=ty, expected=BOOL)

    # -- expressions -------------------------------------------------------

    def type_expr(self, e: Expr) -> SubjectType:
        ty = self._type_expr(e)
        e.ty = ty
        return ty

    def _type_expr(self, e: Expr) -> SubjectType:
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, DoubleLit):
            return DOUBLE
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, StringLit):
            return STRING
        if isinstance(e, CharLit):
            return CHAR
        if isinstance(e, VarRef):
            found = self.lookup_var(e.name)
            if found is None:
                raise ResolveError(e.name, e.line, e.col)
            ty, kind = found
            e.binding = kind
            return ty
        if isinstance(e, Unary):
            oty = self.type_expr(e.operand)
            if e.op == "-":
                if not oty.is_numeric:
                    raise TypeCheckError("unary - requires a numeric operand",
                                         e.line, e.col, found=oty)
                return oty
            if oty != BOOL:
                raise TypeCheckError("unary ! requires a boolean operand",
                                     e.line, e.col, found=oty, expected=BOOL)
            return BOOL
        if isinstance(e, Binary):
            lty = self.type_expr(e.left)
            rty = self.type_expr(e.right)
            return self._type_binary(e, lty, rty)
        if isinstance(e, Call):
            return self._type_call(e)
        if isinstance(e, MethodCall):
            return self._type_method(e)
        if isinstance(e, Index):
            bty = self.type_expr(e.base)
            if not bty.array:
                raise TypeCheckError("only arrays can be indexed", e.line, e.col, found=bty)
            ity = self.type_expr(e.index)
            if ity != INT:
                raise TypeCheckError("array index must be int", e.line, e.col,
                                     found=ity, expected=INT)
            return bty.elem
        if isinstance(e, ArrayLen):
            bty = self.type_expr(e.base)
            if not bty.array:
                raise TypeCheckError(".length requires an array (use .length() for strings)",
                                     e.line, e.col, found=bty)
            return INT
        if isinstance(e, NewArray):
            sty = self.type_expr(e.size)
            if sty != INT:
                raise TypeCheckError("array size must be int", e.line, e.col,
                                     found=sty, expected=INT)
            return SubjectType(e.elem_type.base, array=True)
        raise TypeCheckError(f"unsupported expression {type(e).__name__}", e.line, e.col)

    def _type_binary(self, e: Binary, lty: SubjectType, rty: SubjectType) -> SubjectType:
        op = e.op
        both_numeric = lty.is_numeric and rty.is_numeric
        if op in ("&&", "||"):
            if lty == BOOL and rty == BOOL:
                return BOOL
            raise TypeCheckError(f"{op} requires boolean operands", e.line, e.col)
        if op in ("==", "!="):
            ok = (
                both_numeric
                or (lty == rty and lty in (BOOL, CHAR, STRING))
            )
            if not ok:
                raise TypeCheckError(f"cannot compare {lty} with {rty}", e.line, e.col)
            return BOOL
        if op in ("<", "<=", ">", ">="):
            if both_numeric or (lty == CHAR and rty == CHAR):
                return BOOL
            raise TypeCheckError(f"cannot order {lty} and {rty}", e.line, e.col)
        if op == "%":
            if lty == INT and rty == INT:
                return INT
            raise TypeCheckError("% requires int operands", e.line, e.col)
        if op in ("+", "-", "*", "/"):
            if not both_numeric:
                raise TypeCheckError(f"{op} requires numeric operands", e.line, e.col)
            return DOUBLE if DOUBLE in (lty, rty) else INT
        raise TypeCheckError(f"unknown operator {op}", e.line, e.col)

    def _type_call(self, e: Call) -> SubjectType:
        arg_tys = [self.type_expr(a) for a in e.args]
        if e.name in FREE_FUNCTIONS:
            for sig in FREE_FUNCTIONS[e.name]:
                if len(sig.params) == len(arg_tys) and all(
                    assignable(a, p) for a, p in zip(arg_tys, sig.params)
                ):
                    return sig.ret
            raise TypeCheckError(
                f"no overload of {e.name} accepts ({', '.join(map(str, arg_tys))})",
                e.line, e.col)
        fn = self.functions.get(e.name)
        if fn is None:
            raise ResolveError(e.name, e.line, e.col, f"unknown function '{e.name}'")
        if len(fn.params) != len(arg_tys):
            raise TypeCheckError(
                f"'{e.name}' expects {len(fn.params)} argument(s), got {len(arg_tys)}",
                e.line, e.col)
        for a, p in zip(arg_tys, fn.params):
            if not assignable(a, p.ty):
                raise TypeCheckError(f"argument to '{e.name}': cannot pass {a} as {p.ty}",
                                     e.line, e.col, found=a, expected=p.ty)
        return fn.return_type

    def _type_method(self, e: MethodCall) -> SubjectType:
        rty = self.type_expr(e.receiver)
        if rty != STRING:
            raise TypeCheckError(f"no methods on {rty}", e.line, e.col, found=rty)
        sig = STRING_METHODS.get(e.name)
        if sig is None:
            raise ResolveError(e.name, e.line, e.col, f"unknown string method '{e.name}'")
        arg_tys = [self.type_expr(a) for a in e.args]
        if len(arg_tys) != len(sig.params) or not all(
            assignable(a, p) for a, p in zip(arg_tys, sig.params)
        ):
            raise TypeCheckError(
                f"String.{e.name} expects ({', '.join(map(str, sig.params))})",
                e.line, e.col)
        return sig.ret


def check_program(program: SubjectProgram) -> None:
    Checker(program).run()
