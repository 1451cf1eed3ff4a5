"""Lexer and recursive-descent parser for PALM-J.

Grammar (whitespace and ``//`` / ``/* */`` comments are skipped):

    program   := (fieldDecl | funcDecl)*
    fieldDecl := type IDENT ("=" expr)? ";"
    funcDecl  := (type | "void") IDENT "(" params? ")" block
    stmt      := varDecl | assign ";" | "if" "(" expr ")" stmt ("else" stmt)?
               | "while" "(" expr ")" stmt | "do" stmt "while" "(" expr ")" ";"
               | "for" "(" simple? ";" expr? ";" simple? ")" stmt
               | "return" expr? ";" | block | expr ";"
    type      := ("int"|"double"|"boolean"|"char"|"String") ("[" "]")?

Literals: decimal ints, doubles written with a ".", double-quoted strings
with ``\\n \\t \\\\ \\" \\' \\0`` escapes, single-quoted chars, true/false.

``parse`` returns a resolved and type-checked program; see ``palm.check``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from .ast import (
    BOOL,
    CHAR,
    DOUBLE,
    INT,
    STRING,
    VOID,
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
    Param,
    Return,
    Stmt,
    StringLit,
    SubjectProgram,
    SubjectType,
    Unary,
    VarRef,
    While,
    ArrayLen,
)
from .ops import wrap64


class SourceError(Exception):
    """Base for parse/resolve/type errors, with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ParseError(SourceError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        if expected:
            message = f"{message} (expected {', '.join(expected)})"
        super().__init__(message, line, col)
        self.expected = expected


KEYWORDS = {
    "int", "double", "boolean", "char", "String", "void",
    "if", "else", "while", "do", "for", "return", "true", "false", "new",
}

TYPE_KEYWORDS = {"int": INT, "double": DOUBLE, "boolean": BOOL, "char": CHAR, "String": STRING}

PUNCT2 = ("<=", ">=", "==", "!=", "&&", "||")
PUNCT1 = "+-*/%<>=!(){}[];,."

ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "'": "'", "0": "\0"}
UNESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "\0": "\\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "double" | "string" | "char" | "kw" | "punct" | "eof"
    value: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg: str):
        raise ParseError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                err("unterminated block comment")
            skipped = source[i : end + 2]
            line += skipped.count("\n")
            col = len(skipped) - skipped.rfind("\n") if "\n" in skipped else col + len(skipped)
            i = end + 2
            continue
        start_line, start_col = line, col
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
                toks.append(Token("double", source[i:j], start_line, start_col))
            else:
                toks.append(Token("int", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "ident", word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n or source[j] == "\n":
                    err("unterminated string literal")
                ch = source[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\\":
                    if j + 1 >= n or source[j + 1] not in ESCAPES:
                        err("invalid escape in string literal")
                    buf.append(ESCAPES[source[j + 1]])
                    j += 2
                else:
                    buf.append(ch)
                    j += 1
            toks.append(Token("string", "".join(buf), start_line, start_col))
            col += j - i
            i = j
            continue
        if c == "'":
            j = i + 1
            if j >= n:
                err("unterminated char literal")
            if source[j] == "\\":
                if j + 1 >= n or source[j + 1] not in ESCAPES:
                    err("invalid escape in char literal")
                ch = ESCAPES[source[j + 1]]
                j += 2
            else:
                ch = source[j]
                if ch in ("\n", "'"):
                    err("empty or unterminated char literal")
                j += 1
            if j >= n or source[j] != "'":
                err("char literal must contain exactly one character")
            j += 1
            toks.append(Token("char", ch, start_line, start_col))
            col += j - i
            i = j
            continue
        if source[i : i + 2] in PUNCT2:
            toks.append(Token("punct", source[i : i + 2], start_line, start_col))
            i += 2
            col += 2
            continue
        if c in PUNCT1:
            toks.append(Token("punct", c, start_line, start_col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {c!r}")
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.pos = 0
        self.source = source
        self._ids = count(0)

    # -- token helpers -------------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (value is None or t.value == value)

    def at_punct(self, value: str) -> bool:
        return self.at("punct", value)

    def advance(self) -> Token:
        t = self.cur
        self.pos += 1
        return t

    def expect(self, kind: str, value: str | None = None) -> Token:
        if not self.at(kind, value):
            want = value if value is not None else kind
            raise ParseError(f"unexpected {self._describe(self.cur)}", self.cur.line, self.cur.col, (want,))
        return self.advance()

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else f"{t.kind} {t.value!r}"

    def _mk(self, cls, tok: Token, **kw):
        return cls(**kw, nid=next(self._ids), line=tok.line, col=tok.col)

    # -- declarations --------------------------------------------------------

    def parse_program(self) -> SubjectProgram:
        fields: list[FieldDecl] = []
        functions: list[FunctionDecl] = []
        first = self.cur
        while not self.at("eof"):
            start = self.cur
            if self.at("kw", "void"):
                functions.append(self.parse_function(start))
                continue
            if not (start.kind == "kw" and start.value in TYPE_KEYWORDS):
                raise ParseError(
                    f"unexpected {self._describe(start)}", start.line, start.col,
                    ("type", "void"),
                )
            # Distinguish field from function by the token after the name.
            save = self.pos
            self.parse_type()
            self.expect("ident")
            is_func = self.at_punct("(")
            self.pos = save
            if is_func:
                functions.append(self.parse_function(start))
            else:
                fields.append(self.parse_field(start))
        return SubjectProgram(
            fields=fields, functions=functions, source_text=self.source,
            nid=next(self._ids), line=first.line, col=first.col,
        )

    def parse_type(self) -> SubjectType:
        t = self.cur
        if not (t.kind == "kw" and t.value in TYPE_KEYWORDS):
            raise ParseError(f"unexpected {self._describe(t)}", t.line, t.col, ("type",))
        self.advance()
        base = TYPE_KEYWORDS[t.value]
        if self.at_punct("["):
            self.advance()
            self.expect("punct", "]")
            return SubjectType(base.base, array=True)
        return base

    def parse_field(self, start: Token) -> FieldDecl:
        ftype = self.parse_type()
        name = self.expect("ident").value
        init = None
        if self.at_punct("="):
            self.advance()
            init = self.parse_expr()
        self.expect("punct", ";")
        return self._mk(FieldDecl, start, ftype=ftype, name=name, init=init)

    def parse_function(self, start: Token) -> FunctionDecl:
        if self.at("kw", "void"):
            self.advance()
            ret = VOID
        else:
            ret = self.parse_type()
        name = self.expect("ident").value
        self.expect("punct", "(")
        params: list[Param] = []
        if not self.at_punct(")"):
            while True:
                ptok = self.cur
                pty = self.parse_type()
                pname = self.expect("ident").value
                params.append(self._mk(Param, ptok, name=pname, ty=pty))
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect("punct", ")")
        body = self.parse_block()
        return self._mk(FunctionDecl, start, name=name, params=params, return_type=ret, body=body)

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> Block:
        start = self.expect("punct", "{")
        stmts: list[Stmt] = []
        while not self.at_punct("}"):
            if self.at("eof"):
                raise ParseError("unterminated block", self.cur.line, self.cur.col, ("}",))
            stmts.append(self.parse_stmt())
        self.expect("punct", "}")
        return self._mk(Block, start, stmts=stmts)

    def parse_stmt(self) -> Stmt:
        t = self.cur
        if t.kind == "kw" and t.value in TYPE_KEYWORDS:
            st = self.parse_var_decl()
            self.expect("punct", ";")
            return st
        if self.at("kw", "if"):
            self.advance()
            self.expect("punct", "(")
            cond = self.parse_expr()
            self.expect("punct", ")")
            then = self.parse_stmt()
            els = None
            if self.at("kw", "else"):
                self.advance()
                els = self.parse_stmt()
            return self._mk(If, t, cond=cond, then=then, els=els)
        if self.at("kw", "while"):
            self.advance()
            self.expect("punct", "(")
            cond = self.parse_expr()
            self.expect("punct", ")")
            body = self.parse_stmt()
            return self._mk(While, t, cond=cond, body=body)
        if self.at("kw", "do"):
            self.advance()
            body = self.parse_stmt()
            self.expect("kw", "while")
            self.expect("punct", "(")
            cond = self.parse_expr()
            self.expect("punct", ")")
            self.expect("punct", ";")
            return self._mk(DoWhile, t, body=body, cond=cond)
        if self.at("kw", "for"):
            self.advance()
            self.expect("punct", "(")
            init = None if self.at_punct(";") else self.parse_simple()
            self.expect("punct", ";")
            cond = None if self.at_punct(";") else self.parse_expr()
            self.expect("punct", ";")
            update = None if self.at_punct(")") else self.parse_simple()
            self.expect("punct", ")")
            body = self.parse_stmt()
            return self._mk(For, t, init=init, cond=cond, update=update, body=body)
        if self.at("kw", "return"):
            self.advance()
            value = None if self.at_punct(";") else self.parse_expr()
            self.expect("punct", ";")
            return self._mk(Return, t, value=value)
        if self.at_punct("{"):
            return self.parse_block()
        st = self.parse_simple()
        self.expect("punct", ";")
        return st

    def parse_var_decl(self) -> Decl:
        start = self.cur
        dtype = self.parse_type()
        name = self.expect("ident").value
        init = None
        if self.at_punct("="):
            self.advance()
            init = self.parse_expr()
        return self._mk(Decl, start, decl_type=dtype, name=name, init=init)

    def parse_simple(self) -> Stmt:
        """Declaration, assignment, or expression, without the semicolon."""
        t = self.cur
        if t.kind == "kw" and t.value in TYPE_KEYWORDS:
            return self.parse_var_decl()
        expr = self.parse_expr()
        if self.at_punct("="):
            self.advance()
            value = self.parse_expr()
            if isinstance(expr, VarRef):
                return self._mk(Assign, t, name=expr.name, index=None, value=value)
            if isinstance(expr, Index) and isinstance(expr.base, VarRef):
                return self._mk(Assign, t, name=expr.base.name, index=expr.index, value=value)
            raise ParseError("invalid assignment target", t.line, t.col)
        return self._mk(ExprStmt, t, expr=expr)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def _binary_chain(self, sub, ops: tuple[str, ...]) -> Expr:
        left = sub()
        while self.cur.kind == "punct" and self.cur.value in ops:
            op = self.advance()
            right = sub()
            left = self._mk(Binary, op, op=op.value, left=left, right=right)
        return left

    def parse_or(self) -> Expr:
        return self._binary_chain(self.parse_and, ("||",))

    def parse_and(self) -> Expr:
        return self._binary_chain(self.parse_equality, ("&&",))

    def parse_equality(self) -> Expr:
        return self._binary_chain(self.parse_relational, ("==", "!="))

    def parse_relational(self) -> Expr:
        return self._binary_chain(self.parse_additive, ("<", "<=", ">", ">="))

    def parse_additive(self) -> Expr:
        return self._binary_chain(self.parse_multiplicative, ("+", "-"))

    def parse_multiplicative(self) -> Expr:
        return self._binary_chain(self.parse_unary, ("*", "/", "%"))

    def parse_unary(self) -> Expr:
        t = self.cur
        if self.at_punct("-") or self.at_punct("!"):
            self.advance()
            operand = self.parse_unary()
            return self._mk(Unary, t, op=t.value, operand=operand)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            if self.at_punct("."):
                dot = self.advance()
                name = self.expect("ident").value
                if self.at_punct("("):
                    args = self.parse_args()
                    e = self._mk(MethodCall, dot, receiver=e, name=name, args=args)
                elif name == "length":
                    e = self._mk(ArrayLen, dot, base=e)
                else:
                    raise ParseError(f"unknown property .{name}", dot.line, dot.col, ("length", "("))
                continue
            if self.at_punct("["):
                br = self.advance()
                idx = self.parse_expr()
                self.expect("punct", "]")
                e = self._mk(Index, br, base=e, index=idx)
                continue
            return e

    def parse_args(self) -> list[Expr]:
        self.expect("punct", "(")
        args: list[Expr] = []
        if not self.at_punct(")"):
            while True:
                args.append(self.parse_expr())
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect("punct", ")")
        return args

    def parse_primary(self) -> Expr:
        t = self.cur
        if t.kind == "int":
            self.advance()
            return self._mk(IntLit, t, value=wrap64(int(t.value)))
        if t.kind == "double":
            self.advance()
            return self._mk(DoubleLit, t, value=float(t.value))
        if t.kind == "string":
            self.advance()
            return self._mk(StringLit, t, value=t.value)
        if t.kind == "char":
            self.advance()
            return self._mk(CharLit, t, value=t.value)
        if self.at("kw", "true") or self.at("kw", "false"):
            self.advance()
            return self._mk(BoolLit, t, value=t.value == "true")
        if self.at("kw", "new"):
            self.advance()
            base = self.cur
            if not (base.kind == "kw" and base.value in TYPE_KEYWORDS):
                raise ParseError(f"unexpected {self._describe(base)}", base.line, base.col,
                                 ("element type",))
            self.advance()
            ety = TYPE_KEYWORDS[base.value]
            self.expect("punct", "[")
            size = self.parse_expr()
            self.expect("punct", "]")
            return self._mk(NewArray, t, elem_type=ety, size=size)
        if t.kind == "ident":
            self.advance()
            if self.at_punct("("):
                self.pos -= 1
                self.advance()
                args = self.parse_args()
                return self._mk(Call, t, name=t.value, args=args)
            return self._mk(VarRef, t, name=t.value)
        if self.at_punct("("):
            self.advance()
            e = self.parse_expr()
            self.expect("punct", ")")
            return e
        raise ParseError(f"unexpected {self._describe(t)}", t.line, t.col, ("expression",))


def renumber_nodes(program: SubjectProgram) -> None:
    """Assign node ids 0..N in canonical order (fields, then functions).

    Ids then depend only on program structure, so structurally equal
    programs (e.g. a pretty-print round trip) carry identical ids.
    """
    from .ast import walk_exprs

    counter = count(0)

    def visit_expr(e):
        for sub in walk_exprs(e):
            sub.nid = next(counter)

    def visit_stmt(st):
        from .ast import (
            Assign as A, Block as B, Decl as D, DoWhile as DW, ExprStmt as E,
            For as F, If as I, Return as R, While as W,
        )

        st.nid = next(counter)
        if isinstance(st, D):
            if st.init is not None:
                visit_expr(st.init)
        elif isinstance(st, A):
            if st.index is not None:
                visit_expr(st.index)
            visit_expr(st.value)
        elif isinstance(st, I):
            visit_expr(st.cond)
            visit_stmt(st.then)
            if st.els is not None:
                visit_stmt(st.els)
        elif isinstance(st, W):
            visit_expr(st.cond)
            visit_stmt(st.body)
        elif isinstance(st, DW):
            visit_stmt(st.body)
            visit_expr(st.cond)
        elif isinstance(st, F):
            if st.init is not None:
                visit_stmt(st.init)
            if st.cond is not None:
                visit_expr(st.cond)
            if st.update is not None:
                visit_stmt(st.update)
            visit_stmt(st.body)
        elif isinstance(st, R):
            if st.value is not None:
                visit_expr(st.value)
        elif isinstance(st, E):
            visit_expr(st.expr)
        elif isinstance(st, B):
            for s in st.stmts:
                visit_stmt(s)

    for fd in program.fields:
        fd.nid = next(counter)
        if fd.init is not None:
            visit_expr(fd.init)
    for fn in program.functions:
        fn.nid = next(counter)
        for p in fn.params:
            p.nid = next(counter)
        visit_stmt(fn.body)
    program.nid = next(counter)


def parse(source: str) -> SubjectProgram:
    """Parse, resolve, and type-check a PALM-J program."""
    from .check import check_program

    program = Parser(source).parse_program()
    renumber_nodes(program)
    check_program(program)
    return program
