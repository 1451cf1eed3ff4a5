"""Runtime values and operator semantics shared by the interpreter and the
constant folder. Ints are 64-bit two's-complement wrapping; doubles follow
IEEE-754 binary64; chars compare by code point; string ==/!= compares
contents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ast import SubjectType

_I64 = 1 << 64
_I63 = 1 << 63


def wrap64(v: int) -> int:
    return ((v + _I63) & (_I64 - 1)) - _I63


@dataclass(frozen=True, order=True)
class Char:
    c: str  # exactly one character


@dataclass
class ValueArray:
    elem: SubjectType
    items: list = field(default_factory=list)


VOID_VALUE = object()

Value = object  # int | float | bool | str | Char | ValueArray | VOID_VALUE


class EvalFault(Exception):
    """Arithmetic or access fault, mapped to a runtime-error result."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(message or kind)
        self.kind = kind


def java_div(a: int, b: int) -> int:
    if b == 0:
        raise EvalFault("divide-by-zero", "integer division by zero")
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap64(q)


def java_mod(a: int, b: int) -> int:
    if b == 0:
        raise EvalFault("divide-by-zero", "integer modulo by zero")
    return wrap64(a - java_div(a, b) * b)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _num_pair(l, r):
    """Promote an int/double operand pair; returns (l, r, is_double)."""
    if isinstance(l, float) or isinstance(r, float):
        return float(l), float(r), True
    return l, r, False


def apply_binary(op: str, l, r):
    """Evaluate a binary operator on concrete values.

    Both operands must already be evaluated; && and || short-circuiting is
    the caller's job (this is only reached when both sides were needed).
    """
    if op in ("&&", "||"):
        if isinstance(l, bool) and isinstance(r, bool):
            return (l and r) if op == "&&" else (l or r)
        raise TypeError("boolean operands required")
    if op in ("==", "!="):
        if isinstance(l, Char) and isinstance(r, Char):
            eq = l.c == r.c
        elif isinstance(l, bool) and isinstance(r, bool):
            eq = l is r
        elif isinstance(l, str) and isinstance(r, str):
            eq = l == r
        else:
            a, b, _ = _num_pair(l, r)
            eq = a == b
        return eq if op == "==" else not eq
    if op in ("<", "<=", ">", ">="):
        if isinstance(l, Char) and isinstance(r, Char):
            a, b = l.c, r.c
        else:
            a, b, _ = _num_pair(l, r)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    if op == "%":
        if _is_int(l) and _is_int(r):
            return java_mod(l, r)
        raise TypeError("modulo requires int operands")
    if op in ("+", "-", "*", "/"):
        a, b, is_double = _num_pair(l, r)
        if is_double:
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            try:
                return a / b
            except ZeroDivisionError:
                # IEEE-754: x/0.0 is +-inf, 0.0/0.0 is NaN.
                if a == 0.0 or math.isnan(a):
                    return math.nan
                neg = (a < 0) != (math.copysign(1.0, b) < 0)
                return -math.inf if neg else math.inf
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        return java_div(a, b)
    raise TypeError(f"unknown operator {op}")


def apply_unary(op: str, v):
    if op == "-":
        if isinstance(v, float):
            return -v
        if _is_int(v):
            return wrap64(-v)
        raise TypeError("numeric operand required")
    if op == "!":
        if isinstance(v, bool):
            return not v
        raise TypeError("boolean operand required")
    raise TypeError(f"unknown operator {op}")


def values_equal(a, b) -> bool:
    """Deep value equality for result comparison (NaN equals NaN here)."""
    if isinstance(a, ValueArray) and isinstance(b, ValueArray):
        return a.elem == b.elem and len(a.items) == len(b.items) and all(
            values_equal(x, y) for x, y in zip(a.items, b.items)
        )
    if isinstance(a, float) and isinstance(b, float):
        if math.isnan(a) and math.isnan(b):
            return True
        return a == b
    if type(a) is not type(b):
        return False
    return a == b
