"""Builtin functions of PALM-J.

String methods mirror their Java counterparts; free functions cover
abs/min/max/floor for int and double. Builtin bodies are opaque: they are
executed natively, never path-enumerated, and never included in prompts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .ast import BOOL, CHAR, DOUBLE, INT, STRING, SubjectType
from .ops import Char, EvalFault, ValueArray, wrap64

STRING_ARRAY = SubjectType("string", array=True)


@dataclass(frozen=True)
class MethodSig:
    name: str
    params: tuple[SubjectType, ...]
    ret: SubjectType
    impl: Callable


def _length(s: str) -> int:
    return len(s)


def _char_at(s: str, i: int) -> Char:
    if i < 0 or i >= len(s):
        raise EvalFault("index-out-of-bounds", f"charAt({i}) on string of length {len(s)}")
    return Char(s[i])


def _equals(s: str, t: str) -> bool:
    return s == t


def _equals_ignore_case(s: str, t: str) -> bool:
    return s.lower() == t.lower()


def _substring(s: str, begin: int, end: int) -> str:
    if begin < 0 or end > len(s) or begin > end:
        raise EvalFault("negative-substring", f"substring({begin}, {end}) on string of length {len(s)}")
    return s[begin:end]


def _index_of(s: str, t: str) -> int:
    return s.find(t)


def _split(s: str, sep: str) -> ValueArray:
    # Java-like: the separator is a literal; trailing empty strings are
    # removed; a string with no separator occurrence yields itself, even "".
    if sep == "":
        parts = list(s)
    elif sep not in s:
        parts = [s]
    else:
        parts = s.split(sep)
    while parts and parts[-1] == "":
        parts.pop()
    if not parts and not s:
        parts = [""]
    return ValueArray(STRING, parts)


def _trim(s: str) -> str:
    return s.strip()


def _to_lower(s: str) -> str:
    return s.lower()


STRING_METHODS: dict[str, MethodSig] = {
    m.name: m
    for m in (
        MethodSig("length", (), INT, _length),
        MethodSig("charAt", (INT,), CHAR, _char_at),
        MethodSig("equals", (STRING,), BOOL, _equals),
        MethodSig("equalsIgnoreCase", (STRING,), BOOL, _equals_ignore_case),
        MethodSig("substring", (INT, INT), STRING, _substring),
        MethodSig("indexOf", (STRING,), INT, _index_of),
        MethodSig("split", (STRING,), STRING_ARRAY, _split),
        MethodSig("trim", (), STRING, _trim),
        MethodSig("toLowerCase", (), STRING, _to_lower),
    )
}


@dataclass(frozen=True)
class FuncSig:
    name: str
    params: tuple[SubjectType, ...]
    ret: SubjectType
    impl: Callable


def _iabs(a: int) -> int:
    return wrap64(abs(a))


def _ifloor(a: int) -> int:
    return a


def _dfloor(a: float) -> float:
    import math

    if math.isinf(a) or math.isnan(a):
        return a
    return float(math.floor(a))


FREE_FUNCTIONS: dict[str, tuple[FuncSig, ...]] = {
    "abs": (
        FuncSig("abs", (INT,), INT, _iabs),
        FuncSig("abs", (DOUBLE,), DOUBLE, abs),
    ),
    "min": (
        FuncSig("min", (INT, INT), INT, min),
        FuncSig("min", (DOUBLE, DOUBLE), DOUBLE, min),
    ),
    "max": (
        FuncSig("max", (INT, INT), INT, max),
        FuncSig("max", (DOUBLE, DOUBLE), DOUBLE, max),
    ),
    "floor": (
        FuncSig("floor", (INT,), INT, _ifloor),
        FuncSig("floor", (DOUBLE,), DOUBLE, _dfloor),
    ),
}

FREE_FUNCTION_NAMES = frozenset(FREE_FUNCTIONS)


def list_builtins() -> list[str]:
    """Human-readable builtin signatures, for the CLI and prompt docs."""
    sigs = []
    for m in STRING_METHODS.values():
        params = ", ".join(str(p) for p in m.params)
        sigs.append(f"String.{m.name}({params}) -> {m.ret}")
    for overloads in FREE_FUNCTIONS.values():
        for f in overloads:
            params = ", ".join(str(p) for p in f.params)
            sigs.append(f"{f.name}({params}) -> {f.ret}")
    sigs.append("T[].length -> int")
    return sigs
