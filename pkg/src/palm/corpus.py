"""Built-in example programs.

Each entry carries the source, the intended entry function, and the finite
input domains its brute-force oracle searches (tuned so the candidate
product stays within budget).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .ast import SubjectProgram
from .driver import DomainConfig
from .parser import parse


@dataclass(frozen=True)
class CorpusProgram:
    name: str
    description: str
    source: str
    entry: str
    domains: DomainConfig = DomainConfig()

    def parse(self) -> SubjectProgram:
        return parse(self.source)


TUTORIAL = CorpusProgram(
    name="tutorial",
    description="Two dependent branches; the assignment between them flips the sign of z.",
    entry="tutorial",
    source="""\
int tutorial(int x, int y, int z) {
    if (x > 0) {
        z = -z - 5;
    }
    if (y + z > 0) {
        return 1;
    }
    return 0;
}
""",
)

PALINDROME = CorpusProgram(
    name="palindrome",
    description="Palindrome check: a loop with an inner mismatch branch.",
    entry="is_palindrome",
    source="""\
boolean is_palindrome(String text) {
    int len = text.length();
    int i = 0;
    while (i < len) {
        if (text.charAt(i) != text.charAt(len - i - 1)) {
            return false;
        }
        i = i + 1;
    }
    return true;
}
""",
)

ARG_PARSE = CorpusProgram(
    name="arg-parse",
    description="Extracts the value following a -f flag; accepts flag-like values as paths.",
    entry="parse_file_path",
    source="""\
String parse_file_path(String[] args) {
    int i = 0;
    while (i < args.length) {
        if (args[i].equalsIgnoreCase("-f")) {
            if (i + 1 < args.length) {
                return args[i + 1];
            }
            return "";
        }
        i = i + 1;
    }
    return "";
}
""",
    # Arrays of length-4 strings blow the candidate budget; length 2 is
    # enough to spell "-f" and a filler value.
    domains=replace(DomainConfig(), string_max_len=2),
)

ANY_INT = CorpusProgram(
    name="any-int",
    description="True when three doubles are integers and one equals the sum of the others.",
    entry="any_int",
    source="""\
boolean any_int(double x, double y, double z) {
    if (x == floor(x)) {
        if (y == floor(y)) {
            if (z == floor(z)) {
                if (x + y == z) {
                    return true;
                }
                if (x + z == y) {
                    return true;
                }
                if (y + z == x) {
                    return true;
                }
                return false;
            }
        }
    }
    return false;
}
""",
)

COUNT_WORDS = CorpusProgram(
    name="count-words",
    description="Counts nonempty space-separated parts; split() shapes the loop.",
    entry="count_words",
    source="""\
int count_words(String txt) {
    String[] parts = txt.split(" ");
    int n = 0;
    int i = 0;
    while (i < parts.length) {
        if (parts[i].length() > 0) {
            n = n + 1;
        }
        i = i + 1;
    }
    return n;
}
""",
)

INFEASIBLE_BRANCH = CorpusProgram(
    name="infeasible-branch",
    description="A branch on constants: one side is statically unreachable.",
    entry="infeasible_branch",
    source="""\
int infeasible_branch(int a) {
    int x = 1;
    int y = 0;
    if (x < y) {
        return a;
    }
    return 0;
}
""",
)

ALL_PROGRAMS: tuple[CorpusProgram, ...] = (
    TUTORIAL,
    PALINDROME,
    ARG_PARSE,
    ANY_INT,
    COUNT_WORDS,
    INFEASIBLE_BRANCH,
)


def get(name: str) -> CorpusProgram:
    for p in ALL_PROGRAMS:
        if p.name == name:
            return p
    raise KeyError(f"no corpus program named {name!r}")


def names() -> list[str]:
    return [p.name for p in ALL_PROGRAMS]
