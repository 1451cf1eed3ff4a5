"""Path-aware test generation workbench.

Statically enumerates execution paths of PALM-J programs, emits executable
path variants with embedded branch assertions, drives per-path test
generation through pluggable backends, validates tests by running the
variants, and reports path/branch/line coverage.
"""

from .ast import SubjectProgram, SubjectType, ast_equal
from .builtins import list_builtins
from .check import ResolveError, TypeCheckError
from .coverage import CoverageReport, measure
from .driver import (
    BackendUnavailable,
    BruteForceBackend,
    DomainConfig,
    DomainTooLarge,
    EndpointConfig,
    GeneratorBackend,
    LlmHttpBackend,
    RunState,
    ScriptedBackend,
    TrialRecord,
    brute_force_search,
    build_prompt,
    generate_all,
    verify_test,
)
from .extraction import (
    CalleeNotFound,
    ExtractionConfig,
    PathVariant,
    enumerate_paths,
    extract,
    fold_constants,
    inline_symbolic_calls,
    rename_variables,
    render_variant,
    serialize_variant,
)
from .interp import ExecResult, TestCase, parse_test_literal, run_program, run_variant
from .parser import ParseError, parse
from .printer import pretty_print
from .tree import (
    DuplicatePath,
    SymTree,
    UnknownPath,
    build_tree,
    locate_path,
    mark_status,
    serialize_tree,
    to_dot,
)
from .workbench import Workspace, differential_check, make_backend, make_config

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailable",
    "BruteForceBackend",
    "CalleeNotFound",
    "CoverageReport",
    "DomainConfig",
    "DomainTooLarge",
    "DuplicatePath",
    "EndpointConfig",
    "ExecResult",
    "ExtractionConfig",
    "GeneratorBackend",
    "LlmHttpBackend",
    "ParseError",
    "PathVariant",
    "ResolveError",
    "RunState",
    "ScriptedBackend",
    "SubjectProgram",
    "SubjectType",
    "SymTree",
    "TestCase",
    "TrialRecord",
    "TypeCheckError",
    "UnknownPath",
    "Workspace",
    "ast_equal",
    "brute_force_search",
    "build_prompt",
    "build_tree",
    "differential_check",
    "enumerate_paths",
    "extract",
    "fold_constants",
    "generate_all",
    "inline_symbolic_calls",
    "list_builtins",
    "locate_path",
    "make_backend",
    "make_config",
    "mark_status",
    "measure",
    "parse",
    "parse_test_literal",
    "pretty_print",
    "rename_variables",
    "render_variant",
    "run_program",
    "run_variant",
    "serialize_tree",
    "serialize_variant",
    "to_dot",
    "verify_test",
]
