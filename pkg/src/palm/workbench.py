"""Shared glue: source-to-tree setup, backend construction, and the
differential checker used by both the CLI and the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ast import SubjectProgram, SubjectType
from .driver import (
    BruteForceBackend,
    DomainConfig,
    EndpointConfig,
    GeneratorBackend,
    LlmHttpBackend,
    ScriptedBackend,
)
from .extraction import ExtractionConfig, ExtractionResult, PathVariant, extract
from .interp import TestCase, run_program, run_variant
from .ops import Char, ValueArray, values_equal
from .parser import parse
from .tree import SymTree, build_tree, locate_path


def make_config(
    program: SubjectProgram,
    entry: str | None = None,
    loop_bound: int = 2,
    recursion_bound: int = 2,
    max_paths: int = 50,
    symbolic: tuple[str, ...] = (),
) -> ExtractionConfig:
    if entry is None:
        if not program.functions:
            raise ValueError("program declares no functions")
        entry = program.functions[0].name
    return ExtractionConfig(
        loop_bound=loop_bound,
        recursion_bound=recursion_bound,
        max_paths=max_paths,
        entry_function=entry,
        symbolic_functions=frozenset(symbolic),
    )


@dataclass
class Workspace:
    """A parsed program with its extracted variants and symbolic tree."""

    program: SubjectProgram
    cfg: ExtractionConfig
    extraction: ExtractionResult
    tree: SymTree
    variants_by_id: dict[str, PathVariant] = field(default_factory=dict)

    @classmethod
    def create(cls, program: SubjectProgram, cfg: ExtractionConfig) -> "Workspace":
        result = extract(program, cfg)
        tree = build_tree(result.variants, set(cfg.symbolic_set()))
        return cls(program, cfg, result, tree, result.by_id())

    @classmethod
    def from_source(cls, source: str, cfg_kwargs: dict | None = None) -> "Workspace":
        program = parse(source)
        cfg = make_config(program, **(cfg_kwargs or {}))
        return cls.create(program, cfg)

    @property
    def variants(self) -> list[PathVariant]:
        return self.extraction.variants

    def feasible_variants(self) -> list[PathVariant]:
        return [v for v in self.variants if not v.pruned_infeasible and not v.bound_exceeded]


def make_backend(
    name: str,
    workspace: Workspace,
    domains: DomainConfig | None = None,
    script: list[str] | dict[str, list[str]] | None = None,
    endpoint: EndpointConfig | None = None,
) -> GeneratorBackend:
    if name == "brute-force":
        return BruteForceBackend(workspace.program, workspace.variants_by_id, domains)
    if name == "scripted":
        return ScriptedBackend(script or [])
    if name == "llm-http":
        if endpoint is None:
            raise ValueError("llm-http backend needs an endpoint configuration")
        return LlmHttpBackend(endpoint)
    raise ValueError(f"unknown backend {name!r}")


# -- random in-bounds inputs and the differential checker -------------------------


def _random_scalar(rng: random.Random, ty: SubjectType, domains: DomainConfig):
    if ty.base == "int":
        return rng.randint(-domains.int_bound, domains.int_bound)
    if ty.base == "double":
        return rng.choice(domains.doubles)
    if ty.base == "boolean":
        return rng.choice((False, True))
    if ty.base == "char":
        return Char(rng.choice(domains.chars))
    if ty.base == "string":
        length = rng.randint(0, domains.string_max_len)
        return "".join(rng.choice(domains.string_alphabet) for _ in range(length))
    raise ValueError(f"cannot sample {ty}")


def random_test(
    rng: random.Random,
    program: SubjectProgram,
    entry: str,
    domains: DomainConfig,
) -> TestCase:
    fn = program.function(entry)
    args = []
    for p in fn.params:
        if p.ty.array:
            length = rng.randint(0, domains.array_max_len)
            args.append(ValueArray(p.ty.elem,
                                   [_random_scalar(rng, p.ty.elem, domains) for _ in range(length)]))
        else:
            args.append(_random_scalar(rng, p.ty, domains))
    return TestCase(entry, args)


def sample_in_bounds(
    rng: random.Random,
    workspace: Workspace,
    domains: DomainConfig,
    count: int,
    max_attempts_factor: int = 400,
) -> list[TestCase]:
    """Random inputs whose execution stays within the loop/recursion bounds."""
    cfg = workspace.cfg
    found: list[TestCase] = []
    attempts = 0
    limit = count * max_attempts_factor
    while len(found) < count and attempts < limit:
        attempts += 1
        test = random_test(rng, workspace.program, cfg.entry_function, domains)
        result = run_program(workspace.program, test,
                             symbolic_functions=set(cfg.symbolic_set()))
        if not result.returned:
            continue
        if not result.bounds.within(cfg.loop_bound, cfg.recursion_bound, cfg.entry_function):
            continue
        found.append(test)
    return found


@dataclass
class DifferentialMismatch:
    test: str
    issue: str


def differential_check(
    workspace: Workspace,
    samples: int,
    seed: int = 0,
    domains: DomainConfig | None = None,
) -> tuple[int, list[DifferentialMismatch]]:
    """For random in-bounds inputs: exactly one non-truncated variant accepts,
    its return value matches the original, and locate agrees.

    Returns (checked count, mismatches).
    """
    domains = domains or DomainConfig()
    rng = random.Random(seed)
    tests = sample_in_bounds(rng, workspace, domains, samples)
    mismatches: list[DifferentialMismatch] = []
    candidates = [v for v in workspace.variants if not v.bound_exceeded]
    for test in tests:
        text = test.render()
        original = run_program(workspace.program, test,
                               symbolic_functions=set(workspace.cfg.symbolic_set()))
        accepting = []
        for v in candidates:
            res = run_variant(v, workspace.program, test)
            if res.returned:
                accepting.append((v, res))
        if len(accepting) != 1:
            ids = [v.id for v, _ in accepting]
            mismatches.append(DifferentialMismatch(text, f"{len(accepting)} accepting variants {ids}"))
            continue
        variant, res = accepting[0]
        if not values_equal(res.value, original.value):
            mismatches.append(DifferentialMismatch(
                text, f"variant {variant.id} returned {res.value!r}, original {original.value!r}"))
            continue
        located = locate_path(workspace.tree, workspace.program, test)
        if located.path_id != variant.id:
            mismatches.append(DifferentialMismatch(
                text, f"locate gave {located.path_id!r}, accepting variant is {variant.id}"))
    return len(tests), mismatches
