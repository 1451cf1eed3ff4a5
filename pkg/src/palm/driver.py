"""Per-path test generation: prompts, pluggable backends, validation loop.

The driver walks the tree's leaves in enumeration order, asks a backend for
a concrete test per path, validates the test by running the path variant,
feeds the first violated assertion back on failure, and retries up to the
trial limit before moving on. Backends: an OpenAI-style chat endpoint, an
exhaustive brute-force oracle over finite input domains, and a scripted
replayer for deterministic runs.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass, field, asdict
from itertools import product
from typing import Callable, Iterator

import httpx

from .ast import SubjectProgram, SubjectType
from .extraction import ExtractionConfig, PathVariant, serialize_variant, render_variant
from .interp import TestCase, parse_test_literal, run_variant, zero_value, render_value
from .ops import Char, ValueArray
from .parser import ParseError
from .printer import render_fields_source, render_function_source
from .tree import SymTree, UnknownPath, mark_status


class BackendUnavailable(Exception):
    pass


class DomainTooLarge(Exception):
    pass


@dataclass
class GenRequest:
    prompt_text: str
    variant: dict  # serialized path variant
    previous_trials: list[tuple[str, str]]  # (test text, feedback)
    trial_index: int


@dataclass
class GenResponse:
    test_text: str | None = None
    raw_reply: str = ""
    exhausted: bool = False  # oracle proved no test exists in its domains


class GeneratorBackend:
    """A source of candidate tests; interchangeable from the driver's view."""

    name = "backend"
    retryable = True  # False: one meaningful attempt per path (exhaustive search)

    def generate(self, request: GenRequest) -> GenResponse:
        raise NotImplementedError


@dataclass
class TrialRecord:
    path_id: str
    trial_index: int
    prompt_text: str
    test_text: str | None
    verdict: str  # "covered" | "diverged" | "parseError" | "runtimeError"
    assert_text: str | None = None
    message: str | None = None
    user_authored: bool = False
    timestamp: float = field(default_factory=time.time)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Verdict:
    kind: str  # "covered" | "diverged" | "parseError" | "runtimeError"
    assert_text: str | None = None
    assert_step: int | None = None
    message: str | None = None

    @property
    def covered(self) -> bool:
        return self.kind == "covered"

    def feedback(self) -> str:
        if self.kind == "diverged":
            return self.assert_text or ""
        return self.message or self.kind


@dataclass
class RunState:
    status: str = "running"  # "idle" | "running" | "done" | "cancelled"
    run_id: str = ""
    backend: str = ""
    trial_limit: int = 5
    trials: dict[str, list[TrialRecord]] = field(default_factory=dict)
    covered: list[str] = field(default_factory=list)
    error: str | None = None

    def record(self, rec: TrialRecord) -> None:
        self.trials.setdefault(rec.path_id, []).append(rec)

    def snapshot(self) -> dict:
        return {
            "runId": self.run_id,
            "status": self.status,
            "backend": self.backend,
            "trialLimit": self.trial_limit,
            "trials": {pid: [r.to_json() for r in recs] for pid, recs in self.trials.items()},
            "covered": list(self.covered),
            "error": self.error,
        }


# -- prompt construction -----------------------------------------------------


def default_prompt_template() -> str:
    from importlib import resources

    return resources.files("palm").joinpath("prompt_template.txt").read_text()


def _example_call(variant: PathVariant) -> str:
    args = []
    for p in variant.params:
        args.append(render_value(zero_value(p.ty)))
    return f"{variant.entry}({', '.join(args)})"


def build_prompt(
    program: SubjectProgram,
    variant: PathVariant,
    cfg: ExtractionConfig,
    template: str | None = None,
) -> str:
    """Compose the generation prompt for one path.

    Includes the full source of module fields and every non-symbolic
    function, then the pretty-printed variant. Builtin bodies are omitted;
    models know the standard string API.
    """
    symbolic = cfg.symbolic_set()
    parts = []
    fields_src = render_fields_source(program)
    if fields_src:
        parts.append(fields_src)
    for fn in program.functions:
        if fn.name not in symbolic:
            parts.append(render_function_source(fn))
    context = "\n\n".join(parts) if parts else "// (none)"
    tpl = template if template is not None else default_prompt_template()
    return tpl.format(
        entry=variant.entry,
        context=context,
        variant=render_variant(variant),
        example=_example_call(variant),
    )


def prompt_with_feedback(base_prompt: str, previous: list[tuple[str, str]]) -> str:
    if not previous:
        return base_prompt
    lines = [base_prompt, "", "Earlier attempts failed; avoid repeating them:"]
    for i, (test, feedback) in enumerate(previous, 1):
        lines.append(f"Attempt {i}: {test}")
        lines.append(f"  first divergence: {feedback}")
    return "\n".join(lines)


# -- finite input domains and the brute-force oracle ---------------------------


@dataclass(frozen=True)
class DomainConfig:
    int_bound: int = 8
    doubles: tuple[float, ...] = (-2.0, -1.1, -1.0, -0.5, 0.0, 0.5, 1.0, 1.1, 2.0, 3.0)
    chars: str = "abc-f. "
    string_alphabet: str = "abc -f"
    string_max_len: int = 4
    array_max_len: int = 3
    budget: int = 5_000_000

    def _scalar_size(self, base: str) -> int:
        if base == "int":
            return 2 * self.int_bound + 1
        if base == "double":
            return len(self.doubles)
        if base == "boolean":
            return 2
        if base == "char":
            return len(self.chars)
        if base == "string":
            return sum(len(self.string_alphabet) ** k for k in range(self.string_max_len + 1))
        raise DomainTooLarge(f"no finite domain for base type {base}")

    def _scalar_iter(self, base: str) -> Iterator:
        if base == "int":
            yield from range(-self.int_bound, self.int_bound + 1)
        elif base == "double":
            yield from self.doubles
        elif base == "boolean":
            yield False
            yield True
        elif base == "char":
            for c in self.chars:
                yield Char(c)
        elif base == "string":
            yield ""
            for length in range(1, self.string_max_len + 1):
                for chars in product(self.string_alphabet, repeat=length):
                    yield "".join(chars)
        else:
            raise DomainTooLarge(f"no finite domain for base type {base}")

    def domain_size(self, ty: SubjectType) -> int:
        scalar = self._scalar_size(ty.base)
        if not ty.array:
            return scalar
        return sum(scalar**k for k in range(self.array_max_len + 1))

    def domain_iter(self, ty: SubjectType) -> Iterator:
        if not ty.array:
            yield from self._scalar_iter(ty.base)
            return
        elems = list(self._scalar_iter(ty.base))
        for length in range(self.array_max_len + 1):
            for combo in product(elems, repeat=length):
                yield ValueArray(ty.elem, list(combo))


EXHAUSTED = object()


def brute_force_search(
    variant: PathVariant,
    program: SubjectProgram,
    domains: DomainConfig | None = None,
) -> TestCase | object:
    """First accepting test in deterministic domain order, or EXHAUSTED.

    Raises DomainTooLarge when the candidate product exceeds the budget.
    """
    domains = domains or DomainConfig()
    sizes = [domains.domain_size(p.ty) for p in variant.params]
    total = math.prod(sizes) if sizes else 1
    if total > domains.budget:
        raise DomainTooLarge(f"{total} candidates exceed budget {domains.budget}")
    iters = [list(domains.domain_iter(p.ty)) for p in variant.params]
    for combo in product(*iters):
        args = [_copy_value(v) for v in combo]
        test = TestCase(variant.entry, args)
        result = run_variant(variant, program, test)
        if result.returned:
            return TestCase(variant.entry, [_copy_value(v) for v in combo])
    return EXHAUSTED


def _copy_value(v):
    if isinstance(v, ValueArray):
        return ValueArray(v.elem, list(v.items))
    return v


# -- backends ----------------------------------------------------------------


class ScriptedBackend(GeneratorBackend):
    """Replays canned test texts, either per path id or from a global queue."""

    name = "scripted"

    def __init__(self, replies: list[str] | dict[str, list[str]]):
        if isinstance(replies, dict):
            self._per_path = {k: list(v) for k, v in replies.items()}
            self._queue = None
        else:
            self._per_path = None
            self._queue = list(replies)

    def generate(self, request: GenRequest) -> GenResponse:
        path_id = request.variant.get("id", "")
        if self._per_path is not None:
            pending = self._per_path.get(path_id)
            if not pending:
                return GenResponse(test_text=None, raw_reply="(script exhausted)")
            text = pending.pop(0)
        else:
            if not self._queue:
                return GenResponse(test_text=None, raw_reply="(script exhausted)")
            text = self._queue.pop(0)
        return GenResponse(test_text=text, raw_reply=text)


class BruteForceBackend(GeneratorBackend):
    """Exhaustive oracle over finite domains; can prove a path infeasible."""

    name = "brute-force"
    retryable = False

    def __init__(
        self,
        program: SubjectProgram,
        variants_by_id: dict[str, PathVariant],
        domains: DomainConfig | None = None,
    ):
        self.program = program
        self.variants = variants_by_id
        self.domains = domains or DomainConfig()
        self._cache: dict[str, GenResponse] = {}

    def generate(self, request: GenRequest) -> GenResponse:
        path_id = request.variant.get("id", "")
        if path_id in self._cache:
            return self._cache[path_id]
        variant = self.variants.get(path_id)
        if variant is None:
            return GenResponse(test_text=None, raw_reply=f"unknown path {path_id}")
        try:
            found = brute_force_search(variant, self.program, self.domains)
        except DomainTooLarge as e:
            resp = GenResponse(test_text=None, raw_reply=str(e))
        else:
            if found is EXHAUSTED:
                resp = GenResponse(exhausted=True, raw_reply="(domain exhausted)")
            else:
                resp = GenResponse(test_text=found.render(), raw_reply=found.render())
        self._cache[path_id] = resp
        return resp


# A language tag counts only when terminated by a newline; ```f(1)``` is content.
_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_+-]+\n)?\s*(.*?)```", re.DOTALL)


def extract_fenced_code(reply: str) -> str | None:
    m = _FENCE_RE.search(reply)
    if m is None:
        return None
    return m.group(1).strip() or None


@dataclass
class EndpointConfig:
    base_url: str
    model: str
    api_key: str | None = None  # falls back to $PALM_API_KEY
    temperature: float | None = None
    timeout: float = 60.0

    def key(self) -> str:
        return self.api_key or os.environ.get("PALM_API_KEY", "")


class LlmHttpBackend(GeneratorBackend):
    """OpenAI-compatible chat-completions client."""

    name = "llm-http"

    def __init__(self, endpoint: EndpointConfig, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self._client = httpx.Client(transport=transport, timeout=endpoint.timeout)

    def generate(self, request: GenRequest) -> GenResponse:
        reply = self._chat(request.prompt_text)
        return GenResponse(test_text=extract_fenced_code(reply), raw_reply=reply)

    def _chat(self, prompt: str) -> str:
        url = self.endpoint.base_url.rstrip("/") + "/chat/completions"
        payload: dict = {
            "model": self.endpoint.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        if self.endpoint.temperature is not None:
            payload["temperature"] = self.endpoint.temperature
        headers = {}
        if self.endpoint.key():
            headers["Authorization"] = f"Bearer {self.endpoint.key()}"
        retried = False
        while True:
            try:
                resp = self._client.post(url, json=payload, headers=headers)
            except httpx.HTTPError as e:
                raise BackendUnavailable(f"request failed: {e}") from e
            if resp.status_code in (429, 503) and not retried:
                retried = True
                delay = resp.headers.get("Retry-After")
                try:
                    time.sleep(min(float(delay), 30.0) if delay else 1.0)
                except ValueError:
                    time.sleep(1.0)
                continue
            if resp.status_code != 200:
                raise BackendUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as e:
                raise BackendUnavailable(f"malformed completion response: {e}") from e


# -- the generation loop -------------------------------------------------------


def validate_test(
    program: SubjectProgram,
    variant: PathVariant,
    test_text: str,
) -> Verdict:
    """Parse and run one candidate test against a variant."""
    try:
        test = parse_test_literal(program, test_text)
    except ParseError as e:
        return Verdict("parseError", message=str(e))
    if test.entry != variant.entry:
        return Verdict("parseError", message=f"test must call '{variant.entry}'")
    result = run_variant(variant, program, test)
    if result.outcome == "returned":
        return Verdict("covered")
    if result.outcome == "assertionViolated":
        return Verdict("diverged", assert_text=result.assert_text,
                       assert_step=result.assert_step)
    return Verdict("runtimeError",
                   message=result.error_message or result.error_kind or "runtime error")


def generate_all(
    program: SubjectProgram,
    tree: SymTree,
    variants: list[PathVariant],
    backend: GeneratorBackend,
    cfg: ExtractionConfig,
    trial_limit: int = 5,
    prompt_provider: Callable[[PathVariant], str] | None = None,
    on_event: Callable[[dict], None] | None = None,
    cancel: threading.Event | None = None,
    lock: threading.Lock | None = None,
    state: RunState | None = None,
) -> RunState:
    """Depth-first generation over feasible leaves, five trials per path."""
    if state is None:
        state = RunState()
    state.status = "running"
    state.backend = backend.name
    state.trial_limit = trial_limit
    guard = lock or threading.Lock()

    def emit(event: dict) -> None:
        if on_event is not None:
            on_event(event)

    try:
        for variant in variants:
            if variant.pruned_infeasible or variant.bound_exceeded:
                continue
            if cancel is not None and cancel.is_set():
                state.status = "cancelled"
                return state
            previous: list[tuple[str, str]] = []
            serialized = serialize_variant(variant)
            emit({"type": "path-start", "pathId": variant.id})
            limit = trial_limit if backend.retryable else 1
            for trial_index in range(1, limit + 1):
                if cancel is not None and cancel.is_set():
                    state.status = "cancelled"
                    return state
                # Re-read per trial: prompt edits apply to subsequent trials.
                base_prompt = (
                    prompt_provider(variant)
                    if prompt_provider is not None
                    else build_prompt(program, variant, cfg)
                )
                prompt = prompt_with_feedback(base_prompt, previous)
                request = GenRequest(prompt, serialized, list(previous), trial_index)
                response = backend.generate(request)
                if response.exhausted:
                    with guard:
                        mark_status(tree, variant.id, "infeasible")
                    emit({"type": "exhausted", "pathId": variant.id})
                    break
                if response.test_text is None:
                    verdict = Verdict("parseError",
                                      message="no test literal in reply")
                    test_text = response.raw_reply
                else:
                    test_text = response.test_text
                    verdict = validate_test(program, variant, test_text)
                rec = TrialRecord(
                    path_id=variant.id,
                    trial_index=trial_index,
                    prompt_text=prompt,
                    test_text=test_text,
                    verdict=verdict.kind,
                    assert_text=verdict.assert_text,
                    message=verdict.message,
                )
                with guard:
                    state.record(rec)
                    if verdict.covered:
                        mark_status(tree, variant.id, "covered")
                        state.covered.append(variant.id)
                emit({"type": "trial", "pathId": variant.id,
                      "trial": trial_index, "verdict": verdict.kind})
                if verdict.covered:
                    break
                previous.append((test_text or "", verdict.feedback()))
        state.status = "done"
    except BackendUnavailable as e:
        state.status = "done"
        state.error = str(e)
    return state


def verify_test(
    program: SubjectProgram,
    tree: SymTree,
    variants_by_id: dict[str, PathVariant],
    path_id: str,
    test_text: str,
    state: RunState | None = None,
) -> Verdict:
    """Check a user-authored test against one leaf's variant."""
    if path_id not in tree.leaf_index:
        raise UnknownPath(path_id)
    variant = variants_by_id[path_id]
    verdict = validate_test(program, variant, test_text)
    if verdict.covered and tree.leaf_status(path_id) not in ("bound-exceeded",):
        mark_status(tree, path_id, "covered")
    if state is not None:
        n = len(state.trials.get(path_id, []))
        state.record(TrialRecord(
            path_id=path_id,
            trial_index=n + 1,
            prompt_text="",
            test_text=test_text,
            verdict=verdict.kind,
            assert_text=verdict.assert_text,
            message=verdict.message,
            user_authored=True,
        ))
    return verdict


def write_run_log(state: RunState, path: str) -> None:
    """One TrialRecord per line, JSON-lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for records in state.trials.values():
            for rec in records:
                fh.write(json.dumps(rec.to_json()) + "\n")
