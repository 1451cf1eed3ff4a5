"""Generation driver: prompts, backends, trial loop, verification."""

import threading

import httpx
import json
import pytest

from palm import (
    BackendUnavailable,
    BruteForceBackend,
    DomainConfig,
    DomainTooLarge,
    EndpointConfig,
    LlmHttpBackend,
    ScriptedBackend,
    UnknownPath,
    Workspace,
    brute_force_search,
    build_prompt,
    build_tree,
    generate_all,
    verify_test,
)
from palm.corpus import ARG_PARSE, TUTORIAL
from palm.driver import (
    EXHAUSTED,
    GenRequest,
    RunState,
    extract_fenced_code,
    prompt_with_feedback,
    write_run_log,
)


def fresh(ws_source, cfg=None):
    return Workspace.from_source(ws_source, cfg)


class TestPrompt:
    HELPER_SRC = """
    int seed = 3;
    int helper(int g) {
        return g * seed;
    }
    int f(int x) {
        if (helper(x) > 9) {
            return 1;
        }
        return 0;
    }
    """

    def test_contains_fields_helpers_variant_not_entry_body(self):
        ws = fresh(self.HELPER_SRC, {"entry": "f"})
        prompt = build_prompt(ws.program, ws.variants[0], ws.cfg)
        assert "int seed = 3;" in prompt
        assert "int helper(int g)" in prompt
        assert "g * seed" in prompt  # helper body included in full
        assert "assertTrue(helper(x)>9)" in prompt  # the variant
        assert "if (helper(x) > 9)" not in prompt  # not the original entry body
        assert "produce one call to `f`" in prompt

    def test_builtin_bodies_excluded(self, countwords_ws):
        prompt = build_prompt(countwords_ws.program, countwords_ws.variants[0],
                              countwords_ws.cfg)
        assert "split" in prompt  # referenced by the variant
        assert "def " not in prompt and "native" not in prompt

    def test_feedback_appended_in_order(self):
        base = "BASE"
        text = prompt_with_feedback(base, [("f(1)", "assertTrue(y+z>0)"),
                                           ("f(2)", "assertFalse(a<b)")])
        assert text.startswith("BASE")
        i1 = text.index("f(1)")
        i2 = text.index("assertTrue(y+z>0)")
        i3 = text.index("f(2)")
        assert i1 < i2 < i3

    def test_template_is_editable(self, tutorial_ws):
        prompt = build_prompt(tutorial_ws.program, tutorial_ws.variants[0],
                              tutorial_ws.cfg, template="only: {variant}")
        assert prompt.startswith("only: ")
        assert "assertTrue(x>0);" in prompt


class TestFencedExtraction:
    def test_plain_fence(self):
        assert extract_fenced_code("```\ntutorial(1,6,0)\n```") == "tutorial(1,6,0)"

    def test_inline_fence(self):
        assert extract_fenced_code('```is_palindrome("abca")```') == 'is_palindrome("abca")'

    def test_language_tag(self):
        assert extract_fenced_code("```java\nf(1)\n```") == "f(1)"

    def test_prose_without_fence(self):
        assert extract_fenced_code("I think f(1) works") is None

    def test_first_of_many(self):
        assert extract_fenced_code("```a(1)``` then ```b(2)```") == "a(1)"


class TestBruteForce:
    def test_palindrome_path_c_finds_ab_first(self, palindrome_ws):
        variant = palindrome_ws.variants_by_id["p1"]
        found = brute_force_search(variant, palindrome_ws.program)
        assert found is not EXHAUSTED
        assert found.args == ["ab"]

    def test_tutorial_first_hit_is_deterministic_and_valid(self, tutorial_ws):
        from palm import run_variant

        variant = tutorial_ws.variants_by_id["p0"]
        found = brute_force_search(variant, tutorial_ws.program)
        again = brute_force_search(variant, tutorial_ws.program)
        assert found.args == again.args
        assert run_variant(variant, tutorial_ws.program, found).returned

    def test_exhaustion_proved(self, countwords_ws):
        # parts[i] nonempty then empty is unreachable: split() drops
        # trailing empty strings
        target = next(
            v for v in countwords_ws.variants
            if tuple(v.outcomes()) == (True, True, True, False, False))
        assert brute_force_search(target, countwords_ws.program) is EXHAUSTED

    def test_domain_too_large(self, argparse_ws):
        variant = argparse_ws.variants_by_id["p0"]
        with pytest.raises(DomainTooLarge):
            brute_force_search(variant, argparse_ws.program, DomainConfig())

    def test_reduced_domains_fit_budget(self, argparse_ws):
        domains = ARG_PARSE.domains
        variant = argparse_ws.variants_by_id["p0"]
        assert brute_force_search(variant, argparse_ws.program, domains) is not EXHAUSTED

    def test_domain_order_ints_ascending(self):
        d = DomainConfig(int_bound=2)
        from palm.ast import INT, SubjectType

        assert list(d.domain_iter(INT)) == [-2, -1, 0, 1, 2]
        arrays = list(d.domain_iter(SubjectType("int", array=True)))
        assert arrays[0].items == []
        assert arrays[1].items == [-2]
        assert d.domain_size(SubjectType("int", array=True)) == len(arrays)


class TestScripted:
    def test_per_path_and_queue(self):
        per_path = ScriptedBackend({"p0": ["f(1)", "f(2)"]})
        req = GenRequest("", {"id": "p0"}, [], 1)
        assert per_path.generate(req).test_text == "f(1)"
        assert per_path.generate(req).test_text == "f(2)"
        assert per_path.generate(req).test_text is None
        queue = ScriptedBackend(["a(1)"])
        assert queue.generate(req).test_text == "a(1)"
        assert queue.generate(req).test_text is None


class TestLlmHttp:
    def make_backend(self, handler):
        transport = httpx.MockTransport(handler)
        return LlmHttpBackend(
            EndpointConfig(base_url="https://llm.example/v1", model="m", api_key="k"),
            transport=transport,
        )

    def test_parses_fenced_reply(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "m"
            assert body["messages"][0]["role"] == "user"
            assert request.headers["authorization"] == "Bearer k"
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "```\ntutorial(1,6,0)\n```"}}]})

        backend = self.make_backend(handler)
        resp = backend.generate(GenRequest("prompt", {"id": "p0"}, [], 1))
        assert resp.test_text == "tutorial(1,6,0)"

    def test_prose_reply_keeps_raw(self):
        def handler(request):
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "no fence here"}}]})

        resp = self.make_backend(handler).generate(GenRequest("p", {"id": "p0"}, [], 1))
        assert resp.test_text is None
        assert resp.raw_reply == "no fence here"

    def test_retry_after_once_then_success(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(429, headers={"Retry-After": "0"})
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "```f(1)```"}}]})

        resp = self.make_backend(handler).generate(GenRequest("p", {"id": "p0"}, [], 1))
        assert resp.test_text == "f(1)"
        assert calls["n"] == 2

    def test_persistent_failure_raises(self):
        def handler(request):
            return httpx.Response(503)

        with pytest.raises(BackendUnavailable):
            self.make_backend(handler).generate(GenRequest("p", {"id": "p0"}, [], 1))

    def test_auth_failure_raises(self):
        def handler(request):
            return httpx.Response(401, text="bad key")

        with pytest.raises(BackendUnavailable):
            self.make_backend(handler).generate(GenRequest("p", {"id": "p0"}, [], 1))


class TestGenerateAll:
    def test_five_wrong_tests_exhaust_trials(self):
        ws = fresh(TUTORIAL.source)
        backend = ScriptedBackend({"p0": ["tutorial(1, 1, 0)"] * 8})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        records = state.trials["p0"]
        assert len(records) == 5
        assert [r.trial_index for r in records] == [1, 2, 3, 4, 5]
        assert all(r.verdict == "diverged" for r in records)
        assert ws.tree.leaf_status("p0") == "uncovered"

    def test_feedback_chain_matches_previous_divergence(self):
        ws = fresh(TUTORIAL.source)
        seen_requests = []

        class Spy(ScriptedBackend):
            def generate(self, request):
                seen_requests.append(request)
                return super().generate(request)

        backend = Spy({"p0": ["tutorial(1, 1, 0)"] * 5})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        records = state.trials["p0"]
        p0_requests = [r for r in seen_requests if r.variant["id"] == "p0"]
        for k in range(1, len(p0_requests)):
            prev = p0_requests[k].previous_trials
            assert prev[-1] == (records[k - 1].test_text, records[k - 1].assert_text)

    def test_first_correct_test_covers_in_one_trial(self):
        ws = fresh(TUTORIAL.source)
        backend = ScriptedBackend({"p0": ["tutorial(1, 6, 0)"]})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        assert len(state.trials["p0"]) == 1
        assert ws.tree.leaf_status("p0") == "covered"

    def test_brute_force_covers_all_tutorial_leaves(self):
        ws = fresh(TUTORIAL.source)
        backend = BruteForceBackend(ws.program, ws.variants_by_id)
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        assert sorted(state.covered) == ["p0", "p1", "p2", "p3"]
        assert all(len(v) == 1 for v in state.trials.values())

    def test_exhaustion_marks_leaf_infeasible_without_trials(self):
        from palm.corpus import COUNT_WORDS

        ws = fresh(COUNT_WORDS.source)
        backend = BruteForceBackend(ws.program, ws.variants_by_id)
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        statuses = {v.id: ws.tree.leaf_status(v.id) for v in ws.variants}
        infeasible = [pid for pid, s in statuses.items() if s == "infeasible"]
        assert len(infeasible) == 2
        for pid in infeasible:
            assert pid not in state.trials

    def test_skips_pruned_and_gray(self, infeasible_ws):
        ws = fresh("int infeasible_branch(int a){ int x = 1; int y = 0; if (x < y) { return a; } return 0; }")
        backend = BruteForceBackend(ws.program, ws.variants_by_id)
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        pruned = next(v.id for v in ws.variants if v.pruned_infeasible)
        assert pruned not in state.trials
        assert ws.tree.leaf_status(pruned) == "infeasible"

    def test_cancellation_between_trials(self):
        ws = fresh(TUTORIAL.source)
        cancel = threading.Event()

        class CancelAfterOne(ScriptedBackend):
            def generate(self, request):
                cancel.set()
                return super().generate(request)

        backend = CancelAfterOne({"p0": ["tutorial(1, 1, 0)"] * 5})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg,
                             cancel=cancel)
        assert state.status == "cancelled"
        assert len(state.trials.get("p0", [])) <= 1

    def test_backend_unavailable_preserves_partial_state(self):
        ws = fresh(TUTORIAL.source)

        class Flaky(ScriptedBackend):
            def __init__(self):
                super().__init__({"p0": ["tutorial(1, 6, 0)"]})
                self.calls = 0

            def generate(self, request):
                self.calls += 1
                if self.calls > 1:
                    raise BackendUnavailable("endpoint went away")
                return super().generate(request)

        state = generate_all(ws.program, ws.tree, ws.variants, Flaky(), ws.cfg)
        assert state.error is not None
        assert ws.tree.leaf_status("p0") == "covered"  # partial progress kept

    def test_replay_reproduces_statuses(self):
        # backend independence: replaying recorded tests through the
        # scripted backend yields identical leaf statuses
        ws1 = fresh(TUTORIAL.source)
        state1 = generate_all(ws1.program, ws1.tree, ws1.variants,
                              BruteForceBackend(ws1.program, ws1.variants_by_id),
                              ws1.cfg)
        script = {pid: [r.test_text for r in recs]
                  for pid, recs in state1.trials.items()}
        ws2 = fresh(TUTORIAL.source)
        generate_all(ws2.program, ws2.tree, ws2.variants,
                     ScriptedBackend(script), ws2.cfg)
        for pid in ws1.tree.leaf_index:
            assert ws1.tree.leaf_status(pid) == ws2.tree.leaf_status(pid)

    def test_parse_error_consumes_trial(self):
        ws = fresh(TUTORIAL.source)
        backend = ScriptedBackend({"p0": ["tutorial(1,", "tutorial(1, 6, 0)"]})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        records = state.trials["p0"]
        assert [r.verdict for r in records] == ["parseError", "covered"]

    def test_runtime_error_trial_feeds_back_message(self):
        ws = fresh("int f(int a){ if (10 / a > 1) { return 1; } return 0; }")
        seen = []

        class Spy(ScriptedBackend):
            def generate(self, request):
                seen.append(request)
                return super().generate(request)

        backend = Spy({"p0": ["f(0)", "f(3)"]})
        state = generate_all(ws.program, ws.tree, ws.variants, backend, ws.cfg)
        records = state.trials["p0"]
        assert [r.verdict for r in records] == ["runtimeError", "covered"]
        retry = [r for r in seen if r.variant["id"] == "p0"][1]
        assert "zero" in retry.previous_trials[-1][1]

    def test_run_log_jsonl(self, tmp_path):
        ws = fresh(TUTORIAL.source)
        state = generate_all(ws.program, ws.tree, ws.variants,
                             BruteForceBackend(ws.program, ws.variants_by_id),
                             ws.cfg)
        log = tmp_path / "run.jsonl"
        write_run_log(state, str(log))
        lines = [json.loads(line) for line in log.read_text().splitlines()]
        assert len(lines) == 4
        assert all(rec["verdict"] == "covered" for rec in lines)


class TestVerify:
    def test_covered_marks_and_records_user_trial(self, tutorial_ws):
        ws = Workspace.from_source(TUTORIAL.source)
        state = RunState(status="idle")
        verdict = verify_test(ws.program, ws.tree, ws.variants_by_id,
                              "p0", "tutorial(1, 6, 0)", state=state)
        assert verdict.covered
        assert ws.tree.leaf_status("p0") == "covered"
        assert state.trials["p0"][0].user_authored

    def test_diverged_reports_exact_assert(self):
        ws = Workspace.from_source(TUTORIAL.source)
        verdict = verify_test(ws.program, ws.tree, ws.variants_by_id,
                              "p0", "tutorial(1, 1, 0)")
        assert verdict.kind == "diverged"
        assert verdict.assert_text == "assertTrue(y+z>0)"
        assert ws.tree.leaf_status("p0") == "uncovered"

    def test_palindrome_d_refinement(self, palindrome_ws):
        ws = Workspace.from_source(
            next(c for c in __import__("palm.corpus", fromlist=["ALL_PROGRAMS"]).ALL_PROGRAMS
                 if c.name == "palindrome").source)
        bad = verify_test(ws.program, ws.tree, ws.variants_by_id,
                          "p3", 'is_palindrome("ab")')
        assert bad.kind == "diverged"
        assert "charAt" in bad.assert_text
        good = verify_test(ws.program, ws.tree, ws.variants_by_id,
                           "p3", 'is_palindrome("abca")')
        assert good.covered

    def test_type_mismatch_is_parse_error(self, tutorial_ws):
        verdict = verify_test(tutorial_ws.program, tutorial_ws.tree,
                              tutorial_ws.variants_by_id, "p3", 'tutorial("a", 1, 2)')
        assert verdict.kind == "parseError"

    def test_unknown_path(self, tutorial_ws):
        with pytest.raises(UnknownPath):
            verify_test(tutorial_ws.program, tutorial_ws.tree,
                        tutorial_ws.variants_by_id, "p99", "tutorial(1, 1, 1)")
