"""HTTP service tests over the in-process test client."""

import time

import pytest
from fastapi.testclient import TestClient

from palm.corpus import COUNT_WORDS, TUTORIAL
from palm.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(client, source=TUTORIAL.source, cfg=None) -> str:
    body = {"source": source}
    if cfg:
        body["cfg"] = cfg
    r = client.post("/sessions", json=body)
    assert r.status_code == 200, r.text
    return r.json()["sessionId"]


def wait_done(client, sid, timeout=20.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        snap = client.get(f"/sessions/{sid}/runs/current").json()
        if snap["status"] in ("done", "cancelled", "idle"):
            return snap
        time.sleep(0.02)
    raise TimeoutError("run did not finish")


class TestSessions:
    def test_create_and_extract(self, client):
        sid = make_session(client)
        tree = client.post(f"/sessions/{sid}/extract").json()
        assert len(tree["leaves"]) == 4
        assert tree["rootId"] in [n["id"] for n in tree["nodes"]]

    def test_parse_errors_are_diagnostics(self, client):
        r = client.post("/sessions", json={"source": "int f( {"})
        assert r.status_code == 400
        diag = r.json()["diagnostics"][0]
        assert diag["line"] == 1 and "message" in diag

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/tree").status_code == 404

    def test_extract_idempotent(self, client):
        sid = make_session(client)
        t1 = client.post(f"/sessions/{sid}/extract").json()
        t2 = client.post(f"/sessions/{sid}/extract").json()
        assert t1 == t2

    def test_sessions_independent_and_deletable(self, client):
        a = make_session(client)
        b = make_session(client)
        client.post(f"/sessions/{a}/extract")
        client.post(f"/sessions/{b}/extract")
        assert client.delete(f"/sessions/{a}").json()["deleted"]
        assert client.get(f"/sessions/{a}/tree").status_code == 404
        assert client.get(f"/sessions/{b}/tree").status_code == 200

    def test_examples_list(self, client):
        examples = client.get("/examples").json()
        names = [e["name"] for e in examples]
        assert "tutorial" in names and "palindrome" in names
        assert all({"name", "description", "source", "entry"} <= set(e)
                   for e in examples)


class TestPaths:
    def test_variant_detail(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        detail = client.get(f"/sessions/{sid}/paths/p0").json()
        assert "assertTrue(x>0);" in detail["text"]
        assert detail["status"] == "uncovered"
        assert detail["outcomes"] == [True, True]
        assert detail["variant"]["id"] == "p0"

    def test_unknown_path_404(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        assert client.get(f"/sessions/{sid}/paths/p9").status_code == 404

    def test_prompt_get_put_roundtrip(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        before = client.get(f"/sessions/{sid}/paths/p0/prompt").json()
        assert not before["overridden"]
        assert "assertTrue(x>0);" in before["promptText"]
        client.put(f"/sessions/{sid}/paths/p0/prompt",
                   json={"promptText": "custom prompt"})
        after = client.get(f"/sessions/{sid}/paths/p0/prompt").json()
        assert after["overridden"] and after["promptText"] == "custom prompt"


class TestRuns:
    def test_brute_force_run_covers_all(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/runs", json={"backend": "brute-force"})
        assert r.status_code == 200 and r.json()["runId"] == "r1"
        snap = wait_done(client, sid)
        assert snap["status"] == "done"
        assert sorted(snap["covered"]) == ["p0", "p1", "p2", "p3"]
        tree = client.get(f"/sessions/{sid}/tree").json()
        leaves = {n["id"]: n for n in tree["nodes"] if n["kind"] == "terminal"}
        assert all(n["status"] == "covered" for n in leaves.values())

    def test_scripted_run_and_history(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        script = {"p0": ["tutorial(1, 1, 0)", "tutorial(1, 6, 0)"]}
        client.post(f"/sessions/{sid}/runs",
                    json={"backend": "scripted", "script": script})
        snap = wait_done(client, sid)
        trials = snap["trials"]["p0"]
        assert [t["verdict"] for t in trials] == ["diverged", "covered"]
        assert trials[0]["assert_text"] == "assertTrue(y+z>0)"

    def test_no_run_yet_is_idle(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        snap = client.get(f"/sessions/{sid}/runs/current").json()
        assert snap["status"] == "idle"

    def test_run_before_extract_404(self, client):
        sid = make_session(client)
        r = client.post(f"/sessions/{sid}/runs", json={"backend": "brute-force"})
        assert r.status_code == 404

    def test_cancel_endpoint(self, client):
        sid = make_session(client, source=COUNT_WORDS.source)
        client.post(f"/sessions/{sid}/extract")
        client.post(f"/sessions/{sid}/runs", json={"backend": "brute-force"})
        client.post(f"/sessions/{sid}/runs/current/cancel")
        snap = wait_done(client, sid)
        assert snap["status"] in ("cancelled", "done")

    def test_unknown_backend_400(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/runs", json={"backend": "psychic"})
        assert r.status_code == 400

    def test_second_run_while_active_409(self, client):
        sid = make_session(client, source=COUNT_WORDS.source)
        client.post(f"/sessions/{sid}/extract")
        first = client.post(f"/sessions/{sid}/runs", json={"backend": "brute-force"})
        assert first.status_code == 200
        second = client.post(f"/sessions/{sid}/runs", json={"backend": "brute-force"})
        # either the first is still active (409) or it already finished (200)
        if second.status_code == 409:
            assert "active" in second.json()["detail"]
        wait_done(client, sid)

    def test_prompt_override_used_by_next_run(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        client.put(f"/sessions/{sid}/paths/p0/prompt",
                   json={"promptText": "OVERRIDDEN"})
        client.post(f"/sessions/{sid}/runs",
                    json={"backend": "scripted",
                          "script": {"p0": ["tutorial(1, 6, 0)"]}})
        snap = wait_done(client, sid)
        assert snap["trials"]["p0"][0]["prompt_text"].startswith("OVERRIDDEN")


class TestVerifyAndLocate:
    def test_verify_diverged(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/paths/p0/verify",
                        json={"testText": "tutorial(1, 1, 0)"})
        body = r.json()
        assert body["verdict"] == "diverged"
        assert body["assert"] == "assertTrue(y+z>0)"
        assert body["displayStepIndex"] == 2

    def test_verify_covered_updates_tree_and_history(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/paths/p0/verify",
                        json={"testText": "tutorial(1, 6, 0)"})
        assert r.json()["verdict"] == "covered"
        tree = client.get(f"/sessions/{sid}/tree").json()
        leaf_id = tree["leaves"]["p0"]
        leaf = next(n for n in tree["nodes"] if n["id"] == leaf_id)
        assert leaf["status"] == "covered"
        snap = client.get(f"/sessions/{sid}/runs/current").json()
        assert snap["trials"]["p0"][0]["user_authored"]

    def test_locate(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/locate",
                        json={"testText": "tutorial(1, 6, 0)"})
        assert r.json()["pathId"] == "p0"
        r = client.post(f"/sessions/{sid}/locate",
                        json={"testText": "tutorial(1, 1, 0)"})
        assert r.json()["pathId"] == "p1"

    def test_malformed_test_400(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/extract")
        r = client.post(f"/sessions/{sid}/locate", json={"testText": "tutorial(1,"})
        assert r.status_code == 400
