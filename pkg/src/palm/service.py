"""HTTP facade over the workbench: sessions, extraction, generation runs,
tree snapshots, variants, prompts, verification, and path location.

Sessions live in memory. Requests that mutate a session serialize through a
per-session lock; snapshot reads take the same lock, so a poll during a run
sees a consistent tree/history pair. One active run per session.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import corpus
from .ast import SubjectProgram
from .driver import (
    DomainConfig,
    EndpointConfig,
    RunState,
    build_prompt,
    generate_all,
    verify_test,
)
from .extraction import PathVariant, render_variant, serialize_variant
from .interp import parse_test_literal
from .parser import ParseError, SourceError, parse
from .tree import UnknownPath, locate_path, serialize_tree
from .workbench import Workspace, make_backend, make_config


class CfgModel(BaseModel):
    loopBound: int = 2
    recursionBound: int = 2
    maxPaths: int = 50
    entryFunction: str | None = None
    symbolicFunctions: list[str] = []


class SessionCreate(BaseModel):
    source: str
    cfg: CfgModel | None = None


class DomainsModel(BaseModel):
    intBound: int | None = None
    stringMaxLen: int | None = None
    arrayMaxLen: int | None = None
    budget: int | None = None

    def to_config(self) -> DomainConfig:
        cfg = DomainConfig()
        kwargs = {}
        if self.intBound is not None:
            kwargs["int_bound"] = self.intBound
        if self.stringMaxLen is not None:
            kwargs["string_max_len"] = self.stringMaxLen
        if self.arrayMaxLen is not None:
            kwargs["array_max_len"] = self.arrayMaxLen
        if self.budget is not None:
            kwargs["budget"] = self.budget
        return replace(cfg, **kwargs) if kwargs else cfg


class EndpointModel(BaseModel):
    baseUrl: str
    model: str
    temperature: float | None = None


class RunStart(BaseModel):
    backend: str = "brute-force"
    script: dict[str, list[str]] | list[str] | None = None
    endpoint: EndpointModel | None = None
    trialLimit: int = 5
    domains: DomainsModel | None = None


class TestBody(BaseModel):
    testText: str


class PromptBody(BaseModel):
    promptText: str


@dataclass
class Session:
    session_id: str
    source: str
    program: SubjectProgram
    cfg_model: CfgModel
    workspace: Workspace | None = None
    run_state: RunState = field(default_factory=lambda: RunState(status="idle"))
    run_thread: threading.Thread | None = None
    cancel_event: threading.Event = field(default_factory=threading.Event)
    prompt_overrides: dict[str, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    run_counter: int = 0

    def running(self) -> bool:
        return self.run_thread is not None and self.run_thread.is_alive()


def _diagnostics(err: SourceError) -> list[dict]:
    return [{"line": err.line, "col": err.col, "message": err.message}]


def create_app(ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="palm", version="0.1.0")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return s

    def get_workspace(s: Session) -> Workspace:
        if s.workspace is None:
            raise HTTPException(status_code=404, detail="session has no extraction yet")
        return s.workspace

    def get_variant(s: Session, path_id: str) -> PathVariant:
        ws = get_workspace(s)
        v = ws.variants_by_id.get(path_id)
        if v is None:
            raise HTTPException(status_code=404, detail=f"unknown path {path_id}")
        return v

    @app.get("/examples")
    def examples() -> list[dict]:
        return [
            {"name": p.name, "description": p.description,
             "source": p.source, "entry": p.entry}
            for p in corpus.ALL_PROGRAMS
        ]

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        try:
            program = parse(body.source)
        except SourceError as e:
            return JSONResponse(status_code=400,
                                content={"diagnostics": _diagnostics(e)})
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            source=body.source,
            program=program,
            cfg_model=body.cfg or CfgModel(),
        )
        with registry_lock:
            sessions[session.session_id] = session
        return {"sessionId": session.session_id, "diagnostics": []}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        s = get_session(session_id)
        if s.running():
            s.cancel_event.set()
        with registry_lock:
            sessions.pop(session_id, None)
        return {"deleted": True}

    @app.post("/sessions/{session_id}/extract")
    def extract_session(session_id: str):
        s = get_session(session_id)
        if s.running():
            raise HTTPException(status_code=409, detail="a run is active")
        m = s.cfg_model
        try:
            cfg = make_config(
                s.program,
                entry=m.entryFunction,
                loop_bound=m.loopBound,
                recursion_bound=m.recursionBound,
                max_paths=m.maxPaths,
                symbolic=tuple(m.symbolicFunctions),
            )
            with s.lock:
                s.workspace = Workspace.create(s.program, cfg)
                s.run_state = RunState(status="idle")
        except Exception as e:
            raise HTTPException(status_code=400, detail=str(e))
        return serialize_tree(s.workspace.tree)

    @app.get("/sessions/{session_id}/tree")
    def get_tree(session_id: str):
        s = get_session(session_id)
        ws = get_workspace(s)
        with s.lock:
            return serialize_tree(ws.tree)

    @app.get("/sessions/{session_id}/paths/{path_id}")
    def get_path(session_id: str, path_id: str):
        s = get_session(session_id)
        ws = get_workspace(s)
        v = get_variant(s, path_id)
        with s.lock:
            status = ws.tree.leaf_status(path_id)
        return {
            "pathId": path_id,
            "text": render_variant(v),
            "variant": serialize_variant(v),
            "status": status,
            "outcomes": v.outcomes(),
        }

    @app.get("/sessions/{session_id}/paths/{path_id}/prompt")
    def get_prompt(session_id: str, path_id: str):
        s = get_session(session_id)
        ws = get_workspace(s)
        v = get_variant(s, path_id)
        override = s.prompt_overrides.get(path_id)
        text = override if override is not None else build_prompt(ws.program, v, ws.cfg)
        return {"pathId": path_id, "promptText": text, "overridden": override is not None}

    @app.put("/sessions/{session_id}/paths/{path_id}/prompt")
    def put_prompt(session_id: str, path_id: str, body: PromptBody):
        s = get_session(session_id)
        get_variant(s, path_id)
        with s.lock:
            s.prompt_overrides[path_id] = body.promptText
        return {"pathId": path_id, "overridden": True}

    @app.post("/sessions/{session_id}/runs")
    def start_run(session_id: str, body: RunStart):
        s = get_session(session_id)
        ws = get_workspace(s)
        if s.running():
            raise HTTPException(status_code=409, detail="a run is already active")
        domains = body.domains.to_config() if body.domains else None
        endpoint = None
        if body.endpoint is not None:
            endpoint = EndpointConfig(base_url=body.endpoint.baseUrl,
                                      model=body.endpoint.model,
                                      temperature=body.endpoint.temperature)
        try:
            backend = make_backend(body.backend, ws, domains=domains,
                                   script=body.script, endpoint=endpoint)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
        s.run_counter += 1
        state = RunState(status="running", run_id=f"r{s.run_counter}")
        s.run_state = state
        s.cancel_event = threading.Event()

        def prompt_provider(variant: PathVariant) -> str:
            # Read live: an override saved mid-run applies to later trials.
            override = s.prompt_overrides.get(variant.id)
            if override is not None:
                return override
            return build_prompt(ws.program, variant, ws.cfg)

        def worker():
            generate_all(
                ws.program, ws.tree, ws.variants, backend, ws.cfg,
                trial_limit=body.trialLimit,
                prompt_provider=prompt_provider,
                cancel=s.cancel_event,
                lock=s.lock,
                state=state,
            )

        s.run_thread = threading.Thread(target=worker, daemon=True)
        s.run_thread.start()
        return {"runId": state.run_id}

    @app.get("/sessions/{session_id}/runs/current")
    def current_run(session_id: str):
        s = get_session(session_id)
        with s.lock:
            return s.run_state.snapshot()

    @app.post("/sessions/{session_id}/runs/current/cancel")
    def cancel_run(session_id: str):
        s = get_session(session_id)
        was_running = s.running()
        s.cancel_event.set()
        return {"cancelled": was_running}

    @app.post("/sessions/{session_id}/paths/{path_id}/verify")
    def verify(session_id: str, path_id: str, body: TestBody):
        s = get_session(session_id)
        ws = get_workspace(s)
        get_variant(s, path_id)
        with s.lock:
            try:
                verdict = verify_test(ws.program, ws.tree, ws.variants_by_id,
                                      path_id, body.testText, state=s.run_state)
            except UnknownPath:
                raise HTTPException(status_code=404, detail=f"unknown path {path_id}")
        response = {"pathId": path_id, "verdict": verdict.kind}
        if verdict.assert_text is not None:
            response["assert"] = verdict.assert_text
        if verdict.message is not None:
            response["message"] = verdict.message
        if verdict.assert_step is not None:
            v = ws.variants_by_id[path_id]
            visible = [i for i, st in enumerate(v.steps) if not st.satisfied]
            if verdict.assert_step in visible:
                response["displayStepIndex"] = visible.index(verdict.assert_step)
        return response

    @app.post("/sessions/{session_id}/locate")
    def locate(session_id: str, body: TestBody):
        s = get_session(session_id)
        ws = get_workspace(s)
        try:
            test = parse_test_literal(ws.program, body.testText)
        except ParseError as e:
            raise HTTPException(status_code=400, detail=str(e))
        result = locate_path(ws.tree, ws.program, test)
        return {
            "pathId": result.path_id,
            "reason": result.reason,
            "outcomes": result.outcomes,
        }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
