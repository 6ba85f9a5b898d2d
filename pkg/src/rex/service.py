"""Interactive session server.

HTTP carries static assets and ``POST /session`` (open); a WebSocket at
``/ws`` carries newline-free JSON messages, one session per socket:

    client -> server: {"req": <id>, "op": "open" | "edit_cell" |
                       "run_cell" | "plan" | "react" | "set_policy" |
                       "reset", ...}
    server -> client: {"req": <id>, "ev": "session" | "output" |
                       "analysis" | "lint" | "state_digest" | "error" |
                       "done", ...}

Every client message receives at least one reply carrying its request
id; a ``done`` event closes each exchange. Edits are two-phase: an
``edit_cell`` only previews the plan, ``react`` applies it.
"""

from __future__ import annotations

import asyncio
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .analyzer import LintViolation, analyze_notebook
from .notebook import Notebook, NotebookFormatError, notebook_from_obj
from .reaction import Edit, Policy, ReactionPlan, execute_plan, plan_edits
from .runtime import FreshEnvironment, Kernel, state_digest

DEFAULT_PORT = 8787


@dataclass
class Session:
    session_id: str
    notebook: Notebook
    kernel: Kernel
    policy: Policy
    dirty: dict[str, Edit] = field(default_factory=dict)
    pending: ReactionPlan | None = None
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


def _violations_obj(violations: list[LintViolation]) -> list[dict]:
    return [
        {
            "kind": v.kind,
            "cells": list(v.cells),
            "name": v.name,
            "message": v.message,
        }
        for v in violations
    ]


def _output_event(trace) -> dict:
    return {
        "ev": "output",
        "cell": trace.cell_id,
        "text": trace.visible_output(),
        "failed": trace.failed,
    }


def _digest_event(kernel: Kernel) -> dict:
    return {
        "ev": "state_digest",
        "digest": state_digest(kernel.state),
        "fs": dict(sorted(kernel.state.fs.items())),
    }


def _policy_from(obj: dict, fallback: Policy | None = None) -> Policy:
    kind = obj.get("policy") or (fallback.kind if fallback else "dynamic")
    granularity = obj.get("granularity") or (
        fallback.granularity if fallback else "coarse"
    )
    lint_mutations = obj.get(
        "lint_mutations", fallback.lint_mutations if fallback else False
    )
    return Policy(kind, granularity=granularity, lint_mutations=bool(lint_mutations))


class SessionHub:
    """All live sessions; each session's messages are handled strictly
    in arrival order under its own lock."""

    def __init__(self) -> None:
        self.sessions: dict[str, Session] = {}

    def open(self, doc: object, policy: Policy, fs_initial: dict[str, str]) -> tuple[Session, list[dict]]:
        notebook = notebook_from_obj(doc)
        env = FreshEnvironment(dict(fs_initial))
        kernel = Kernel(env)
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            notebook=notebook,
            kernel=kernel,
            policy=policy,
        )
        events: list[dict] = [{"ev": "session", "session": session.session_id}]
        for cell in notebook.cells:
            trace = kernel.run_cell(cell)
            events.append(_output_event(trace))
        events.append({"ev": "analysis", "stale": [], "plan": []})
        events.append(_digest_event(kernel))
        self.sessions[session.session_id] = session
        return session, events

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise KeyError(f"unknown session: {session_id}")
        return self.sessions[session_id]

    # -- per-operation handlers; each returns a list of events --

    def preview(self, session: Session) -> list[dict]:
        if not session.dirty:
            session.pending = None
            return [{"ev": "analysis", "stale": [], "plan": []}]
        analysis = analyze_notebook(session.notebook)
        outcome = plan_edits(
            session.policy,
            session.notebook,
            list(session.dirty.values()),
            analysis,
            session.kernel.history,
        )
        if isinstance(outcome, list):
            session.pending = None
            return [
                {"ev": "lint", "violations": _violations_obj(outcome)},
                {"ev": "analysis", "stale": [], "plan": [], "blocked": True},
            ]
        session.pending = outcome
        event = {"ev": "analysis", "stale": list(outcome.cells), "plan": list(outcome.cells)}
        if outcome.parse_error:
            event["error"] = outcome.parse_error
        return [event]

    def edit_cell(self, session: Session, cell_id: str, source: str) -> list[dict]:
        current = session.notebook.cell(cell_id)  # raises KeyError when unknown
        if current.source == source and cell_id not in session.dirty:
            return [{"ev": "analysis", "stale": [], "plan": []}]
        session.notebook = session.notebook.with_source(cell_id, source)
        session.dirty[cell_id] = Edit("modify", cell_id, new_source=source)
        return self.preview(session)

    def react(self, session: Session) -> list[dict]:
        events: list[dict] = []
        plan = session.pending
        if plan is not None:
            traces = execute_plan(session.kernel, session.notebook, plan)
            for trace in traces:
                events.append(_output_event(trace))
        session.dirty.clear()
        session.pending = None
        events.append({"ev": "analysis", "stale": [], "plan": []})
        events.append(_digest_event(session.kernel))
        return events

    def run_cell(self, session: Session, cell_id: str) -> list[dict]:
        cell = session.notebook.cell(cell_id)
        trace = session.kernel.run_cell(cell)
        return [_output_event(trace), _digest_event(session.kernel)]

    def set_policy(self, session: Session, policy: Policy) -> list[dict]:
        session.policy = policy
        return self.preview(session)

    def reset(self, session: Session) -> list[dict]:
        session.kernel.restart()
        session.dirty.clear()
        session.pending = None
        events: list[dict] = []
        for cell in session.notebook.cells:
            trace = session.kernel.run_cell(cell)
            events.append(_output_event(trace))
        events.append({"ev": "analysis", "stale": [], "plan": []})
        events.append(_digest_event(session.kernel))
        return events


def create_app() -> FastAPI:
    app = FastAPI(title="rex session server")
    hub = SessionHub()
    app.state.hub = hub

    @app.post("/session")
    async def open_session(payload: dict):
        try:
            policy = _policy_from(payload)
            session, events = hub.open(
                payload.get("notebook"), policy, payload.get("fs", {})
            )
        except (NotebookFormatError, ValueError) as err:
            raise HTTPException(status_code=422, detail=str(err))
        return JSONResponse({"session": session.session_id, "events": events})

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        session: Session | None = None

        async def reply(req: object, events: list[dict]) -> None:
            for event in events:
                await ws.send_json({"req": req, **event})
            await ws.send_json({"req": req, "ev": "done"})

        try:
            while True:
                message = await ws.receive_json()
                req = message.get("req")
                op = message.get("op")
                try:
                    if op == "open":
                        policy = _policy_from(message)
                        session, events = hub.open(
                            message.get("notebook"), policy, message.get("fs", {})
                        )
                        await reply(req, events)
                        continue
                    if op == "attach":
                        session = hub.get(str(message.get("session")))
                        await reply(req, [{"ev": "session", "session": session.session_id}])
                        continue
                    if session is None:
                        raise KeyError("no session: send 'open' or 'attach' first")
                    async with session.lock:
                        if op == "edit_cell":
                            events = hub.edit_cell(
                                session,
                                str(message.get("cell")),
                                str(message.get("source")),
                            )
                        elif op == "plan":
                            events = hub.preview(session)
                        elif op == "react":
                            events = hub.react(session)
                        elif op == "run_cell":
                            events = hub.run_cell(session, str(message.get("cell")))
                        elif op == "set_policy":
                            events = hub.set_policy(
                                session, _policy_from(message, session.policy)
                            )
                        elif op == "reset":
                            events = hub.reset(session)
                        else:
                            raise ValueError(f"unknown op: {op}")
                    await reply(req, events)
                except (KeyError, ValueError, NotebookFormatError) as err:
                    detail = err.args[0] if err.args else str(err)
                    await ws.send_json(
                        {"req": req, "ev": "error", "message": str(detail)}
                    )
                    await ws.send_json({"req": req, "ev": "done"})
        except WebSocketDisconnect:
            return

    dist = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=dist, html=True), name="ui")
    else:

        @app.get("/")
        async def index():
            return JSONResponse(
                {"service": "rex", "hint": "connect via ws at /ws"}
            )

    return app
