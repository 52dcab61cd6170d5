"""HTTP/WebSocket service wrapping sessions, replay and evaluation.

Auth is a per-session bearer token issued at creation: HTTP mutations send it
in the ``x-session-token`` header, the websocket passes it as a query
parameter.  Wire messages are documented in :mod:`tandem.service.schemas`.
"""

from __future__ import annotations

import asyncio
import json
import os
import queue
import tempfile
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, WebSocket, WebSocketDisconnect

from tandem import __version__
from tandem.envs.registry import (
    available_tasks,
    builtin_instances,
    load_builtin_instance,
    make_environment,
)
from tandem.agents.prompts import signature
from tandem.errors import (
    FixtureError,
    ReplayDivergenceError,
    TamperedTrajectoryError,
    TandemError,
)
from tandem.eval.report import evaluate_trajectory
from tandem.harness.trajectory import Trajectory, load_trajectory, replay_trajectory
from tandem.service.live import LiveSession
from tandem.service.schemas import (
    PROTOCOL_VERSION,
    OUTCOME_LABELS,
    SATISFACTION_LABELS,
    ActionAccepted,
    ActionRequest,
    CreateSessionRequest,
    EndSessionResponse,
    EvaluateRequest,
    RatingRequest,
    ReplayResponse,
    SessionCreated,
    SessionStatus,
    TaskInfo,
)

WIRE_TYPES = {
    "shared_update": "observation",
    "private_update": "observation",
    "idle_tick": "observation",
    "new_message": "chat",
    "error": "error",
    "end": "end",
}


def to_wire(payload: dict) -> dict:
    doc = dict(payload)
    doc["type"] = WIRE_TYPES.get(payload.get("kind"), "observation")
    doc["protocol_version"] = PROTOCOL_VERSION
    return doc


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="tandem", version=__version__)
    base = Path(data_dir or os.environ.get("TANDEM_DATA_DIR") or tempfile.gettempdir()) / "tandem_sessions"
    base.mkdir(parents=True, exist_ok=True)
    sessions: dict[str, LiveSession] = {}
    app.state.sessions = sessions
    app.state.data_dir = base

    def get_session(session_id: str) -> LiveSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    def check_token(session: LiveSession, token: str | None) -> None:
        if token != session.token:
            raise HTTPException(403, "bad or missing session token")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "protocol_version": PROTOCOL_VERSION}

    @app.get("/meta/rating-labels")
    def rating_labels() -> dict:
        return {"outcome": OUTCOME_LABELS, "satisfaction": SATISFACTION_LABELS}

    @app.get("/tasks")
    def tasks() -> list[TaskInfo]:
        out = []
        for task_id in available_tasks():
            instances = builtin_instances(task_id)
            if not instances:
                continue
            env = make_environment(instances[0])
            out.append(
                TaskInfo(
                    task_id=task_id,
                    description=env.spec.task_description,
                    step_limit=env.spec.step_limit,
                    actions=[
                        {"name": s.name, "signature": signature(s), "description": s.description}
                        for s in env.grammar()
                    ],
                    observation_schema=[
                        {"name": c.name, "visibility": c.visibility}
                        for c in env.spec.observation_schema
                    ],
                    instances=[
                        {"instance_id": i.instance_id, "query": i.query} for i in instances
                    ],
                )
            )
        return out

    @app.post("/sessions", response_model=SessionCreated)
    def create_session(req: CreateSessionRequest) -> SessionCreated:
        try:
            session = LiveSession(req, base)
        except (TandemError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        sessions[session.session_id] = session
        env = session.env
        return SessionCreated(
            session_id=session.session_id,
            token=session.token,
            human_role=session.human_role,
            agent_role=session.agent_role,
            mode=req.mode,
            ws_path=f"/ws/{session.session_id}",
            task_id=env.spec.task_id,
            query=env.instance.query,
            hidden_info=list(env.instance.hidden_info),
            action_menu=[
                {"name": s.name, "signature": signature(s), "description": s.description}
                for s in env.grammar()
            ],
            observation_schema=[
                {"name": c.name, "visibility": c.visibility}
                for c in env.spec.observation_schema
            ],
        )

    @app.get("/sessions/{session_id}", response_model=SessionStatus)
    def session_status(session_id: str) -> SessionStatus:
        session = get_session(session_id)
        return SessionStatus(
            session_id=session_id,
            done=session.envnode.ended,
            delivered=bool(session.env.editor_text() and session.env.editor_text().strip()),
            counted_actions=session.env.state.agent_action_count,
            step_limit=session.env.spec.step_limit,
            chat_length=len(session.envnode.chat),
            mode=session.config.mode,
            current_turn=session.current_turn,
        )

    @app.get("/sessions/{session_id}/observation")
    def observation(session_id: str, role: str, x_session_token: str | None = Header(None)) -> dict:
        session = get_session(session_id)
        check_token(session, x_session_token)
        try:
            return to_wire(session.snapshot(role))
        except TandemError as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.post("/sessions/{session_id}/actions", response_model=ActionAccepted)
    def post_action(
        session_id: str, req: ActionRequest, x_session_token: str | None = Header(None)
    ) -> ActionAccepted:
        session = get_session(session_id)
        check_token(session, x_session_token)
        try:
            payload = session.submit_action(req.role, req.action)
        except TandemError as exc:
            raise HTTPException(400, str(exc)) from exc
        return ActionAccepted(accepted=payload.get("kind") != "error", payload=to_wire(payload))

    @app.post("/sessions/{session_id}/tick")
    def post_tick(session_id: str, x_session_token: str | None = Header(None)) -> dict:
        session = get_session(session_id)
        check_token(session, x_session_token)
        session.tick()
        return {"ticks": session._ticks}

    @app.post("/sessions/{session_id}/ratings")
    def post_ratings(
        session_id: str, req: RatingRequest, x_session_token: str | None = Header(None)
    ) -> dict:
        session = get_session(session_id)
        check_token(session, x_session_token)
        session.ratings = req.model_dump(exclude_none=True)
        return {"stored": True}

    @app.post("/sessions/{session_id}/end", response_model=EndSessionResponse)
    def end_session(session_id: str, x_session_token: str | None = Header(None)) -> EndSessionResponse:
        session = get_session(session_id)
        check_token(session, x_session_token)
        trajectory, path = session.finalize()
        metrics = evaluate_trajectory(trajectory)
        return EndSessionResponse(
            session_id=session_id,
            done=trajectory.final["done"],
            delivered=metrics.delivered,
            reward=trajectory.final["reward"],
            trajectory_path=str(path),
            metrics=metrics.to_json(),
        )

    @app.get("/sessions/{session_id}/trajectory")
    def get_trajectory(session_id: str, x_session_token: str | None = Header(None)) -> dict:
        session = get_session(session_id)
        check_token(session, x_session_token)
        trajectory, path = session.finalize()
        return {"path": str(path), "jsonl": trajectory.dumps()}

    def _load_from_request(req: EvaluateRequest) -> Trajectory:
        if req.trajectory:
            with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as fh:
                fh.write(req.trajectory)
                tmp = fh.name
            try:
                return load_trajectory(tmp)
            finally:
                os.unlink(tmp)
        if req.path:
            return load_trajectory(req.path)
        raise HTTPException(400, "give trajectory text or a path")

    @app.post("/evaluate")
    def evaluate(req: EvaluateRequest) -> dict:
        try:
            traj = _load_from_request(req)
            traj.verify()
            return evaluate_trajectory(traj).to_json()
        except TamperedTrajectoryError as exc:
            raise HTTPException(422, str(exc)) from exc
        except (FixtureError, json.JSONDecodeError) as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.post("/replay", response_model=ReplayResponse)
    def replay(req: EvaluateRequest) -> ReplayResponse:
        try:
            traj = _load_from_request(req)
            report = replay_trajectory(traj)
        except TamperedTrajectoryError as exc:
            raise HTTPException(422, f"tampered at event {exc.index}: {exc}") from exc
        except ReplayDivergenceError as exc:
            raise HTTPException(409, f"diverged at event {exc.index}") from exc
        except (FixtureError, json.JSONDecodeError) as exc:
            raise HTTPException(400, str(exc)) from exc
        return ReplayResponse(
            matched=report.matched, events=report.events, final_digest=report.final_digest
        )

    @app.websocket("/ws/{session_id}")
    async def ws_session(websocket: WebSocket, session_id: str, token: str = "", role: str = ""):
        session = sessions.get(session_id)
        if session is None or token != session.token:
            await websocket.close(code=4403)
            return
        role = role or session.human_role
        try:
            inbox = session.listen(role)
        except TandemError:
            await websocket.close(code=4400)
            return
        await websocket.accept()
        await websocket.send_json(to_wire(session.snapshot(role)))

        async def pump_outgoing():
            while True:
                try:
                    payload = await asyncio.to_thread(inbox.get, True, 0.1)
                except queue.Empty:
                    continue
                await websocket.send_json(to_wire(payload))

        pump = asyncio.create_task(pump_outgoing())
        try:
            while True:
                doc = await websocket.receive_json()
                mtype = doc.get("type")
                if mtype == "action":
                    await asyncio.to_thread(session.submit_action, role, str(doc.get("action", "")))
                elif mtype == "rating":
                    try:
                        rating = RatingRequest(**{k: v for k, v in doc.items() if k not in ("type", "protocol_version")})
                    except ValueError:
                        await websocket.send_json(
                            {"type": "error", "protocol_version": PROTOCOL_VERSION, "error": "bad rating"}
                        )
                        continue
                    session.ratings = rating.model_dump(exclude_none=True)
                else:
                    await websocket.send_json(
                        {"type": "error", "protocol_version": PROTOCOL_VERSION, "error": f"unknown type {mtype!r}"}
                    )
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()

    return app


app = create_app()
