"""Request/response bodies and the gateway wire protocol.

Wire messages (both directions on the session websocket) always carry
``type`` and ``protocol_version``.  Server to client: ``observation``,
``chat``, ``error``, ``end``.  Client to server: ``action``, ``rating``.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

PROTOCOL_VERSION = 1

SATISFACTION_LABELS = {
    1: "Extremely dissatisfied",
    2: "Somewhat dissatisfied",
    3: "Neither satisfied nor dissatisfied",
    4: "Somewhat satisfied",
    5: "Extremely satisfied",
}

OUTCOME_LABELS = {
    1: "Far below what I needed",
    2: "Below what I needed",
    3: "Acceptable",
    4: "Good",
    5: "Exactly what I needed",
}


class BackendSpec(BaseModel):
    kind: Literal["scripted", "replay", "http"] = "scripted"
    rules: list[tuple[str, str]] = Field(default_factory=list)  # (substring, completion)
    default: str = "WAIT_TEAMMATE_CONTINUE()"
    transcript_path: str | None = None
    base_url: str | None = None
    model: str | None = None
    api_key: str | None = None


class CreateSessionRequest(BaseModel):
    instance: dict | None = None  # inline task instance document
    instance_ref: str | None = None  # "task_id/instance_id" or a JSON file path
    mode: Literal["async", "turn_taking"] = "async"
    agent_policy: Literal["collaborative", "autonomous", "situational", "scripted", "none"] = (
        "collaborative"
    )
    agent_script: list[str] = Field(default_factory=list)  # for agent_policy == "scripted"
    backend: BackendSpec = Field(default_factory=BackendSpec)
    human_role: str = "user"
    agent_role: str = "agent"
    step_limit: int | None = None
    idle_threshold: int = 3
    tick_seconds: float = 0.0  # 0 disables the background clock; use POST .../tick
    max_ticks: int = 10_000


class SessionCreated(BaseModel):
    session_id: str
    token: str
    human_role: str
    agent_role: str | None
    mode: str
    ws_path: str
    task_id: str
    query: str
    hidden_info: list[str]
    action_menu: list[dict]
    observation_schema: list[dict]  # [{"name", "visibility"}], drives UI panels
    protocol_version: int = PROTOCOL_VERSION


class SessionStatus(BaseModel):
    session_id: str
    done: bool
    delivered: bool
    counted_actions: int
    step_limit: int
    chat_length: int
    mode: str
    current_turn: str | None = None


class ActionRequest(BaseModel):
    role: str
    action: str


class ActionAccepted(BaseModel):
    accepted: bool
    payload: dict  # the actor's resulting snapshot (or error payload)


class RatingRequest(BaseModel):
    outcome: int = Field(ge=1, le=5)
    satisfaction: int = Field(ge=1, le=5)
    preference: Literal["this", "other"] | None = None
    comparison_session_id: str | None = None


class EndSessionResponse(BaseModel):
    session_id: str
    done: bool
    delivered: bool
    reward: float
    trajectory_path: str
    metrics: dict


class TaskInfo(BaseModel):
    task_id: str
    description: str
    step_limit: int
    actions: list[dict]
    observation_schema: list[dict]
    instances: list[dict]


class EvaluateRequest(BaseModel):
    trajectory: str | None = None  # raw JSONL
    path: str | None = None  # server-side file path


class ReplayResponse(BaseModel):
    matched: bool
    events: int
    final_digest: str
