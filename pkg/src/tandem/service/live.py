"""Live sessions: one environment, a policy-driven agent, and a real person.

The person is not a node here; their client (websocket or plain HTTP) injects
envelopes through :meth:`LiveSession.submit_action` and receives that role's
notification payloads.  Everything else reuses the batch wiring, so a live
session leaves behind exactly the same trajectory format as a scripted one.
"""

from __future__ import annotations

import queue
import secrets
import threading
import uuid
from pathlib import Path

from tandem.bus.base import END, STEP, TICK, obs_channel
from tandem.bus.envnode import EnvNode
from tandem.bus.inprocess import InProcessBus
from tandem.envs.core import TaskEnvironment
from tandem.envs.registry import load_instance, make_environment
from tandem.harness.session import SessionConfig, _node_config, apply_overrides
from tandem.harness.trajectory import Trajectory, TrajectoryWriter
from tandem.agents.policies import (
    AgentProfile,
    AutonomousPolicy,
    CollaborativePolicy,
    SituationalPolicy,
)
from tandem.nodes.backends import HttpBackend, ReplayBackend, ScriptedBackend
from tandem.nodes.base import ScriptedPolicy, TeamNode
from tandem.service.schemas import BackendSpec, CreateSessionRequest


def build_backend(spec: BackendSpec):
    if spec.kind == "scripted":
        return ScriptedBackend(rules=list(spec.rules), default=spec.default)
    if spec.kind == "replay":
        if not spec.transcript_path:
            raise ValueError("replay backend needs transcript_path")
        return ReplayBackend.from_file(spec.transcript_path)
    if not spec.base_url or not spec.model:
        raise ValueError("http backend needs base_url and model")
    return HttpBackend(spec.base_url, spec.model, api_key=spec.api_key)


def build_agent_policy(kind: str, env: TaskEnvironment, role: str, req: CreateSessionRequest):
    if kind == "scripted":
        return ScriptedPolicy(req.agent_script)
    profile = AgentProfile.from_env(env, role)
    backend = build_backend(req.backend)
    if kind == "autonomous":
        return AutonomousPolicy(profile, backend)
    if kind == "situational":
        return SituationalPolicy(profile, backend)
    return CollaborativePolicy(profile, backend)


class LiveSession:
    def __init__(self, req: CreateSessionRequest, data_dir: Path):
        if req.instance is None and req.instance_ref is None:
            raise ValueError("give either an inline instance or an instance_ref")
        if req.instance is not None:
            from tandem.envs.core import TaskInstance

            instance = TaskInstance.from_json(req.instance)
        else:
            instance = load_instance(req.instance_ref)

        self.session_id = f"live-{uuid.uuid4().hex[:12]}"
        self.token = secrets.token_hex(16)
        self.data_dir = data_dir
        self.human_role = req.human_role
        self.agent_role = req.agent_role if req.agent_policy != "none" else None
        self.request = req

        self.config = SessionConfig(
            instance=instance,
            session_id=self.session_id,
            mode=req.mode,
            max_ticks=req.max_ticks,
            idle_threshold=req.idle_threshold,
            step_limit=req.step_limit,
        )
        self.bus = InProcessBus()
        self.env = make_environment(instance)
        apply_overrides(self.env, self.config)
        self._writer = TrajectoryWriter(
            {
                "session_id": self.session_id,
                "config": self.config.to_json(),
                "team": [{"role": m.role, "kind": m.kind} for m in self.env.team],
            }
        )
        self.envnode = EnvNode(
            self.env, self.bus, config=_node_config(self.config), recorder=self._writer.record_event
        )
        self.agent_node: TeamNode | None = None
        if self.agent_role is not None:
            policy = build_agent_policy(req.agent_policy, self.env, self.agent_role, req)
            self.agent_node = TeamNode(
                role=self.agent_role, policy=policy, bus=self.bus,
                max_actions=self.config.node_action_cap,
            )

        self.ratings: dict | None = None
        self.trajectory: Trajectory | None = None
        self._subscribers: list[queue.Queue] = []
        self._lock = threading.Lock()
        self._ticks = 0
        self._ticker: threading.Thread | None = None
        self._closed = threading.Event()

        self.bus.subscribe(END, self._fanout_end)
        self.envnode.start()
        if req.tick_seconds > 0:
            self._ticker = threading.Thread(target=self._tick_loop, daemon=True)
            self._ticker.start()

    # -- client plumbing -----------------------------------------------------

    def listen(self, role: str) -> queue.Queue:
        """Queue of this role's payloads; one queue per websocket."""
        self.env.member(role)
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        self.bus.subscribe(obs_channel(role), q.put)
        return q

    def _fanout_end(self, payload: dict) -> None:
        with self._lock:
            sinks = list(self._subscribers)
        for q in sinks:
            q.put(payload)

    def submit_action(self, role: str, action: str) -> dict:
        """Inject an envelope and return the actor's resulting payload."""
        self.env.member(role)
        box: list[dict] = []
        self.bus.subscribe(obs_channel(role), box.append)
        self.bus.subscribe(END, box.append)
        try:
            # the in-process bus runs the whole cascade before publish returns
            self.bus.publish(STEP, {"role": role, "action": action})
        finally:
            self.bus.unsubscribe(obs_channel(role), box.append)
            self.bus.unsubscribe(END, box.append)
        return box[0] if box else self.snapshot(role)

    def tick(self) -> None:
        self._ticks += 1
        self.bus.publish(TICK, {"now": self._ticks})

    def _tick_loop(self) -> None:
        while not self._closed.wait(self.request.tick_seconds):
            if self.envnode.ended or self._ticks >= self.config.max_ticks:
                return
            self.tick()

    def snapshot(self, role: str) -> dict:
        return self.envnode._snapshot(role, "shared_update")

    @property
    def current_turn(self) -> str | None:
        if self.config.mode != "turn_taking":
            return None
        return self.envnode.current_turn

    def finalize(self) -> tuple[Trajectory, Path]:
        with self._lock:
            if self.trajectory is None:
                self._closed.set()
                final = {
                    "digest": self.env.digest(),
                    "done": self.envnode.ended,
                    "reward": self.env.final_reward() if self.envnode.ended else 0.0,
                    "counted_actions": self.env.state.agent_action_count,
                    "editor": self.env.editor_text(),
                    "chat": list(self.envnode.chat),
                    "ticks": self._ticks,
                    "events": self.envnode.event_index,
                }
                if self.ratings is not None:
                    final["ratings"] = self.ratings
                self.trajectory = self._writer.finalize(final)
        path = self.data_dir / f"{self.session_id}.jsonl"
        self.trajectory.save(path)
        return self.trajectory, path
