"""The environment's event handler: sole mutator of a task environment.

Every team member publishes action envelopes ``{"role": ..., "action": raw}``
to the ``step`` channel; this node applies them one at a time and routes
notifications:

- a wait produces no notifications at all;
- a teammate message appends to the chat and notifies every member,
  including the sender;
- a task action that only touched the actor's private components notifies
  the actor alone, anything else notifies every member;
- completion publishes exactly one payload on the ``end`` channel and
  nothing else;
- failures (unparseable, out of turn, semantically invalid) go back to the
  sender alone as an error payload and leave the environment untouched.

Notification payloads are full snapshots, so a recipient never needs history
to render: ``{"kind", "role", "observation", "chat", "timestamp"}`` where
``observation`` is the recipient's own view.

Idleness is measured in clock ticks since the last ``step`` traffic; once it
crosses the threshold every member is nudged with an ``idle_tick`` payload so
somebody can pick the work back up.

The optional strict turn-taking mode is the ablation switch: actions out of
turn are rejected (non-fatally), a wait passes the turn, only the next party
is nudged after each accepted action, and idle broadcasts are disabled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from tandem.bus.base import END, STEP, TICK, MessageBus, obs_channel
from tandem.envs.actions import KIND_MESSAGE, KIND_WAIT, as_collaboration_act, parse_action
from tandem.envs.core import AGENT, HUMAN, TaskEnvironment
from tandem.errors import (
    ActionNotPermittedError,
    AmbiguousActionError,
    EpisodeFinishedError,
    InvalidActionError,
    SemanticActionError,
    UnknownRoleError,
)

SHARED_UPDATE = "shared_update"
PRIVATE_UPDATE = "private_update"
NEW_MESSAGE = "new_message"
IDLE_TICK = "idle_tick"
ERROR = "error"
END_KIND = "end"

APPLIED = "applied"
REJECTED = "rejected"
FAILED = "error"

Recorder = Callable[[dict], None]


@dataclass(frozen=True)
class EnvNodeConfig:
    idle_threshold: int = 3  # ticks of step-channel silence before the idle nudge
    idle_rebroadcast: bool = True  # keep nudging every tick while still idle
    turn_taking: bool = False
    turn_order: tuple[str, ...] | None = None  # default: humans first, then agents


class EnvNode:
    def __init__(
        self,
        env: TaskEnvironment,
        bus: MessageBus,
        config: EnvNodeConfig | None = None,
        recorder: Recorder | None = None,
    ):
        self.env = env
        self.bus = bus
        self.config = config or EnvNodeConfig()
        self.recorder = recorder
        self.chat: list[dict] = []
        self.clock = 0
        self.idle_ticks = 0
        self.ended = False
        self.event_index = 0
        self._turn_order = self._resolve_turn_order()
        self._turn_idx = 0
        bus.subscribe(STEP, self.handle_step)
        bus.subscribe(TICK, self.handle_tick)

    def _resolve_turn_order(self) -> tuple[str, ...]:
        if self.config.turn_order is not None:
            return self.config.turn_order
        humans = [m.role for m in self.env.team if m.kind == HUMAN]
        agents = [m.role for m in self.env.team if m.kind == AGENT]
        return tuple(humans + agents)

    @property
    def current_turn(self) -> str:
        return self._turn_order[self._turn_idx % len(self._turn_order)]

    def start(self) -> None:
        """Publish the initial snapshots that kick the session off."""
        if self.config.turn_taking:
            self._notify([self.current_turn], SHARED_UPDATE)
        else:
            self._notify(self.env.roles(), SHARED_UPDATE)

    # -- step channel ----------------------------------------------------------

    def handle_step(self, payload: dict) -> None:
        self.clock += 1
        self.idle_ticks = 0  # any traffic counts as activity
        role = str(payload.get("role", ""))
        raw = str(payload.get("action", ""))
        index = self.event_index
        self.event_index += 1

        if self.ended:
            self._error(role, "the episode has already ended")
            self._record(index, role, raw, FAILED, "episode ended")
            return
        try:
            self.env.member(role)
        except UnknownRoleError as exc:
            self._error(role, str(exc))
            self._record(index, role, raw, FAILED, str(exc))
            return

        try:
            parsed = parse_action(raw, list(self.env.grammar()))
        except (InvalidActionError, AmbiguousActionError) as exc:
            self._error(role, str(exc))
            self._record(index, role, raw, FAILED, str(exc))
            return

        if self.config.turn_taking and role != self.current_turn:
            detail = f"not your turn (waiting on {self.current_turn})"
            self._error(role, detail)
            self._record(index, role, raw, REJECTED, detail)
            return

        act = as_collaboration_act(parsed)
        if act is not None and act.kind == KIND_WAIT:
            if self.config.turn_taking:
                self._advance_turn(SHARED_UPDATE)
            self._record(index, role, raw, APPLIED, "wait")
            return

        if act is not None and act.kind == KIND_MESSAGE:
            self.chat.append({"sender": role, "message": act.message, "timestamp": self.clock})
            done = self.env.charge_collaboration_act(role, act.kind)
            if self.config.turn_taking:
                self._advance_turn(NEW_MESSAGE)
            else:
                self._notify(self.env.roles(), NEW_MESSAGE)
            if done:
                self._finish(role, self.env.final_reward())
            self._record(index, role, raw, APPLIED, "message")
            return

        try:
            result = self.env.step(role, parsed)
        except (
            SemanticActionError,
            ActionNotPermittedError,
            InvalidActionError,
            EpisodeFinishedError,
        ) as exc:
            self._error(role, str(exc))
            self._record(index, role, raw, FAILED, str(exc))
            return

        if result.done:
            self._finish(role, result.reward)
        elif self.config.turn_taking:
            self._advance_turn(SHARED_UPDATE)
        elif result.private:
            self._notify([role], PRIVATE_UPDATE)
        else:
            self._notify(self.env.roles(), SHARED_UPDATE)
        self._record(index, role, raw, APPLIED, "step", reward=result.reward)

    # -- tick channel ----------------------------------------------------------

    def handle_tick(self, payload: dict) -> None:
        self.clock += 1
        if self.ended or self.config.turn_taking:
            return
        self.idle_ticks += 1
        if self.idle_ticks < self.config.idle_threshold:
            return
        if self.idle_ticks > self.config.idle_threshold and not self.config.idle_rebroadcast:
            return
        self._notify(self.env.roles(), IDLE_TICK)

    # -- helpers ---------------------------------------------------------------

    def _advance_turn(self, kind: str) -> None:
        self._turn_idx += 1
        self._notify([self.current_turn], kind)

    def _snapshot(self, role: str, kind: str, **extra: Any) -> dict:
        doc = {
            "kind": kind,
            "role": role,
            "observation": self.env.observation_view(role).components,
            "chat": list(self.chat),
            "timestamp": self.clock,
        }
        doc.update(extra)
        return doc

    def _notify(self, roles, kind: str) -> None:
        for role in roles:
            self.bus.publish(obs_channel(role), self._snapshot(role, kind))

    def _error(self, role: str, message: str) -> None:
        try:
            doc = self._snapshot(role, ERROR, error=message)
        except UnknownRoleError:
            # non-members still get the rejection, just without a view
            doc = {
                "kind": ERROR,
                "role": role,
                "observation": {},
                "chat": list(self.chat),
                "timestamp": self.clock,
                "error": message,
            }
        self.bus.publish(obs_channel(role), doc)

    def _finish(self, role: str, reward: float) -> None:
        if self.ended:
            return
        self.ended = True
        self.bus.publish(
            END,
            self._snapshot(role, END_KIND, reward=reward, digest=self.env.digest()),
        )

    def _record(self, index: int, role: str, raw: str, status: str, detail: str, reward: float = 0.0) -> None:
        if self.recorder is None:
            return
        self.recorder(
            {
                "index": index,
                "timestamp": self.clock,
                "role": role,
                "action": raw,
                "status": status,
                "detail": detail,
                "reward": reward,
                "done": self.env.state.done,
                "digest": self.env.digest(),
            }
        )
