"""Team-member nodes: subscribe to your own observation channel, decide, act.

A node never touches the environment directly; it publishes action envelopes
to the ``step`` channel and reacts to the snapshots that come back.  The
policy is a plain callable so scripted sequences, rule machines and LM-backed
agents all plug in the same way.  Returning ``None`` means "stay quiet",
which is what lets event cascades settle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from tandem.bus.base import END, STEP, MessageBus, obs_channel


@dataclass(frozen=True)
class DecisionContext:
    """Everything a policy may look at when deciding the next action."""

    role: str
    kind: str  # payload kind that woke the node
    observation: dict  # this role's component snapshot
    chat: list[dict]
    timestamp: int
    error: str | None = None
    history: tuple[str, ...] = ()  # actions this node already published

    def last_message(self) -> dict | None:
        return self.chat[-1] if self.chat else None

    def last_message_from_other(self) -> dict | None:
        for entry in reversed(self.chat):
            if entry["sender"] != self.role:
                return entry
        return None


class Policy(Protocol):
    def __call__(self, ctx: DecisionContext) -> str | None: ...


@dataclass
class TeamNode:
    """Wires a policy to the bus under a fixed role."""

    role: str
    policy: Policy
    bus: MessageBus
    max_actions: int | None = None
    finished: bool = field(default=False, init=False)
    history: list[str] = field(default_factory=list, init=False)
    wakes: int = field(default=0, init=False)

    def __post_init__(self):
        self.bus.subscribe(obs_channel(self.role), self.handle_payload)
        self.bus.subscribe(END, self.handle_end)

    def handle_end(self, payload: dict) -> None:
        self.finished = True

    def handle_payload(self, payload: dict) -> None:
        if self.finished:
            return
        if self.max_actions is not None and len(self.history) >= self.max_actions:
            return
        self.wakes += 1
        ctx = DecisionContext(
            role=self.role,
            kind=payload.get("kind", ""),
            observation=payload.get("observation", {}),
            chat=list(payload.get("chat", ())),
            timestamp=payload.get("timestamp", 0),
            error=payload.get("error"),
            history=tuple(self.history),
        )
        action = self.policy(ctx)
        if action is None:
            return
        self.history.append(action)
        self.bus.publish(STEP, {"role": self.role, "action": action})


class ScriptedPolicy:
    """Plays a fixed sequence of actions, one per wake, then goes quiet.

    ``only_kinds`` restricts which wake kinds advance the script, so a
    scripted run is not perturbed by extra nudges (idle ticks, errors).
    """

    def __init__(self, actions: list[str], only_kinds: tuple[str, ...] | None = None):
        self.actions = list(actions)
        self.only_kinds = only_kinds
        self._next = 0

    def __call__(self, ctx: DecisionContext) -> str | None:
        if self.only_kinds is not None and ctx.kind not in self.only_kinds:
            return None
        if ctx.error is not None:
            return None  # scripted runs stop probing after a failure
        if self._next >= len(self.actions):
            return None
        action = self.actions[self._next]
        self._next += 1
        return action


QuietPolicy: Callable[[DecisionContext], None] = lambda ctx: None
