"""Simulated teammate standing in for a person.

The human side of a session is modeled as a brain choosing among five moves:
answer a question, volunteer feedback, take a task action directly, do
nothing, or declare the task finished.  The node maps those onto the wire
grammar.  Crucially, the brain sees the task instance including its
``hidden_info``; agent policies never do, they can only learn it through
chat.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Protocol

from tandem.bus.base import MessageBus
from tandem.envs.actions import (
    FINISH,
    SEND_TEAMMATE_MESSAGE,
    WAIT_TEAMMATE_CONTINUE,
    ActionSpec,
    Parameter,
    parse_action,
)
from tandem.envs.core import TaskInstance, render_component_text
from tandem.errors import InvalidActionError, AmbiguousActionError
from tandem.nodes.backends import TextBackend
from tandem.nodes.base import DecisionContext, TeamNode

ANSWER = "answer_question"
FEEDBACK = "provide_feedback"
TASK = "take_task_action"
NOTHING = "do_nothing"
DONE = "finish"


@dataclass(frozen=True)
class HumanAction:
    kind: str
    text: str = ""


# output grammar for LM-backed brains
HUMAN_ACTS: tuple[ActionSpec, ...] = (
    ActionSpec.build("AnswerQuestion", [Parameter("message")], "Reply to your teammate's question."),
    ActionSpec.build("ProvideFeedback", [Parameter("message")], "Volunteer guidance or a correction."),
    ActionSpec.build("TakeTaskAction", [Parameter("action")], "Perform one task action yourself."),
    ActionSpec.build("DoNothing", [], "Stay quiet for now."),
    ActionSpec.build("Finish", [], "Declare the task complete."),
)

_ACT_KINDS = {
    "AnswerQuestion": ANSWER,
    "ProvideFeedback": FEEDBACK,
    "TakeTaskAction": TASK,
    "DoNothing": NOTHING,
    "Finish": DONE,
}


def to_wire(action: HumanAction, pass_turn_when_idle: bool = False) -> str | None:
    """Map a human move onto the session grammar; ``None`` publishes nothing."""
    if action.kind in (ANSWER, FEEDBACK):
        return SEND_TEAMMATE_MESSAGE.render(message=action.text)
    if action.kind == TASK:
        return action.text
    if action.kind == DONE:
        return FINISH.render()
    if action.kind == NOTHING:
        return WAIT_TEAMMATE_CONTINUE.render() if pass_turn_when_idle else None
    raise ValueError(f"unknown human action kind {action.kind!r}")


class HumanBrain(Protocol):
    def decide(self, ctx: DecisionContext, instance: TaskInstance) -> HumanAction: ...


def _tokens(text: str) -> set[str]:
    return set(re.findall(r"[a-z0-9$]+", text.lower()))


class RuleBrain:
    """Deterministic brain for tests and scripted studies.

    Answers questions by picking the hidden-info entry with the largest token
    overlap, nudges once when the session goes idle with an empty editor, and
    otherwise stays quiet.  No randomness anywhere, so sessions replay
    byte-identically.
    """

    def __init__(self, nudge: str = "Please keep going and write the current plan into the editor."):
        self.nudge = nudge
        self._seen: set[int] = set()
        self._nudged = False

    def decide(self, ctx: DecisionContext, instance: TaskInstance) -> HumanAction:
        msg = ctx.last_message_from_other()
        if msg is not None and msg["timestamp"] not in self._seen and "?" in msg["message"]:
            self._seen.add(msg["timestamp"])
            return HumanAction(ANSWER, self._answer(msg["message"], instance))
        if ctx.kind == "idle_tick" and not self._nudged:
            editor = ctx.observation.get("editor", "")
            if isinstance(editor, str) and not editor.strip():
                self._nudged = True
                return HumanAction(FEEDBACK, self.nudge)
        return HumanAction(NOTHING)

    @staticmethod
    def _answer(question: str, instance: TaskInstance) -> str:
        q = _tokens(question)
        best, best_score = None, 0
        for info in instance.hidden_info:
            score = len(q & _tokens(info))
            if score > best_score:
                best, best_score = info, score
        return best if best is not None else "No strong preference, use your judgment."


class ScriptedBrain:
    """Plays back a fixed list of human moves, one per wake."""

    def __init__(self, moves: list[HumanAction], only_kinds: tuple[str, ...] | None = None):
        self.moves = list(moves)
        self.only_kinds = only_kinds
        self._next = 0

    def decide(self, ctx: DecisionContext, instance: TaskInstance) -> HumanAction:
        if self.only_kinds is not None and ctx.kind not in self.only_kinds:
            return HumanAction(NOTHING)
        if self._next >= len(self.moves):
            return HumanAction(NOTHING)
        move = self.moves[self._next]
        self._next += 1
        return move


def _load_template(name: str) -> str:
    return resources.files("tandem.nodes").joinpath("resources", name).read_text()


class LMBrain:
    """Backend-driven brain; prompts include the persona and hidden context."""

    def __init__(self, backend: TextBackend):
        self.backend = backend
        self.template = _load_template("human_brain.txt")

    def decide(self, ctx: DecisionContext, instance: TaskInstance) -> HumanAction:
        prompt = self.render_prompt(ctx, instance)
        reply = self.backend.complete(prompt)
        action = self._parse(reply)
        if action is None:  # one repair pass, then stay quiet
            retry = (
                f"{prompt}\n\nYour previous reply could not be parsed:\n{reply}\n"
                "Reply again with exactly one action line."
            )
            action = self._parse(self.backend.complete(retry))
        return action if action is not None else HumanAction(NOTHING)

    def render_prompt(self, ctx: DecisionContext, instance: TaskInstance) -> str:
        observation = "\n".join(
            f"{name}:\n{render_component_text(name, value)}"
            for name, value in ctx.observation.items()
        )
        chat = "\n".join(f"[{m['sender']}] {m['message']}" for m in ctx.chat) or "(no messages)"
        hidden = "\n".join(f"- {h}" for h in instance.hidden_info) or "(none)"
        menu = "\n".join(f"- {spec.name}: {spec.description}" for spec in HUMAN_ACTS)
        return self.template.format(
            role=ctx.role,
            query=instance.query,
            hidden_info=hidden,
            observation=observation,
            chat_history=chat,
            wake_kind=ctx.kind,
            choices=menu,
        )

    @staticmethod
    def _parse(reply: str) -> HumanAction | None:
        raw = reply.strip()
        lines = [l.strip() for l in raw.splitlines() if l.strip()]
        for line in reversed(lines):
            if line.lower().startswith("action:"):
                raw = line.split(":", 1)[1].strip()
                break
        try:
            parsed = parse_action(raw, HUMAN_ACTS)
        except (InvalidActionError, AmbiguousActionError):
            return None
        kind = _ACT_KINDS[parsed.name]
        if kind in (ANSWER, FEEDBACK):
            return HumanAction(kind, parsed["message"])
        if kind == TASK:
            return HumanAction(kind, parsed["action"])
        return HumanAction(kind)


class HumanPolicy:
    """Adapts a brain to the node-policy interface."""

    def __init__(self, brain: HumanBrain, instance: TaskInstance, pass_turn_when_idle: bool = False):
        self.brain = brain
        self.instance = instance
        self.pass_turn_when_idle = pass_turn_when_idle

    def __call__(self, ctx: DecisionContext) -> str | None:
        move = self.brain.decide(ctx, self.instance)
        return to_wire(move, self.pass_turn_when_idle)


def make_human_node(
    role: str,
    brain: HumanBrain,
    instance: TaskInstance,
    bus: MessageBus,
    pass_turn_when_idle: bool = False,
    max_actions: int | None = None,
) -> TeamNode:
    policy = HumanPolicy(brain, instance, pass_turn_when_idle)
    return TeamNode(role=role, policy=policy, bus=bus, max_actions=max_actions)
