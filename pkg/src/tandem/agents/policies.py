"""Agent policy architectures.

Three ways to drive an agent from a text backend:

- ``AutonomousPolicy``: task actions only, no chat; plows ahead alone.
- ``CollaborativePolicy``: one prompt over the union of task actions and the
  collaboration acts, so the model decides inline whether to talk or act.
- ``SituationalPolicy``: staged deciding; first update a private notepad,
  then pick the kind of move (message, task action, or stay quiet), then
  generate the action within the chosen kind.

Every stage tolerates one malformed completion: the prompt is retried once
with the parse failure attached, and if that also fails the policy falls back
to a wait (or leaves the notepad untouched), so a bad model turn can never
wedge a session.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from tandem.envs.actions import (
    COLLABORATION_ACTS,
    SEND_TEAMMATE_MESSAGE,
    WAIT_TEAMMATE_CONTINUE,
    ActionSpec,
    parse_action,
)
from tandem.envs.core import TaskEnvironment
from tandem.errors import AmbiguousActionError, InvalidActionError
from tandem.agents.prompts import (
    extract_action_line,
    load_template,
    render_chat,
    render_history,
    render_menu,
    render_observation,
)
from tandem.agents.scratchpad import SCRATCHPAD_OPS, Scratchpad
from tandem.nodes.backends import TextBackend
from tandem.nodes.base import DecisionContext

WAIT_WIRE = WAIT_TEAMMATE_CONTINUE.render()

PLAN_MESSAGE = "message"
PLAN_ACTION = "action"
PLAN_NOTHING = "nothing"

_PLAN_WORDS = {"1": PLAN_MESSAGE, "2": PLAN_ACTION, "3": PLAN_NOTHING}
_PLAN_NOTES = {
    PLAN_MESSAGE: "send a message to your teammate",
    PLAN_ACTION: "take a task action in the workspace",
}


@dataclass(frozen=True)
class AgentProfile:
    """What an agent is allowed to know about the session.

    Built from the environment spec and the instance query only; whatever the
    human side privately knows is not here and can only arrive through chat.
    """

    role: str
    team_members: tuple[str, ...]
    task_description: str
    query: str
    task_actions: tuple[ActionSpec, ...]

    @classmethod
    def from_env(cls, env: TaskEnvironment, role: str) -> "AgentProfile":
        return cls(
            role=role,
            team_members=env.roles(),
            task_description=env.spec.task_description,
            query=env.instance.query,
            task_actions=env.spec.action_specs,
        )


def _base_fields(profile: AgentProfile, ctx: DecisionContext) -> dict[str, str]:
    error_note = ""
    if ctx.error:
        error_note = f"\nYour previous action failed: {ctx.error}\n"
    return {
        "role": profile.role,
        "team_members": ", ".join(profile.team_members),
        "task_description": profile.task_description,
        "query": profile.query,
        "observation": render_observation(ctx.observation),
        "chat_history": render_chat(ctx.chat),
        "history": render_history(ctx.history),
        "wake_kind": ctx.kind,
        "error_note": error_note,
    }


def parse_plan(reply: str) -> str | None:
    """Accepts a digit or the option's words, case-insensitive."""
    line = extract_action_line(reply, marker="Plan:")
    norm = line.lower()
    digit = re.search(r"\b([123])\b", norm)
    if digit:
        return _PLAN_WORDS[digit.group(1)]
    for phrase, plan in (
        ("send a message", PLAN_MESSAGE),
        ("take a task action", PLAN_ACTION),
        ("do nothing", PLAN_NOTHING),
        ("message", PLAN_MESSAGE),
        ("nothing", PLAN_NOTHING),
        ("action", PLAN_ACTION),
    ):
        if phrase in norm:
            return plan
    return None


class _OneRetry:
    """Shared complete-parse-retry loop."""

    def __init__(self, backend: TextBackend):
        self.backend = backend

    def attempt(self, prompt: str, parse, failure_hint: str):
        reply = self.backend.complete(prompt)
        result = parse(reply)
        if result is not None:
            return result
        retry = (
            f"{prompt}\n\nYour previous reply could not be used:\n{reply}\n{failure_hint}"
        )
        return parse(self.backend.complete(retry))


def _grammar_parser(grammar: tuple[ActionSpec, ...]):
    def parse(reply: str) -> str | None:
        raw = extract_action_line(reply)
        try:
            return parse_action(raw, grammar).render()
        except (InvalidActionError, AmbiguousActionError):
            return None

    return parse


class AutonomousPolicy:
    """Heads-down agent: no chat, just task actions until done."""

    def __init__(self, profile: AgentProfile, backend: TextBackend):
        self.profile = profile
        self.backend = backend
        self.template = load_template("system_autonomous.txt")
        self._retry = _OneRetry(backend)

    def __call__(self, ctx: DecisionContext) -> str | None:
        fields = _base_fields(self.profile, ctx)
        fields["action_menu"] = render_menu(self.profile.task_actions)
        prompt = self.template.format(**fields)
        action = self._retry.attempt(
            prompt,
            _grammar_parser(self.profile.task_actions),
            "End with exactly one 'Action:' line from the menu.",
        )
        return action if action is not None else WAIT_WIRE


class CollaborativePolicy:
    """Single-prompt agent over the union of task and collaboration acts."""

    def __init__(self, profile: AgentProfile, backend: TextBackend):
        self.profile = profile
        self.backend = backend
        self.template = load_template("system_collaborative.txt")
        self.grammar = profile.task_actions + COLLABORATION_ACTS
        self._retry = _OneRetry(backend)

    def __call__(self, ctx: DecisionContext) -> str | None:
        fields = _base_fields(self.profile, ctx)
        fields["action_menu"] = render_menu(self.grammar)
        prompt = self.template.format(**fields)
        action = self._retry.attempt(
            prompt,
            _grammar_parser(self.grammar),
            "End with exactly one 'Action:' line from the menu.",
        )
        return action if action is not None else WAIT_WIRE


class SituationalPolicy:
    """Notepad update, then move choice, then constrained generation."""

    def __init__(
        self,
        profile: AgentProfile,
        backend: TextBackend,
        scratchpad: Scratchpad | None = None,
    ):
        self.profile = profile
        self.backend = backend
        self.scratchpad = scratchpad or Scratchpad()
        self.t_update = load_template("scratchpad_update.txt")
        self.t_plan = load_template("plan_choice.txt")
        self.t_generate = load_template("action_generation.txt")
        self._retry = _OneRetry(backend)

    def __call__(self, ctx: DecisionContext) -> str | None:
        fields = _base_fields(self.profile, ctx)
        fields["scratchpad"] = self.scratchpad.render()
        self._update_notes(fields)
        fields["scratchpad"] = self.scratchpad.render()

        plan = self._retry.attempt(
            self.t_plan.format(**fields),
            parse_plan,
            "End with exactly one 'Plan:' line choosing 1, 2 or 3.",
        )
        if plan is None:
            return WAIT_WIRE
        if plan == PLAN_NOTHING:
            return None  # deliberately idle: publish nothing at all

        menu = (SEND_TEAMMATE_MESSAGE,) if plan == PLAN_MESSAGE else self.profile.task_actions
        fields["plan_note"] = _PLAN_NOTES[plan]
        fields["action_menu"] = render_menu(menu)
        action = self._retry.attempt(
            self.t_generate.format(**fields),
            _grammar_parser(menu),
            "End with exactly one 'Action:' line from the menu.",
        )
        return action if action is not None else WAIT_WIRE

    def _update_notes(self, fields: dict[str, str]) -> None:
        def parse(reply: str) -> bool | None:
            raw = extract_action_line(reply)
            return True if self.scratchpad.apply_raw(raw) else None

        fields["op_menu"] = render_menu(SCRATCHPAD_OPS)
        self._retry.attempt(
            self.t_update.format(**fields),
            parse,
            "End with exactly one 'Action:' line using the operations listed.",
        )
