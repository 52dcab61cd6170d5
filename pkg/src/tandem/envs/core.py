"""Dual-control task-environment contract.

A task environment is a shared workspace that several parties mutate through
role-aware steps: ``result = env.step(role, action)``.  Observation components
are either public (every party sees the same value) or private (each party
owns its own slice).  ``StepResult.private`` tells the coordination layer
whether the step touched only the actor's private components, which drives
who gets notified.

Environments are deterministic functions of (fixture data, state, action);
all concurrency is handled above this layer, by the session event handler,
which is the sole mutator of an environment instance.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from tandem.envs.actions import (
    COLLABORATION_ACTS,
    FINISH,
    KIND_MESSAGE,
    ActionSpec,
    ParsedAction,
    parse_action,
)
from tandem.errors import (
    ActionNotPermittedError,
    EpisodeFinishedError,
    UnknownRoleError,
)

PUBLIC = "public"
PRIVATE = "private"

AGENT = "agent"
HUMAN = "human"


@dataclass(frozen=True)
class ComponentSpec:
    """One observation component and who may see it."""

    name: str
    visibility: str  # PUBLIC or PRIVATE (private = per-role slice)

    def __post_init__(self):
        if self.visibility not in (PUBLIC, PRIVATE):
            raise ValueError(f"{self.name}: visibility must be public or private")


@dataclass(frozen=True)
class TeamMember:
    role: str
    kind: str = AGENT  # AGENT or HUMAN

    def __post_init__(self):
        if self.kind not in (AGENT, HUMAN):
            raise ValueError(f"{self.role}: kind must be agent or human")


DEFAULT_TEAM: tuple[TeamMember, ...] = (TeamMember("agent", AGENT), TeamMember("user", HUMAN))


@dataclass(frozen=True)
class TaskEnvironmentSpec:
    """Declarative description of a task environment.

    ``step_limit`` bounds the number of *counted* actions; by default only
    agent roles are counted, and teammate messages count while waits do not.
    Both knobs are configurable per spec because different studies draw the
    budget line differently.
    """

    task_id: str
    task_description: str
    action_specs: tuple[ActionSpec, ...]
    observation_schema: tuple[ComponentSpec, ...]
    step_limit: int = 30
    count_teammate_messages: bool = True
    count_human_actions: bool = False
    role_actions: Mapping[str, frozenset[str]] | None = None  # None = all actions for all roles

    def __post_init__(self):
        names = [s.name for s in self.action_specs]
        if len(names) != len(set(names)):
            raise ValueError(f"{self.task_id}: duplicate action names in spec")
        comps = [c.name for c in self.observation_schema]
        if len(comps) != len(set(comps)):
            raise ValueError(f"{self.task_id}: duplicate observation components")
        if self.step_limit < 1:
            raise ValueError(f"{self.task_id}: step_limit must be >= 1")

    def action(self, name: str) -> ActionSpec:
        for spec in self.action_specs:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def permits(self, role: str, action_name: str) -> bool:
        if self.role_actions is None:
            return True
        allowed = self.role_actions.get(role)
        return allowed is None or action_name in allowed

    def component(self, name: str) -> ComponentSpec:
        for comp in self.observation_schema:
            if comp.name == name:
                return comp
        raise KeyError(name)

    def public_components(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.observation_schema if c.visibility == PUBLIC)

    def private_components(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.observation_schema if c.visibility == PRIVATE)

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "task_description": self.task_description,
            "action_specs": [s.to_json() for s in self.action_specs],
            "observation_schema": [
                {"name": c.name, "visibility": c.visibility} for c in self.observation_schema
            ],
            "step_limit": self.step_limit,
            "count_teammate_messages": self.count_teammate_messages,
            "count_human_actions": self.count_human_actions,
            "role_actions": None
            if self.role_actions is None
            else {r: sorted(a) for r, a in self.role_actions.items()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TaskEnvironmentSpec":
        role_actions = doc.get("role_actions")
        return cls(
            task_id=doc["task_id"],
            task_description=doc["task_description"],
            action_specs=tuple(ActionSpec.from_json(s) for s in doc["action_specs"]),
            observation_schema=tuple(
                ComponentSpec(c["name"], c["visibility"]) for c in doc["observation_schema"]
            ),
            step_limit=doc.get("step_limit", 30),
            count_teammate_messages=doc.get("count_teammate_messages", True),
            count_human_actions=doc.get("count_human_actions", False),
            role_actions=None
            if role_actions is None
            else {r: frozenset(a) for r, a in role_actions.items()},
        )


@dataclass(frozen=True)
class TaskInstance:
    """A concrete shared goal: the initial query plus per-instance data.

    ``hidden_info`` is visible only to the (simulated) human; ``checklist``
    holds instance-level constraints the outcome scorer checks against the
    final editor text.
    """

    instance_id: str
    task_id: str
    query: str
    hidden_info: tuple[str, ...] = ()
    checklist: tuple[str, ...] = ()  # regex patterns, case-insensitive
    data: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "task_id": self.task_id,
            "query": self.query,
            "hidden_info": list(self.hidden_info),
            "checklist": list(self.checklist),
            "data": dict(self.data),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TaskInstance":
        return cls(
            instance_id=doc["instance_id"],
            task_id=doc["task_id"],
            query=doc["query"],
            hidden_info=tuple(doc.get("hidden_info", ())),
            checklist=tuple(doc.get("checklist", ())),
            data=doc.get("data", {}),
        )


@dataclass
class EnvState:
    """Mutable environment state.

    Private components are stored as ``{role: value}`` maps; public ones hold
    the value directly.  ``seq`` is a monotonic mutation counter used to stamp
    observation views.
    """

    components: dict[str, Any]
    done: bool = False
    agent_action_count: int = 0
    seq: int = 0


@dataclass(frozen=True)
class ObservationView:
    """One role's immutable snapshot of the environment."""

    role: str
    components: dict[str, Any]
    timestamp: int

    def to_json(self) -> dict:
        return {"role": self.role, "components": self.components, "timestamp": self.timestamp}


@dataclass(frozen=True)
class StepResult:
    obs: ObservationView
    reward: float
    done: bool
    private: bool


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def state_digest(state: EnvState) -> str:
    doc = {
        "components": state.components,
        "done": state.done,
        "agent_action_count": state.agent_action_count,
        "seq": state.seq,
    }
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


@dataclass(frozen=True)
class ApplyResult:
    """Outcome of applying a task action to the components."""

    changed: tuple[str, ...]
    private: bool
    finish: bool = False


Scorer = Callable[["TaskEnvironment"], float]


class TaskEnvironment:
    """Base class for dual-control environments.

    Subclasses implement ``_initial_components`` and ``_apply``; everything
    else (visibility, counting, termination, views) is shared.
    """

    def __init__(
        self,
        spec: TaskEnvironmentSpec,
        instance: TaskInstance,
        team: Iterable[TeamMember] = DEFAULT_TEAM,
        scorer: Scorer | None = None,
    ):
        self.spec = spec
        self.instance = instance
        self.team = tuple(team)
        if len({m.role for m in self.team}) != len(self.team):
            raise ValueError("duplicate roles in team")
        self.scorer = scorer
        self.state = self._fresh_state()

    # -- subclass hooks ------------------------------------------------------

    def _initial_components(self) -> dict[str, Any]:
        """Initial value per public component; private slices are filled in here."""
        raise NotImplementedError

    def _apply(self, role: str, action: ParsedAction) -> ApplyResult:
        """Mutate ``self.state.components`` for a task action.

        May raise :class:`SemanticActionError` for parameter values that are
        invalid against the current state.  Must not touch ``done`` or the
        action count.
        """
        raise NotImplementedError

    # -- shared machinery ----------------------------------------------------

    def _fresh_state(self) -> EnvState:
        components = self._initial_components()
        expected = {c.name for c in self.spec.observation_schema}
        if set(components) != expected:
            raise ValueError(
                f"{self.spec.task_id}: components {sorted(components)} do not match "
                f"schema {sorted(expected)}"
            )
        return EnvState(components=components)

    def _empty_private(self, value: Any = "") -> dict[str, Any]:
        return {m.role: copy.deepcopy(value) for m in self.team}

    def roles(self) -> tuple[str, ...]:
        return tuple(m.role for m in self.team)

    def member(self, role: str) -> TeamMember:
        for m in self.team:
            if m.role == role:
                return m
        raise UnknownRoleError(f"role {role!r} is not in the team")

    def grammar(self) -> tuple[ActionSpec, ...]:
        """Full session grammar: task actions plus the collaboration acts."""
        return self.spec.action_specs + COLLABORATION_ACTS

    def reset(self) -> dict[str, ObservationView]:
        self.state = self._fresh_state()
        return {m.role: self.observation_view(m.role) for m in self.team}

    def _counted(self, role: str) -> bool:
        kind = self.member(role).kind
        return kind == AGENT or (kind == HUMAN and self.spec.count_human_actions)

    def charge_collaboration_act(self, role: str, act_kind: str) -> bool:
        """Charge a collaboration act against the step budget.

        Waits are free; teammate messages consume budget only when
        ``count_teammate_messages`` is set.  Returns True when the charge
        exhausted the budget (episode ends).
        """
        self.member(role)
        if self.state.done:
            raise EpisodeFinishedError("episode already finished")
        if act_kind != KIND_MESSAGE or not self.spec.count_teammate_messages:
            return False
        if not self._counted(role):
            return False
        self.state.agent_action_count += 1
        if self.state.agent_action_count >= self.spec.step_limit:
            self.state.done = True
        return self.state.done

    def step(self, role: str, action: ParsedAction | str) -> StepResult:
        if self.state.done:
            raise EpisodeFinishedError("episode already finished")
        member = self.member(role)
        if isinstance(action, str):
            action = parse_action(action, list(self.spec.action_specs))
        if not self.spec.permits(role, action.name):
            raise ActionNotPermittedError(f"{role} may not take {action.name}")

        if action.name == FINISH.name:
            result = ApplyResult(changed=(), private=False, finish=True)
        else:
            result = self._apply(role, action)

        self.state.seq += 1
        if self._counted(member.role):
            self.state.agent_action_count += 1
        done = result.finish or self.state.agent_action_count >= self.spec.step_limit
        self.state.done = done
        reward = self.final_reward() if done else 0.0
        return StepResult(
            obs=self.observation_view(role),
            reward=reward,
            done=done,
            private=result.private,
        )

    def final_reward(self) -> float:
        return float(self.scorer(self)) if self.scorer is not None else 0.0

    def observation_view(self, role: str) -> ObservationView:
        self.member(role)
        visible: dict[str, Any] = {}
        for comp in self.spec.observation_schema:
            value = self.state.components[comp.name]
            if comp.visibility == PRIVATE:
                visible[comp.name] = copy.deepcopy(value[role])
            else:
                visible[comp.name] = copy.deepcopy(value)
        return ObservationView(role=role, components=visible, timestamp=self.state.seq)

    def digest(self) -> str:
        return state_digest(self.state)

    def editor_text(self) -> str | None:
        """Final-outcome text, if this environment has a shared editor."""
        value = self.state.components.get("editor")
        return value if isinstance(value, str) else None


def is_delivered(text: str | None) -> bool:
    """An outcome counts as delivered only if the editor holds real text."""
    return bool(text and text.strip())


def checklist_score_text(text: str | None, patterns: Iterable[str]) -> float:
    """Fraction of checklist patterns the delivered text satisfies.

    Undelivered outcomes (empty or whitespace-only editor) score 0 regardless
    of anything else that happened in the session.
    """
    patterns = tuple(patterns)
    if not is_delivered(text):
        return 0.0
    if not patterns:
        return 1.0
    hits = sum(1 for pat in patterns if re.search(pat, text, re.IGNORECASE | re.DOTALL))
    return hits / len(patterns)


def checklist_score(env: TaskEnvironment) -> float:
    return checklist_score_text(env.editor_text(), env.instance.checklist)


def render_component_text(name: str, value: Any) -> str:
    """Deterministic plain-text rendering of a component value for prompts."""
    if isinstance(value, str):
        return value if value else "(empty)"
    if isinstance(value, list):
        if not value:
            return "(empty)"
        lines = []
        for i, item in enumerate(value):
            if isinstance(item, dict):
                parts = ", ".join(f"{k}: {item[k]}" for k in item)
                lines.append(f"[{i}] {parts}")
            else:
                lines.append(f"[{i}] {item}")
        return "\n".join(lines)
    if isinstance(value, dict):
        if not value:
            return "(empty)"
        return "\n".join(f"{k}: {render_component_text(name, v)}" for k, v in value.items())
    return str(value)


def render_view_text(view: ObservationView) -> str:
    blocks = []
    for name, value in view.components.items():
        blocks.append(f"{name}:\n{render_component_text(name, value)}")
    return "\n\n".join(blocks)
