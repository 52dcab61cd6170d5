"""Environments defined entirely by a JSON document.

Lets a task be registered without writing code: the document names the
observation components (public or private) and, for each action, which
component it writes and how (replace or append).  Parameter references in
write templates use ``{param}`` placeholders.

Example document::

    {
      "task_id": "toy",
      "task_description": "A two-component scratch task.",
      "components": [
        {"name": "editor", "visibility": "public", "initial": ""},
        {"name": "notes", "visibility": "private", "initial": ""}
      ],
      "actions": [
        {"name": "POST", "parameters": ["text"],
         "writes": {"component": "editor", "mode": "replace", "value": "{text}"}},
        {"name": "JOT", "parameters": ["text"],
         "writes": {"component": "notes", "mode": "append", "value": "{text}"}}
      ],
      "step_limit": 30
    }
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

from tandem.envs.actions import FINISH, ActionSpec, Parameter, ParsedAction
from tandem.envs.core import (
    PRIVATE,
    PUBLIC,
    ApplyResult,
    ComponentSpec,
    TaskEnvironment,
    TaskEnvironmentSpec,
    TaskInstance,
    TeamMember,
    checklist_score,
)
from tandem.errors import FixtureError


def _spec_from_doc(doc: dict) -> tuple[TaskEnvironmentSpec, dict[str, dict], dict[str, Any]]:
    try:
        components = doc["components"]
        actions = doc["actions"]
        task_id = doc["task_id"]
    except KeyError as exc:
        raise FixtureError(f"declarative env missing key {exc}") from exc

    schema = []
    initials: dict[str, Any] = {}
    for comp in components:
        schema.append(ComponentSpec(comp["name"], comp.get("visibility", PUBLIC)))
        initials[comp["name"]] = comp.get("initial", "")

    specs: list[ActionSpec] = []
    writes: dict[str, dict] = {}
    for action in actions:
        params = tuple(Parameter(p) for p in action.get("parameters", ()))
        specs.append(
            ActionSpec.build(
                action["name"],
                parameters=params,
                description=action.get("description", ""),
            )
        )
        write = action.get("writes")
        if write is not None:
            if write["component"] not in initials:
                raise FixtureError(
                    f"{task_id}: action {action['name']} writes unknown component "
                    f"{write['component']}"
                )
            writes[action["name"]] = write
    specs.append(FINISH)

    spec = TaskEnvironmentSpec(
        task_id=task_id,
        task_description=doc.get("task_description", ""),
        action_specs=tuple(specs),
        observation_schema=tuple(schema),
        step_limit=doc.get("step_limit", 30),
        count_teammate_messages=doc.get("count_teammate_messages", True),
        count_human_actions=doc.get("count_human_actions", False),
        role_actions=None
        if doc.get("role_actions") is None
        else {r: frozenset(a) for r, a in doc["role_actions"].items()},
    )
    return spec, writes, initials


class DeclarativeEnvironment(TaskEnvironment):
    """Task environment driven by a JSON document."""

    def __init__(self, doc: dict, instance: TaskInstance, team=None, scorer=None):
        spec, writes, initials = _spec_from_doc(doc)
        self._writes = writes
        self._initials = initials
        kwargs = {"scorer": scorer if scorer is not None else checklist_score}
        if team is not None:
            kwargs["team"] = team
        super().__init__(spec, instance, **kwargs)

    @classmethod
    def from_file(cls, path: str | Path, instance: TaskInstance, **kwargs) -> "DeclarativeEnvironment":
        doc = json.loads(Path(path).read_text())
        return cls(doc, instance, **kwargs)

    def _initial_components(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for comp in self.spec.observation_schema:
            initial = copy.deepcopy(self._initials[comp.name])
            if comp.visibility == PRIVATE:
                out[comp.name] = self._empty_private(initial)
            else:
                out[comp.name] = initial
        return out

    def _apply(self, role: str, action: ParsedAction) -> ApplyResult:
        write = self._writes.get(action.name)
        if write is None:
            # action that observes without writing anything
            return ApplyResult(changed=(), private=True)
        name = write["component"]
        comp = self.spec.component(name)
        value = write.get("value", "")
        for param, raw in action.values.items():
            value = value.replace("{" + param + "}", raw)
        mode = write.get("mode", "replace")

        if comp.visibility == PRIVATE:
            slot = self.state.components[name]
            slot[role] = self._write(slot[role], value, mode)
            return ApplyResult(changed=(name,), private=True)
        self.state.components[name] = self._write(self.state.components[name], value, mode)
        return ApplyResult(changed=(name,), private=False)

    @staticmethod
    def _write(current: Any, value: str, mode: str) -> Any:
        if mode == "replace":
            return value
        if mode == "append":
            if isinstance(current, list):
                return current + [value]
            sep = "\n" if current else ""
            return f"{current}{sep}{value}"
        raise FixtureError(f"unknown write mode {mode!r}")


TOY_DOC: dict = {
    "task_id": "toy",
    "task_description": "Maintain a short shared text; keep private notes on the side.",
    "components": [
        {"name": "editor", "visibility": "public", "initial": ""},
        {"name": "notes", "visibility": "private", "initial": ""},
    ],
    "actions": [
        {
            "name": "POST",
            "parameters": ["text"],
            "description": "Replace the shared editor text.",
            "writes": {"component": "editor", "mode": "replace", "value": "{text}"},
        },
        {
            "name": "JOT",
            "parameters": ["text"],
            "description": "Append a line to your private notes.",
            "writes": {"component": "notes", "mode": "append", "value": "{text}"},
        },
    ],
    "step_limit": 30,
}


def toy_environment(
    instance: TaskInstance | None = None,
    team: tuple[TeamMember, ...] | None = None,
    step_limit: int = 30,
) -> DeclarativeEnvironment:
    """Minimal two-component env used by coordination conformance tests."""
    doc = copy.deepcopy(TOY_DOC)
    doc["step_limit"] = step_limit
    if instance is None:
        instance = TaskInstance(instance_id="toy-0", task_id="toy", query="Fill the editor.")
    return DeclarativeEnvironment(doc, instance, team=team)
