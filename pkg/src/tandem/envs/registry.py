"""Task registry: task_id -> environment factory, plus fixture loading."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Protocol

from tandem.envs.core import TaskEnvironment, TaskInstance, TeamMember
from tandem.envs.declarative import DeclarativeEnvironment
from tandem.errors import FixtureError, UnknownTaskError

FIXTURES_DIR = Path(__file__).parent / "fixtures"


class EnvFactory(Protocol):
    def __call__(
        self, instance: TaskInstance, team: tuple[TeamMember, ...] | None = None
    ) -> TaskEnvironment: ...


_REGISTRY: dict[str, EnvFactory] = {}


def register_task(task_id: str, factory: EnvFactory) -> None:
    if task_id in _REGISTRY:
        raise ValueError(f"task {task_id!r} already registered")
    _REGISTRY[task_id] = factory


def register_declarative(doc: dict) -> str:
    """Register a code-free task from a JSON document; returns its task_id."""

    def factory(instance: TaskInstance, team=None) -> TaskEnvironment:
        return DeclarativeEnvironment(doc, instance, team=team)

    register_task(doc["task_id"], factory)
    return doc["task_id"]


def register_declarative_file(path: str | Path) -> str:
    return register_declarative(json.loads(Path(path).read_text()))


def available_tasks() -> tuple[str, ...]:
    _ensure_builtins()
    return tuple(sorted(_REGISTRY))


def make_environment(
    instance: TaskInstance, team: tuple[TeamMember, ...] | None = None
) -> TaskEnvironment:
    _ensure_builtins()
    factory = _REGISTRY.get(instance.task_id)
    if factory is None:
        raise UnknownTaskError(
            f"no task {instance.task_id!r}; available: {', '.join(sorted(_REGISTRY))}"
        )
    return factory(instance, team=team)


def load_instance(ref: str | Path) -> TaskInstance:
    """Load a task instance from a JSON file or a built-in ``task/instance`` ref."""
    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        return TaskInstance.from_json(json.loads(path.read_text()))
    if isinstance(ref, str) and "/" in ref:
        task_id, instance_id = ref.split("/", 1)
        return load_builtin_instance(task_id, instance_id)
    raise FixtureError(f"cannot resolve instance {ref!r}: not a file or task/instance ref")


def load_builtin_instance(task_id: str, instance_id: str) -> TaskInstance:
    path = FIXTURES_DIR / f"{task_id}_instances.json"
    if not path.exists():
        raise FixtureError(f"no instance fixture for task {task_id!r}")
    docs = json.loads(path.read_text())
    for doc in docs:
        if doc["instance_id"] == instance_id:
            return TaskInstance.from_json(doc)
    raise FixtureError(f"no instance {instance_id!r} in {path.name}")


def builtin_instances(task_id: str) -> tuple[TaskInstance, ...]:
    path = FIXTURES_DIR / f"{task_id}_instances.json"
    if not path.exists():
        return ()
    return tuple(TaskInstance.from_json(doc) for doc in json.loads(path.read_text()))


_BUILTINS_LOADED = False


def _ensure_builtins() -> None:
    global _BUILTINS_LOADED
    if _BUILTINS_LOADED:
        return
    _BUILTINS_LOADED = True
    # imported lazily so the registry module has no heavy deps at import time
    from tandem.envs import related_work, tabular, travel  # noqa: F401

    register_task("travel", travel.make_travel_environment)
    register_task("related_work", related_work.make_related_work_environment)
    register_task("tabular", tabular.make_tabular_environment)
    from tandem.envs.declarative import TOY_DOC

    register_declarative(TOY_DOC)
