"""Tabular-analysis environment.

Both parties share a notebook (cells plus outputs) and a report editor; there
is nothing private, so every step is announced to the whole team.  The
dataset ships inside the task instance and is materialized for the executor
on every cell run.
"""

from __future__ import annotations

from typing import Any

from tandem.envs.actions import FINISH, ActionSpec, Parameter, ParsedAction
from tandem.envs.core import (
    PUBLIC,
    ApplyResult,
    ComponentSpec,
    TaskEnvironment,
    TaskEnvironmentSpec,
    TaskInstance,
    TeamMember,
    checklist_score,
)
from tandem.envs.executor import OK, CellResult, SubprocessExecutor

TABULAR_ACTIONS: tuple[ActionSpec, ...] = (
    ActionSpec.build(
        "JUPYTER_EXECUTE_CELL",
        (Parameter("code"),),
        "Run a python cell in the shared notebook; state carries forward.",
    ),
    ActionSpec.build(
        "EDITOR_UPDATE",
        (Parameter("text"),),
        "Replace the shared analysis report.",
    ),
    FINISH,
)

TABULAR_SCHEMA: tuple[ComponentSpec, ...] = (
    ComponentSpec("editor", PUBLIC),
    ComponentSpec("notebook", PUBLIC),
)


def tabular_spec(step_limit: int = 30) -> TaskEnvironmentSpec:
    return TaskEnvironmentSpec(
        task_id="tabular",
        task_description=(
            "Analyze the dataset together in the shared notebook and write the "
            "findings into the shared report editor; only the editor text "
            "counts as the final deliverable."
        ),
        action_specs=TABULAR_ACTIONS,
        observation_schema=TABULAR_SCHEMA,
        step_limit=step_limit,
    )


class TabularEnvironment(TaskEnvironment):
    def __init__(self, instance: TaskInstance, team=None, executor=None, step_limit: int = 30):
        self.executor = executor if executor is not None else SubprocessExecutor()
        kwargs: dict[str, Any] = {"scorer": checklist_score}
        if team is not None:
            kwargs["team"] = team
        super().__init__(tabular_spec(step_limit), instance, **kwargs)

    def _dataset_files(self) -> dict[str, str]:
        files = self.instance.data.get("files", {})
        return {str(name): str(content) for name, content in files.items()}

    def _initial_components(self) -> dict[str, Any]:
        return {"editor": "", "notebook": []}

    def _apply(self, role: str, action: ParsedAction) -> ApplyResult:
        if action.name == "EDITOR_UPDATE":
            self.state.components["editor"] = action["text"]
            return ApplyResult(changed=("editor",), private=False)
        if action.name == "JUPYTER_EXECUTE_CELL":
            return self._execute(action["code"])
        raise AssertionError(f"unhandled action {action.name}")

    def _execute(self, code: str) -> ApplyResult:
        notebook: list[dict] = self.state.components["notebook"]
        # only cells that ran clean feed state into later cells
        prior = [c["cell"] for c in notebook if c["status"] == OK]
        result: CellResult = self.executor.run(prior, code, self._dataset_files())
        notebook.append({"cell": code, "output": result.output, "status": result.status})
        return ApplyResult(changed=("notebook",), private=False)


def make_tabular_environment(
    instance: TaskInstance, team: tuple[TeamMember, ...] | None = None
) -> TabularEnvironment:
    return TabularEnvironment(instance, team=team)
