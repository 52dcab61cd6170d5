"""Prompt assembly for agent policies.

Templates live in ``resources/`` as plain text with ``{placeholder}`` slots.
Sections appear in a fixed order (setting, task, notes, workspace, chat) so
recorded transcripts stay replayable across refactors.
"""

from __future__ import annotations

from importlib import resources

from tandem.envs.actions import ActionSpec
from tandem.envs.core import render_component_text
from tandem.nodes.base import DecisionContext


def load_template(name: str) -> str:
    return resources.files("tandem.agents").joinpath("resources", name).read_text()


def signature(spec: ActionSpec) -> str:
    inner = ", ".join(f"{p.name}=..." for p in spec.parameters)
    return f"{spec.name}({inner})"


def render_menu(specs: tuple[ActionSpec, ...]) -> str:
    lines = []
    for spec in specs:
        desc = f": {spec.description}" if spec.description else ""
        lines.append(f"- {signature(spec)}{desc}")
    return "\n".join(lines)


def render_observation(observation: dict) -> str:
    if not observation:
        return "(nothing visible)"
    return "\n\n".join(
        f"{name}:\n{render_component_text(name, value)}" for name, value in observation.items()
    )


def render_chat(chat: list[dict]) -> str:
    if not chat:
        return "(no messages yet)"
    return "\n".join(f"[{m['sender']}] {m['message']}" for m in chat)


def render_history(history: tuple[str, ...], limit: int = 10) -> str:
    if not history:
        return "(none yet)"
    tail = history[-limit:]
    return "\n".join(f"{i}. {a}" for i, a in enumerate(tail, start=max(1, len(history) - limit + 1)))


def extract_action_line(reply: str, marker: str = "Action:") -> str:
    """Pull the action out of a thought-then-action reply.

    Takes the last line carrying the marker; if the marker never appears the
    whole reply is treated as the action, which covers models that answer
    with the bare action string.
    """
    lines = [line.strip() for line in reply.strip().splitlines() if line.strip()]
    for line in reversed(lines):
        if line.lower().startswith(marker.lower()):
            return line[len(marker):].strip()
    return reply.strip()
