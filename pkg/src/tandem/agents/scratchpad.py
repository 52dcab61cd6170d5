"""Keyed note store an agent maintains about its teammate and situation.

The store is bounded: when a new note would exceed capacity, the oldest note
(by first insertion) is evicted.  Updates arrive as action strings in a tiny
grammar so LM output can drive the store directly.
"""

from __future__ import annotations

from tandem.envs.actions import ActionSpec, Parameter, ParsedAction, parse_action
from tandem.errors import AmbiguousActionError, InvalidActionError

DEFAULT_CAPACITY = 64

SCRATCHPAD_OPS: tuple[ActionSpec, ...] = (
    ActionSpec.build(
        "ADD_NOTE",
        [Parameter("note_id"), Parameter("note")],
        "Store a note under an id; reusing an id overwrites that note.",
    ),
    ActionSpec.build(
        "DELETE_NOTE",
        [Parameter("note_id")],
        "Remove the note with this id.",
    ),
    ActionSpec.build(
        "EDIT_NOTE",
        [Parameter("note_id"), Parameter("note")],
        "Rewrite the note with this id.",
    ),
    ActionSpec.build("DO_NOTHING", [], "Leave the notes as they are."),
)


class Scratchpad:
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.notes: dict[str, str] = {}  # insertion ordered

    def apply(self, op: ParsedAction) -> None:
        if op.name == "DO_NOTHING":
            return
        note_id = op["note_id"].strip()
        if op.name == "DELETE_NOTE":
            self.notes.pop(note_id, None)  # deleting a missing note is fine
            return
        # ADD_NOTE and EDIT_NOTE both upsert; they differ only in stated intent
        if note_id in self.notes:
            self.notes[note_id] = op["note"]
            return
        while len(self.notes) >= self.capacity:
            oldest = next(iter(self.notes))
            del self.notes[oldest]
        self.notes[note_id] = op["note"]

    def apply_raw(self, raw: str) -> bool:
        """Parse and apply one op; returns False when unparseable."""
        try:
            op = parse_action(raw, SCRATCHPAD_OPS)
        except (InvalidActionError, AmbiguousActionError):
            return False
        self.apply(op)
        return True

    def render(self) -> str:
        if not self.notes:
            return "(no notes yet)"
        return "\n".join(f"- [{nid}] {note}" for nid, note in self.notes.items())

    def __len__(self) -> int:
        return len(self.notes)
