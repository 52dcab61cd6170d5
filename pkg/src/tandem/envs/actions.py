"""Action-string grammar.

Every action crosses the wire as a single string such as
``EDITOR_UPDATE(text=Day 1: arrive in Kyoto)``.  Each action is described by
an :class:`ActionSpec` holding a regex with exactly one capture group per
parameter.  Parameter values are matched greedily left to right, so
environments must order parameters such that greedy matching is unambiguous
(in practice: at most one free-text parameter, placed last).

Parsed forms are internal; the canonical wire form is always the string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from tandem.errors import AmbiguousActionError, InvalidActionError

_GROUP = "(.*)"


@dataclass(frozen=True)
class Parameter:
    """A named action parameter with a semantic type label."""

    name: str
    kind: str = "text"  # text | identifier | number | code


def _canonical_pattern(name: str, parameters: tuple[Parameter, ...]) -> str:
    inner = ", ".join(f"{p.name}={_GROUP}" for p in parameters)
    return re.escape(name) + r"\(" + inner + r"\)"


def _unescape_literal(chunk: str) -> str:
    # Inverse of re.escape for the literal chunks between capture groups.
    return re.sub(r"\\(.)", r"\1", chunk)


@dataclass(frozen=True)
class ActionSpec:
    """Grammar entry for one action.

    ``pattern`` must be literal text interleaved with ``(.*)`` capture groups,
    one group per parameter, in parameter order.
    """

    name: str
    parameters: tuple[Parameter, ...]
    pattern: str
    description: str = ""
    _regex: re.Pattern = field(init=False, repr=False, compare=False)
    _chunks: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        regex = re.compile(self.pattern, re.DOTALL)
        if regex.groups != len(self.parameters):
            raise ValueError(
                f"{self.name}: pattern has {regex.groups} capture groups "
                f"for {len(self.parameters)} parameters"
            )
        chunks = tuple(_unescape_literal(c) for c in self.pattern.split(_GROUP))
        if len(chunks) != len(self.parameters) + 1:
            raise ValueError(f"{self.name}: pattern groups must be literal '(.*)'")
        object.__setattr__(self, "_regex", regex)
        object.__setattr__(self, "_chunks", chunks)

    @classmethod
    def build(
        cls,
        name: str,
        parameters: list[Parameter | str] | None = None,
        description: str = "",
        pattern: str | None = None,
    ) -> "ActionSpec":
        params = tuple(
            p if isinstance(p, Parameter) else Parameter(p) for p in (parameters or [])
        )
        return cls(
            name=name,
            parameters=params,
            pattern=pattern or _canonical_pattern(name, params),
            description=description,
        )

    def match(self, raw: str) -> dict[str, str] | None:
        m = self._regex.fullmatch(raw)
        if m is None:
            return None
        return {p.name: g for p, g in zip(self.parameters, m.groups())}

    def render(self, values: dict[str, str] | None = None, **kw: str) -> str:
        """Interleave parameter values back into the pattern's literal skeleton."""
        bound = dict(values or {})
        bound.update(kw)
        missing = [p.name for p in self.parameters if p.name not in bound]
        if missing:
            raise ValueError(f"{self.name}: missing parameters {missing}")
        out = [self._chunks[0]]
        for p, chunk in zip(self.parameters, self._chunks[1:]):
            out.append(str(bound[p.name]))
            out.append(chunk)
        return "".join(out)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameters": [{"name": p.name, "kind": p.kind} for p in self.parameters],
            "pattern": self.pattern,
            "description": self.description,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ActionSpec":
        return cls(
            name=doc["name"],
            parameters=tuple(
                Parameter(p["name"], p.get("kind", "text")) for p in doc["parameters"]
            ),
            pattern=doc["pattern"],
            description=doc.get("description", ""),
        )


@dataclass(frozen=True)
class ParsedAction:
    spec: ActionSpec
    values: dict[str, str]

    @property
    def name(self) -> str:
        return self.spec.name

    def render(self) -> str:
        return self.spec.render(self.values)

    def __getitem__(self, key: str) -> str:
        return self.values[key]


def parse_action(raw: str, specs: list[ActionSpec] | tuple[ActionSpec, ...]) -> ParsedAction:
    """Match ``raw`` against the grammar.

    Exactly one spec must match.  No match raises :class:`InvalidActionError`;
    more than one raises :class:`AmbiguousActionError` (a configuration error,
    not a caller error).
    """
    raw = raw.strip()
    hits = []
    for spec in specs:
        values = spec.match(raw)
        if values is not None:
            hits.append(ParsedAction(spec, values))
    if not hits:
        raise InvalidActionError(raw)
    if len(hits) > 1:
        raise AmbiguousActionError(raw, [h.name for h in hits])
    return hits[0]


# --- Collaboration acts (shared across every task environment) ---------------

SEND_TEAMMATE_MESSAGE = ActionSpec.build(
    "SEND_TEAMMATE_MESSAGE",
    [Parameter("message")],
    "Send a chat message to your teammate(s). Use it to ask questions, share "
    "findings, or confirm decisions. You may send several messages in a row "
    "without waiting for a reply.",
)

WAIT_TEAMMATE_CONTINUE = ActionSpec.build(
    "WAIT_TEAMMATE_CONTINUE",
    [],
    "Keep-alive signal: take no action now and let your teammate(s) continue.",
)

COLLABORATION_ACTS: tuple[ActionSpec, ...] = (SEND_TEAMMATE_MESSAGE, WAIT_TEAMMATE_CONTINUE)

FINISH = ActionSpec.build(
    "FINISH",
    [],
    "Declare the task complete and end the session for everyone.",
)


KIND_MESSAGE = "send_teammate_message"
KIND_WAIT = "wait_teammate_continue"


@dataclass(frozen=True)
class CollaborationAct:
    kind: str  # KIND_MESSAGE or KIND_WAIT
    message: str | None = None

    def __post_init__(self):
        if self.kind == KIND_MESSAGE and self.message is None:
            raise ValueError("send_teammate_message requires a message")
        if self.kind == KIND_WAIT and self.message is not None:
            raise ValueError("wait_teammate_continue carries no payload")


def as_collaboration_act(action: ParsedAction) -> CollaborationAct | None:
    """Return the collaboration act for ``action``, or ``None`` for task actions."""
    if action.name == SEND_TEAMMATE_MESSAGE.name:
        return CollaborationAct(KIND_MESSAGE, action["message"])
    if action.name == WAIT_TEAMMATE_CONTINUE.name:
        return CollaborationAct(KIND_WAIT)
    return None


def is_collaboration_act(name: str) -> bool:
    return name in (SEND_TEAMMATE_MESSAGE.name, WAIT_TEAMMATE_CONTINUE.name)
