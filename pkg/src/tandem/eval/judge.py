"""Classifying chat messages as initiative-taking or not.

An utterance takes initiative when it pushes the shared work in a direction:
proposing a plan, constraining it, volunteering a next move, or steering the
other party with a direct question.  Acknowledgments and passive handoffs
("any suggestions") do not.

Two judges implement the same interface: a deterministic rule judge used in
tests and offline scoring, and an LM judge whose replies must end in a bare
Yes or No line so parsing stays trivial.
"""

from __future__ import annotations

import re
from importlib import resources
from typing import Protocol

from tandem.errors import BackendError
from tandem.nodes.backends import TextBackend

# words that make up pure-acknowledgment replies
_ACK_WORDS = frozenset(
    "ok okay right sure yes yeah yep no nope thanks thank you got it sounds good "
    "fine alright cool great perfect understood will do done agreed".split()
)

# openers that hand the direction over to the other party instead of taking it
_PASSIVE_LEADS = (
    "any suggestion",
    "any idea",
    "any thought",
    "any preference",
    "up to you",
    "whatever you",
    "you decide",
    "not sure what",
    "what should i do",
)

# openers that push the work somewhere specific
_INITIATIVE_LEADS = (
    "let's",
    "let us",
    "we should",
    "we need",
    "we can't",
    "we cannot",
    "we've got",
    "we have to",
    "i suggest",
    "i propose",
    "i think we",
    "i'll ",
    "i will ",
    "how about",
    "what if",
    "shall we",
    "would you like",
    "could you",
    "can you",
    "please ",
    "you should",
    "what do you think",
)


class InitiativeJudge(Protocol):
    def is_initiative(self, utterance: str) -> bool: ...


class RuleJudge:
    """Deterministic lexical rules; no model, no state, no randomness."""

    def is_initiative(self, utterance: str) -> bool:
        text = utterance.strip().lower()
        if not text:
            return False
        words = re.findall(r"[a-z']+", text)
        if not words:
            return False
        if len(words) <= 4 and all(w in _ACK_WORDS for w in words):
            return False
        if any(text.startswith(lead) for lead in _PASSIVE_LEADS):
            return False
        if any(text.startswith(lead) for lead in _INITIATIVE_LEADS):
            return True
        if text.endswith("?"):
            return True
        if len(words) >= 6:
            return True  # substantial declaratives steer the work
        return False


def _load_template() -> str:
    return resources.files("tandem.eval").joinpath("resources", "judge_initiative.txt").read_text()


class LMJudge:
    """Backend-driven judge; the reply must terminate in a Yes or No line."""

    def __init__(self, backend: TextBackend):
        self.backend = backend
        self.template = _load_template()

    def render_prompt(self, utterance: str) -> str:
        return self.template.format(utterance=utterance)

    def is_initiative(self, utterance: str) -> bool:
        reply = self.backend.complete(self.render_prompt(utterance))
        verdict = parse_terminal_yes_no(reply)
        if verdict is None:
            raise BackendError(f"judge reply did not end in Yes or No: {reply[-80:]!r}")
        return verdict


def parse_terminal_yes_no(reply: str) -> bool | None:
    lines = [line.strip() for line in reply.strip().splitlines() if line.strip()]
    if not lines:
        return None
    last = lines[-1].strip().strip(".!").lower()
    if last == "yes":
        return True
    if last == "no":
        return False
    return None


def initiative_counts(
    chat: list[dict], roles: tuple[str, ...], judge: InitiativeJudge
) -> dict[str, int]:
    """Per-party counts of initiative-taking utterances across the chat."""
    counts = {role: 0 for role in roles}
    for entry in chat:
        sender = entry.get("sender")
        if sender in counts and judge.is_initiative(entry.get("message", "")):
            counts[sender] += 1
    return counts
