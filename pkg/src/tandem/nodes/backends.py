"""Text-completion backends behind team-member policies.

Every backend keeps a prompt log; hygiene tests scan those logs to prove that
information reserved for one party never leaks into another party's prompts.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Callable, Protocol

import httpx

from tandem.errors import BackendError, TranscriptMissError


class TextBackend(Protocol):
    prompt_log: list[str]

    def complete(self, prompt: str) -> str: ...


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode()).hexdigest()


Rule = tuple[Callable[[str], bool], str]


class ScriptedBackend:
    """Predicate rules mapping prompts to canned completions.

    Rules are checked in order; a rule is either ``(predicate, completion)``
    or ``(substring, completion)``.  Falls back to ``default`` so a scripted
    run can never stall on an unmatched prompt.
    """

    def __init__(self, rules: list[tuple[Callable[[str], bool] | str, str]] | None = None, default: str = "WAIT_TEAMMATE_CONTINUE()"):
        self.rules: list[Rule] = []
        for cond, completion in rules or []:
            if isinstance(cond, str):
                needle = cond
                self.rules.append((lambda p, n=needle: n in p, completion))
            else:
                self.rules.append((cond, completion))
        self.default = default
        self.prompt_log: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompt_log.append(prompt)
        for predicate, completion in self.rules:
            if predicate(prompt):
                return completion
        return self.default


class ReplayBackend:
    """Deterministic playback of recorded completions, keyed by prompt hash.

    A miss is an error on purpose: silent fallbacks would let a drifted
    prompt pass as a reproduction.
    """

    def __init__(self, transcript: dict[str, str]):
        self.transcript = dict(transcript)
        self.prompt_log: list[str] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayBackend":
        return cls(json.loads(Path(path).read_text()))

    def complete(self, prompt: str) -> str:
        self.prompt_log.append(prompt)
        key = prompt_key(prompt)
        if key not in self.transcript:
            raise TranscriptMissError(f"no recorded completion for prompt {key[:12]}…")
        return self.transcript[key]


class RecordingBackend:
    """Wraps a live backend and captures a replayable transcript."""

    def __init__(self, inner: TextBackend):
        self.inner = inner
        self.transcript: dict[str, str] = {}
        self.prompt_log: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompt_log.append(prompt)
        completion = self.inner.complete(prompt)
        self.transcript[prompt_key(prompt)] = completion
        return completion

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.transcript, indent=2, sort_keys=True) + "\n")


class HttpBackend:
    """Chat-completion style HTTP backend (temperature pinned to 0)."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
        transport: httpx.BaseTransport | None = None,
    ):
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self.model = model
        self.max_retries = max_retries
        self.prompt_log: list[str] = []
        self._client = httpx.Client(
            base_url=base_url, headers=headers, timeout=timeout, transport=transport
        )

    def complete(self, prompt: str) -> str:
        self.prompt_log.append(prompt)
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                resp = self._client.post("/chat/completions", json=body)
                if resp.status_code >= 500:
                    raise BackendError(f"server error {resp.status_code}")
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (httpx.HTTPError, BackendError, KeyError, ValueError) as exc:
                last = exc
                if attempt + 1 < self.max_retries:
                    time.sleep(min(2**attempt * 0.1, 2.0))
        raise BackendError(f"completion failed after {self.max_retries} attempts: {last}")
