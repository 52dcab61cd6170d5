"""Trajectory files: an auditable JSONL record of one session.

Layout, one JSON object per line:

- line 1, header: format tag, session id, full session config with the task
  instance inlined, and the team roster.  Nothing wall-clock dependent goes
  in here, so two identical runs produce byte-identical files.
- event lines: every envelope the environment handler processed, with its
  outcome, the post-event state digest, and a hash chained from the previous
  line.  The chain is seeded from the header, so edits anywhere, including
  the header, are detectable and localizable.
- final line: end-of-session summary (digest, reward, chat, editor text,
  counters) plus the chain head.

Replaying re-applies the recorded envelopes through a fresh environment and
compares state digests event by event; the first mismatch is reported by
index.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from tandem.envs.core import canonical_json
from tandem.errors import FixtureError, ReplayDivergenceError, TamperedTrajectoryError

FORMAT = "tandem.trajectory.v1"

# fields covered by the event hash, in canonical order
_EVENT_FIELDS = ("index", "timestamp", "role", "action", "status", "detail", "reward", "done", "digest")


def _chain_hash(prev: str, doc: dict, fields: Iterable[str]) -> str:
    body = {k: doc[k] for k in fields}
    return hashlib.sha256((prev + canonical_json(body)).encode()).hexdigest()


def header_seed(header: dict) -> str:
    body = {k: v for k, v in header.items() if k != "type"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


class TrajectoryWriter:
    def __init__(self, header: dict):
        header = {"type": "header", "format": FORMAT, **header}
        self.header = header
        self.events: list[dict] = []
        self.final: dict | None = None
        self._head = header_seed(header)

    def record_event(self, event: dict) -> None:
        if self.final is not None:
            raise ValueError("trajectory already finalized")
        doc = {"type": "event", **event}
        self._head = _chain_hash(self._head, doc, _EVENT_FIELDS)
        doc["hash"] = self._head
        self.events.append(doc)

    def finalize(self, final: dict) -> "Trajectory":
        if self.final is None:
            self.final = {"type": "final", **final, "hash": self._head}
        return Trajectory(self.header, self.events, self.final)


@dataclass(frozen=True)
class Trajectory:
    header: dict
    events: list[dict]
    final: dict

    def dumps(self) -> str:
        lines = [json.dumps(self.header, ensure_ascii=True)]
        lines += [json.dumps(e, ensure_ascii=True) for e in self.events]
        lines.append(json.dumps(self.final, ensure_ascii=True))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    def verify(self) -> None:
        """Recompute the hash chain; raise pointing at the first bad line."""
        head = header_seed(self.header)
        for i, event in enumerate(self.events):
            try:
                head = _chain_hash(head, event, _EVENT_FIELDS)
            except KeyError as exc:
                raise TamperedTrajectoryError(i, f"event {i} is missing field {exc}") from exc
            if event.get("hash") != head:
                raise TamperedTrajectoryError(i, f"event {i} breaks the hash chain")
        if self.final.get("hash") != head:
            raise TamperedTrajectoryError(
                len(self.events), "final line does not match the chain head"
            )

    @property
    def config(self) -> dict:
        return self.header["config"]


def load_trajectory(path: str | Path) -> Trajectory:
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    if len(lines) < 2:
        raise FixtureError(f"{path}: not a trajectory file")
    header = json.loads(lines[0])
    if header.get("format") != FORMAT:
        raise FixtureError(f"{path}: unknown trajectory format {header.get('format')!r}")
    final = json.loads(lines[-1])
    events = [json.loads(line) for line in lines[1:-1]]
    if header.get("type") != "header" or final.get("type") != "final":
        raise FixtureError(f"{path}: malformed trajectory framing")
    return Trajectory(header, events, final)


@dataclass(frozen=True)
class ReplayReport:
    events: int
    final_digest: str
    matched: bool


def replay_trajectory(traj: Trajectory, verify_chain: bool = True) -> ReplayReport:
    """Re-apply recorded envelopes through a fresh environment.

    Digests are compared after every event; the first divergence raises with
    its index.  Imported lazily to keep trajectory IO free of env wiring.
    """
    from tandem.harness.session import SessionConfig, rebuild_envnode

    if verify_chain:
        traj.verify()
    config = SessionConfig.from_json(traj.config)
    node, bus = rebuild_envnode(config, traj.header.get("team"))

    replayed: list[dict] = []
    node.recorder = replayed.append
    for i, event in enumerate(traj.events):
        bus.publish("step", {"role": event["role"], "action": event["action"]})
        got = replayed[-1]
        if got["digest"] != event["digest"]:
            raise ReplayDivergenceError(i, event["digest"], got["digest"])
        if got["status"] != event["status"]:
            raise ReplayDivergenceError(i, event["status"], got["status"])
    final_digest = node.env.digest()
    if final_digest != traj.final.get("digest"):
        raise ReplayDivergenceError(len(traj.events), traj.final.get("digest"), final_digest)
    return ReplayReport(events=len(traj.events), final_digest=final_digest, matched=True)
