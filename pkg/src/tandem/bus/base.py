"""Message-bus contract shared by the in-process and TCP transports.

Channels are plain strings with fixed names: ``step`` carries action
envelopes from team members to the environment handler, ``tick`` carries the
session clock, ``{role}/obs`` carries notification snapshots to one role, and
``end`` announces episode completion.  Delivery within a channel is FIFO;
payloads are JSON objects and are size-capped so a runaway prompt cannot wedge
a transport.
"""

from __future__ import annotations

import json
from typing import Callable, Protocol

from tandem.errors import PayloadTooLargeError

STEP = "step"
TICK = "tick"
END = "end"

MAX_PAYLOAD_BYTES = 1 << 20

Handler = Callable[[dict], None]


def obs_channel(role: str) -> str:
    return f"{role}/obs"


def encode_payload(payload: dict, max_bytes: int = MAX_PAYLOAD_BYTES) -> bytes:
    data = json.dumps(payload, ensure_ascii=True).encode()
    if len(data) > max_bytes:
        raise PayloadTooLargeError(f"payload is {len(data)} bytes (cap {max_bytes})")
    return data


class MessageBus(Protocol):
    """Publish/subscribe with per-channel FIFO ordering."""

    def subscribe(self, channel: str, handler: Handler) -> None: ...

    def publish(self, channel: str, payload: dict) -> None: ...

    def close(self) -> None: ...
