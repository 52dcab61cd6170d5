"""Single-threaded bus with a synchronous delivery pump.

``publish`` appends to one global FIFO queue and, unless a pump is already
running further up the stack, drains the queue before returning.  Handlers
may publish while handling; those messages join the same queue and are
delivered by the already-running pump, which keeps ordering global and makes
whole event cascades deterministic.  Handlers run outside the lock, so the
only serialized section is queue bookkeeping.
"""

from __future__ import annotations

import threading
from collections import deque

from tandem.bus.base import MAX_PAYLOAD_BYTES, Handler, encode_payload
from tandem.errors import BusClosedError


class InProcessBus:
    def __init__(self, max_payload_bytes: int = MAX_PAYLOAD_BYTES):
        self._lock = threading.RLock()
        self._queue: deque[tuple[str, dict]] = deque()
        self._handlers: dict[str, list[Handler]] = {}
        self._pumping = False
        self._closed = False
        self.max_payload_bytes = max_payload_bytes
        self.delivered = 0  # delivery counter, used by safety caps

    def subscribe(self, channel: str, handler: Handler) -> None:
        with self._lock:
            if self._closed:
                raise BusClosedError("bus is closed")
            self._handlers.setdefault(channel, []).append(handler)

    def unsubscribe(self, channel: str, handler: Handler) -> None:
        with self._lock:
            handlers = self._handlers.get(channel, [])
            if handler in handlers:
                handlers.remove(handler)

    def publish(self, channel: str, payload: dict) -> None:
        encode_payload(payload, self.max_payload_bytes)
        with self._lock:
            if self._closed:
                raise BusClosedError("bus is closed")
            self._queue.append((channel, payload))
            if self._pumping:
                return  # the active pump will pick it up
            self._pumping = True
        self._pump()

    def _pump(self) -> None:
        while True:
            with self._lock:
                if not self._queue:
                    # flag must drop under the same lock that saw the queue
                    # empty, or a concurrent publish could strand a message
                    self._pumping = False
                    return
                channel, payload = self._queue.popleft()
                handlers = list(self._handlers.get(channel, ()))
            try:
                for handler in handlers:
                    handler(payload)
                    self.delivered += 1
            except BaseException:
                # a crashing handler must not wedge the pump; undelivered
                # messages stay queued for the next publish to drain
                with self._lock:
                    self._pumping = False
                raise

    def close(self) -> None:
        with self._lock:
            self._closed = True
            self._queue.clear()
            self._handlers.clear()
