"""TCP transport for the bus: newline-delimited JSON over sockets.

``TcpBusServer`` is a hub that fans published payloads out to subscribed
connections; ``TcpBus`` is the client side and satisfies the same protocol as
the in-process bus, so the conformance tests run against both.  Fan-out
happens under one hub lock, which is what guarantees every subscriber sees a
channel in the same order; the cost is that one stalled reader stalls the
hub, acceptable at session scale.

Wire format, one JSON object per line:

    client -> server: {"op": "subscribe", "channel": "agent/obs"}
    client -> server: {"op": "publish", "channel": "step", "payload": {...}}
    server -> client: {"channel": "step", "payload": {...}}
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading

from tandem.bus.base import MAX_PAYLOAD_BYTES, Handler, encode_payload
from tandem.errors import BusClosedError


class _Hub:
    def __init__(self, max_payload_bytes: int):
        self.lock = threading.Lock()
        self.subs: dict[str, list] = {}
        self.max_payload_bytes = max_payload_bytes

    def subscribe(self, channel: str, wfile) -> None:
        with self.lock:
            self.subs.setdefault(channel, []).append(wfile)

    def publish(self, channel: str, payload: dict) -> None:
        data = json.dumps({"channel": channel, "payload": payload}).encode() + b"\n"
        dead = []
        with self.lock:
            for wfile in self.subs.get(channel, ()):
                try:
                    wfile.write(data)
                    wfile.flush()
                except OSError:
                    dead.append(wfile)
            if dead:
                for sinks in self.subs.values():
                    for wfile in dead:
                        if wfile in sinks:
                            sinks.remove(wfile)

    def drop(self, wfile) -> None:
        with self.lock:
            for sinks in self.subs.values():
                if wfile in sinks:
                    sinks.remove(wfile)


class _BusRequestHandler(socketserver.StreamRequestHandler):
    def handle(self):
        hub: _Hub = self.server.hub  # type: ignore[attr-defined]
        try:
            for line in self.rfile:
                if len(line) > hub.max_payload_bytes + 1024:
                    break  # oversized frame, drop the connection
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError:
                    break
                op = doc.get("op")
                if op == "subscribe":
                    hub.subscribe(doc["channel"], self.wfile)
                elif op == "publish":
                    hub.publish(doc["channel"], doc.get("payload", {}))
                else:
                    break
        finally:
            hub.drop(self.wfile)


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class TcpBusServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0, max_payload_bytes: int = MAX_PAYLOAD_BYTES):
        self._server = _Server((host, port), _BusRequestHandler)
        self._server.hub = _Hub(max_payload_bytes)  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)


class TcpBus:
    """Client-side bus over a hub connection."""

    def __init__(self, host: str, port: int, max_payload_bytes: int = MAX_PAYLOAD_BYTES):
        self._sock = socket.create_connection((host, port))
        self._rfile = self._sock.makefile("rb")
        self._send_lock = threading.Lock()
        self._handlers: dict[str, list[Handler]] = {}
        self._handlers_lock = threading.Lock()
        self._closed = False
        self.max_payload_bytes = max_payload_bytes
        self.delivered = 0
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def subscribe(self, channel: str, handler: Handler) -> None:
        if self._closed:
            raise BusClosedError("bus is closed")
        with self._handlers_lock:
            self._handlers.setdefault(channel, []).append(handler)
        self._send({"op": "subscribe", "channel": channel})

    def unsubscribe(self, channel: str, handler: Handler) -> None:
        with self._handlers_lock:
            handlers = self._handlers.get(channel, [])
            if handler in handlers:
                handlers.remove(handler)

    def publish(self, channel: str, payload: dict) -> None:
        if self._closed:
            raise BusClosedError("bus is closed")
        encode_payload(payload, self.max_payload_bytes)
        self._send({"op": "publish", "channel": channel, "payload": payload})

    def _send(self, doc: dict) -> None:
        data = json.dumps(doc, ensure_ascii=True).encode() + b"\n"
        with self._send_lock:
            self._sock.sendall(data)

    def _read_loop(self) -> None:
        try:
            for line in self._rfile:
                doc = json.loads(line)
                with self._handlers_lock:
                    handlers = list(self._handlers.get(doc["channel"], ()))
                for handler in handlers:
                    handler(doc["payload"])
                    self.delivered += 1
        except (OSError, json.JSONDecodeError, ValueError):
            pass  # connection torn down

    def close(self) -> None:
        self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()
        self._reader.join(timeout=5)
