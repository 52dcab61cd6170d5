from __future__ import annotations

import pytest

from tandem.bus.base import END, STEP, obs_channel
from tandem.bus.envnode import EnvNode, EnvNodeConfig
from tandem.bus.inprocess import InProcessBus
from tandem.envs.declarative import toy_environment


class RoutingProbe:
    """Toy env on a private bus with every notification captured in order."""

    def __init__(self, team=None, step_limit: int = 30, config: EnvNodeConfig | None = None):
        self.bus = InProcessBus()
        self.env = toy_environment(team=team, step_limit=step_limit)
        self.seen: list[tuple[str, str]] = []  # (recipient or "*", kind)
        self.payloads: list[dict] = []
        for role in self.env.roles():
            self.bus.subscribe(obs_channel(role), self._collector(role))
        self.bus.subscribe(END, self._collector("*"))
        self.node = EnvNode(self.env, self.bus, config=config)

    def _collector(self, tag: str):
        def handler(payload: dict) -> None:
            self.seen.append((tag, payload["kind"]))
            self.payloads.append(payload)

        return handler

    def act(self, role: str, action: str) -> None:
        self.bus.publish(STEP, {"role": role, "action": action})

    def tick(self) -> None:
        self.bus.publish("tick", {})

    def start(self) -> None:
        self.node.start()
        self.seen.clear()
        self.payloads.clear()


@pytest.fixture
def probe() -> RoutingProbe:
    p = RoutingProbe()
    p.start()
    return p
