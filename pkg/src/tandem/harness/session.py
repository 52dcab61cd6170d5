"""Session runner: wire an environment, its handler, and team nodes to a bus.

Time is logical.  Everything that can happen synchronously cascades through
the in-process bus until quiescent; the runner then publishes a clock tick
and lets the cascade continue.  Idle nudges are therefore deterministic:
they depend on tick counts, never on wall clocks.  Wall time only appears as
a safety limit for runs driven by real models.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

from tandem.bus.base import END, TICK, MessageBus
from tandem.bus.envnode import EnvNode, EnvNodeConfig
from tandem.bus.inprocess import InProcessBus
from tandem.envs.core import AGENT, TaskEnvironment, TaskInstance, TeamMember, is_delivered
from tandem.envs.registry import make_environment
from tandem.harness.trajectory import Trajectory, TrajectoryWriter
from tandem.nodes.base import Policy, TeamNode

ASYNC = "async"
TURN_TAKING = "turn_taking"

WAIT_WIRE = "WAIT_TEAMMATE_CONTINUE()"


@dataclass(frozen=True)
class SessionConfig:
    instance: TaskInstance
    session_id: str = ""
    mode: str = ASYNC
    max_ticks: int = 60
    max_wall_seconds: float = 300.0
    idle_threshold: int = 3
    idle_rebroadcast: bool = True
    step_limit: int | None = None  # None keeps the task default
    count_teammate_messages: bool | None = None
    node_action_cap: int = 100  # hard per-node bound against chatter loops

    def __post_init__(self):
        if self.mode not in (ASYNC, TURN_TAKING):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.session_id:
            object.__setattr__(self, "session_id", f"{self.instance.instance_id}-{self.mode}")

    def to_json(self) -> dict:
        return {
            "instance": self.instance.to_json(),
            "session_id": self.session_id,
            "mode": self.mode,
            "max_ticks": self.max_ticks,
            "max_wall_seconds": self.max_wall_seconds,
            "idle_threshold": self.idle_threshold,
            "idle_rebroadcast": self.idle_rebroadcast,
            "step_limit": self.step_limit,
            "count_teammate_messages": self.count_teammate_messages,
            "node_action_cap": self.node_action_cap,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SessionConfig":
        doc = dict(doc)
        doc["instance"] = TaskInstance.from_json(doc["instance"])
        return cls(**doc)


def apply_overrides(env: TaskEnvironment, config: SessionConfig) -> None:
    spec = env.spec
    if config.step_limit is not None:
        spec = replace(spec, step_limit=config.step_limit)
    if config.count_teammate_messages is not None:
        spec = replace(spec, count_teammate_messages=config.count_teammate_messages)
    env.spec = spec


def _node_config(config: SessionConfig) -> EnvNodeConfig:
    return EnvNodeConfig(
        idle_threshold=config.idle_threshold,
        idle_rebroadcast=config.idle_rebroadcast,
        turn_taking=config.mode == TURN_TAKING,
    )


def rebuild_envnode(
    config: SessionConfig, team_doc: list[dict] | None
) -> tuple[EnvNode, MessageBus]:
    """Fresh environment plus handler on a private bus; used by replay."""
    team = None
    if team_doc:
        team = tuple(TeamMember(m["role"], m["kind"]) for m in team_doc)
    env = make_environment(config.instance, team=team)
    apply_overrides(env, config)
    bus = InProcessBus()
    node = EnvNode(env, bus, config=_node_config(config))
    return node, bus


def _none_to_wait(policy: Policy) -> Policy:
    # in strict alternation staying silent would deadlock the session,
    # so a quiet decision becomes an explicit pass of the turn
    def wrapped(ctx):
        action = policy(ctx)
        return WAIT_WIRE if action is None else action

    return wrapped


@dataclass
class SessionResult:
    config: SessionConfig
    env: TaskEnvironment
    envnode: EnvNode
    trajectory: Trajectory
    end_payload: dict | None
    ticks: int
    wall_seconds: float
    nodes: dict[str, TeamNode] = field(default_factory=dict)

    @property
    def done(self) -> bool:
        return self.envnode.ended

    @property
    def delivered(self) -> bool:
        return is_delivered(self.env.editor_text())


def run_session(
    config: SessionConfig,
    policies: dict[str, Policy],
    team: tuple[TeamMember, ...] | None = None,
    trajectory_path: str | None = None,
    bus: MessageBus | None = None,
) -> SessionResult:
    """Run one session to completion or to its tick/wall budget.

    ``policies`` maps roles to decision callables; roles present in the team
    but absent here simply never act (a silent teammate).
    """
    env = make_environment(config.instance, team=team)
    apply_overrides(env, config)
    bus = bus or InProcessBus()

    writer = TrajectoryWriter(
        {
            "session_id": config.session_id,
            "config": config.to_json(),
            "team": [{"role": m.role, "kind": m.kind} for m in env.team],
        }
    )
    envnode = EnvNode(env, bus, config=_node_config(config), recorder=writer.record_event)

    for role in policies:
        env.member(role)  # unknown roles fail fast, before anything runs
    nodes: dict[str, TeamNode] = {}
    for role, policy in policies.items():
        if config.mode == TURN_TAKING:
            policy = _none_to_wait(policy)
        nodes[role] = TeamNode(role=role, policy=policy, bus=bus, max_actions=config.node_action_cap)

    end_box: list[dict] = []
    bus.subscribe(END, end_box.append)

    started = time.monotonic()
    envnode.start()
    ticks = 0
    while not envnode.ended and ticks < config.max_ticks:
        if time.monotonic() - started > config.max_wall_seconds:
            break
        bus.publish(TICK, {"now": ticks})
        ticks += 1

    trajectory = writer.finalize(_final_doc(envnode, end_box, ticks))
    if trajectory_path:
        trajectory.save(trajectory_path)
    return SessionResult(
        config=config,
        env=env,
        envnode=envnode,
        trajectory=trajectory,
        end_payload=end_box[0] if end_box else None,
        ticks=ticks,
        wall_seconds=time.monotonic() - started,
        nodes=nodes,
    )


def _final_doc(envnode: EnvNode, end_box: list[dict], ticks: int) -> dict:
    env = envnode.env
    return {
        "digest": env.digest(),
        "done": envnode.ended,
        "reward": end_box[0]["reward"] if end_box else 0.0,
        "counted_actions": env.state.agent_action_count,
        "editor": env.editor_text(),
        "chat": list(envnode.chat),
        "ticks": ticks,
        "events": envnode.event_index,
    }


AgentFactory = Callable[[TaskEnvironment, str], Policy]


def run_matched_pair(
    config: SessionConfig,
    make_policies: Callable[[TaskEnvironment], dict[str, Policy]],
    team: tuple[TeamMember, ...] | None = None,
) -> tuple[SessionResult, SessionResult]:
    """Run the same setup in async and strict turn-taking modes.

    Policy state must not leak between arms, hence the factory argument.
    """
    base = replace(config, mode=ASYNC)
    turns = replace(config, mode=TURN_TAKING, session_id=f"{config.session_id}-turns")

    env_probe = make_environment(config.instance, team=team)
    a = run_session(base, make_policies(env_probe), team=team)
    env_probe = make_environment(config.instance, team=team)
    b = run_session(turns, make_policies(env_probe), team=team)
    return a, b
