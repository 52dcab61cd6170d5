"""Acceptance gate for the core package.

Each test covers one acceptance criterion and prints exactly one
``[PASS]``/``[FAIL]`` line (bypassing pytest capture) so the verdicts are
readable straight off a plain ``pytest`` run.  Tolerances and budgets are
pinned as module constants; the checks compare against independent oracles
computed inside this file, never against the implementation's own helpers.
"""

from __future__ import annotations

import json
import math
import random
import time
from pathlib import Path

import pytest

from tandem.agents.policies import AgentProfile, CollaborativePolicy
from tandem.bus.base import END, STEP, TICK, obs_channel
from tandem.bus.envnode import EnvNode, EnvNodeConfig
from tandem.bus.inprocess import InProcessBus
from tandem.envs.declarative import toy_environment
from tandem.envs.registry import (
    available_tasks,
    builtin_instances,
    load_instance,
    make_environment,
)
from tandem.errors import BackendError, TamperedTrajectoryError
from tandem.eval.judge import LMJudge, RuleJudge
from tandem.eval.metrics import initiative_entropy
from tandem.harness.session import SessionConfig, run_session
from tandem.harness.trajectory import Trajectory, load_trajectory, replay_trajectory
from tandem.nodes.backends import ReplayBackend
from tandem.nodes.base import ScriptedPolicy
from tandem.nodes.simulated_human import HumanPolicy, RuleBrain

FIXTURES = Path(__file__).parent / "fixtures"

ENTROPY_SAMPLES = 1000
ENTROPY_TOLERANCE = 1e-9
ENTROPY_BUDGET_S = 1.0

ROUTING_SEQUENCES = 500
ROUTING_BUDGET_S = 10.0

DETERMINISM_BUDGET_S = 5.0

STEP_BUDGET = 30

ROLES = ("agent", "user")


def criterion(capsys, name: str, fn) -> None:
    """Run one criterion, print its verdict line, re-raise on failure."""
    start = time.perf_counter()
    try:
        detail = fn()
        failure = None
    except BaseException as exc:  # noqa: BLE001 - verdict line must still print
        failure = exc
        detail = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    verdict = "PASS" if failure is None else "FAIL"
    with capsys.disabled():
        print(f"[{verdict}] {name}: {detail} [{elapsed:.2f}s]", flush=True)
    if failure is not None:
        raise failure


# --- 1. initiative entropy vs direct-summation oracle -------------------------------


def test_initiative_entropy_matches_oracle(capsys):
    def run():
        rng = random.Random(20260814)
        started = time.perf_counter()
        worst = 0.0
        for _ in range(ENTROPY_SAMPLES):
            n = rng.choice((2, 3, 4))
            counts = {f"p{i}": rng.randint(1, 60) for i in range(n)}
            total = sum(counts.values())
            oracle = -sum(
                (v / total) * math.log(v / total, n) for v in counts.values()
            )
            got = initiative_entropy(counts)
            worst = max(worst, abs(got - oracle))
            assert abs(got - oracle) <= ENTROPY_TOLERANCE
        # boundary cases must be exact, not merely close
        assert initiative_entropy({"a": 4, "b": 4}) == 1.0
        assert initiative_entropy({"a": 4, "b": 4, "c": 4, "d": 4}) == 1.0
        assert initiative_entropy({"a": 5, "b": 0}) == 0.0
        assert initiative_entropy({"a": 1, "b": 9, "c": 0}) == 0.0
        elapsed = time.perf_counter() - started
        assert elapsed < ENTROPY_BUDGET_S, f"took {elapsed:.2f}s"
        return (
            f"{ENTROPY_SAMPLES} random distributions within {ENTROPY_TOLERANCE:.0e}"
            f" (max error {worst:.2e}), boundaries exact"
        )

    criterion(capsys, "initiative-entropy-oracle", run)


# --- 2. notification-routing conformance ---------------------------------------------


class EmissionLog:
    """Records (channel, kind) for everything the node publishes."""

    def __init__(self, bus, roles):
        self.records: list[tuple[str, str]] = []
        for role in roles:
            bus.subscribe(obs_channel(role), self._handler(obs_channel(role)))
        bus.subscribe(END, self._handler(END))

    def _handler(self, tag):
        def handle(payload):
            self.records.append((tag, payload["kind"]))

        return handle


class RoutingOracle:
    """Predicts emissions from the notification rules alone.

    Mirrors the documented contract, not the implementation: waits are
    silent, messages reach everyone, private updates reach the actor,
    shared updates reach everyone, failures bounce to the sender, the end
    fires once, and idle nudges appear after `threshold` quiet ticks.
    """

    def __init__(self, roles, threshold: int, rebroadcast: bool):
        self.roles = list(roles)
        self.threshold = threshold
        self.rebroadcast = rebroadcast
        self.idle = 0
        self.ended = False

    def predict(self, op: str, role: str) -> list[tuple[str, str]]:
        if op == "tick":
            if self.ended:
                return []
            self.idle += 1
            if self.idle < self.threshold:
                return []
            if self.idle > self.threshold and not self.rebroadcast:
                return []
            return [(obs_channel(r), "idle_tick") for r in self.roles]

        self.idle = 0  # any step traffic counts as activity
        if self.ended:
            return [(obs_channel(role), "error")]
        if op == "wait":
            return []
        if op == "message":
            return [(obs_channel(r), "new_message") for r in self.roles]
        if op == "shared":
            return [(obs_channel(r), "shared_update") for r in self.roles]
        if op == "private":
            return [(obs_channel(role), "private_update")]
        if op == "invalid":
            return [(obs_channel(role), "error")]
        if op == "finish":
            self.ended = True
            return [(END, "end")]
        raise AssertionError(op)


OPS = ("wait", "message", "shared", "private", "invalid", "tick", "finish")
OP_WEIGHTS = (2, 3, 3, 3, 2, 4, 1)
OP_WIRE = {
    "wait": "WAIT_TEAMMATE_CONTINUE()",
    "message": "SEND_TEAMMATE_MESSAGE(message=ping {i})",
    "shared": "POST(text=note {i})",
    "private": "JOT(text=memo {i})",
    "invalid": "BOGUS(x={i})",
    "finish": "FINISH()",
}


def test_notification_routing_conformance(capsys):
    def run():
        rng = random.Random(977)
        started = time.perf_counter()
        checked = violations = 0
        for _ in range(ROUTING_SEQUENCES):
            bus = InProcessBus()
            env = toy_environment(step_limit=10_000)
            node = EnvNode(
                env, bus, EnvNodeConfig(idle_threshold=2, idle_rebroadcast=True)
            )
            log = EmissionLog(bus, ROLES)
            oracle = RoutingOracle(ROLES, threshold=2, rebroadcast=True)
            node.start()
            log.records.clear()
            for i in range(rng.randint(4, 10)):
                op = rng.choices(OPS, weights=OP_WEIGHTS)[0]
                role = rng.choice(ROLES)
                expected = oracle.predict(op, role)
                log.records.clear()
                if op == "tick":
                    bus.publish(TICK, {})
                else:
                    action = OP_WIRE[op].format(i=i)
                    bus.publish(STEP, {"role": role, "action": action})
                checked += 1
                if sorted(log.records) != sorted(expected):
                    violations += 1
        elapsed = time.perf_counter() - started
        assert violations == 0, f"{violations}/{checked} steps diverged"
        assert elapsed < ROUTING_BUDGET_S, f"took {elapsed:.2f}s"
        return (
            f"{ROUTING_SEQUENCES} random sequences, {checked} steps,"
            f" 0 routing violations"
        )

    criterion(capsys, "notification-routing-conformance", run)


# --- 3. per-event behavior checks -----------------------------------------------------


def test_event_handler_behavior_cases(capsys):
    def run():
        bus = InProcessBus()
        env = toy_environment(step_limit=10_000)
        EnvNode(env, bus, EnvNodeConfig(idle_threshold=99))
        log = EmissionLog(bus, ROLES)

        bus.publish(STEP, {"role": "agent", "action": "WAIT_TEAMMATE_CONTINUE()"})
        assert log.records == [], "wait must emit nothing"

        log.records.clear()
        bus.publish(STEP, {"role": "agent", "action": "POST(text=shared note)"})
        assert sorted(log.records) == sorted(
            (obs_channel(r), "shared_update") for r in ROLES
        ), "shared action must notify every member"

        log.records.clear()
        bus.publish(STEP, {"role": "agent", "action": "JOT(text=private memo)"})
        assert log.records == [
            (obs_channel("agent"), "private_update")
        ], "private action must notify only the actor"

        log.records.clear()
        bus.publish(STEP, {"role": "user", "action": "FINISH()"})
        assert log.records == [(END, "end")], "done must emit exactly one end"

        log.records.clear()
        bus.publish(STEP, {"role": "user", "action": "FINISH()"})
        assert log.records == [
            (obs_channel("user"), "error")
        ], "no second end after completion"
        return "wait silent; shared to all; private to actor; exactly one end"

    criterion(capsys, "event-handler-behavior", run)


# --- 4. delivery / step-limit semantics -----------------------------------------------


def run_toy_budget_session(session_id: str, script: list[str]):
    config = SessionConfig(
        instance=load_instance("toy/toy-board"),
        session_id=session_id,
        max_ticks=60,
    )
    return run_session(config, {"agent": ScriptedPolicy(script)})


def test_delivery_and_step_limit_semantics(capsys):
    def run():
        # waits are free; the teammate message and every jot are counted
        undelivered = ["WAIT_TEAMMATE_CONTINUE()", "SEND_TEAMMATE_MESSAGE(message=on it)"]
        undelivered += [f"JOT(text=note {i})" for i in range(STEP_BUDGET - 1)]
        result = run_toy_budget_session("budget-undelivered", undelivered)
        assert result.done
        assert result.env.state.agent_action_count == STEP_BUDGET
        assert result.delivered is False
        assert result.end_payload["reward"] == 0.0

        delivered = list(undelivered)
        delivered[1] = "POST(text=progress: meet by the river)"
        result = run_toy_budget_session("budget-delivered", delivered)
        assert result.done
        assert result.env.state.agent_action_count == STEP_BUDGET
        assert result.delivered is True
        return (
            f"{STEP_BUDGET} counted actions exhaust undelivered (waits free);"
            " one editor write before exhaustion flips delivered=true"
        )

    criterion(capsys, "delivery-step-limit-semantics", run)


# --- 5. end-to-end determinism --------------------------------------------------------


def golden_meta() -> dict:
    return json.loads((FIXTURES / "golden_travel.json").read_text())


def run_golden_session(session_id: str):
    meta = golden_meta()
    config = SessionConfig(
        instance=load_instance("travel/trip-oregon-3day"), session_id=session_id
    )
    policies = {
        "agent": ScriptedPolicy(meta["script"]),
        "user": HumanPolicy(RuleBrain(), config.instance),
    }
    return run_session(config, policies)


def test_end_to_end_determinism(capsys):
    def run():
        started = time.perf_counter()
        first = run_golden_session("determinism")
        second = run_golden_session("determinism")
        elapsed = time.perf_counter() - started
        assert first.trajectory.dumps() == second.trajectory.dumps()
        assert first.env.digest() == second.env.digest()
        assert first.done and first.delivered
        assert elapsed < DETERMINISM_BUDGET_S, f"took {elapsed:.2f}s"
        return (
            "two runs byte-identical"
            f" ({len(first.trajectory.events)} events,"
            f" digest {first.env.digest()[:12]}...)"
        )

    criterion(capsys, "end-to-end-determinism", run)


# --- 6. turn-taking soundness ---------------------------------------------------------


def test_turn_taking_soundness(capsys):
    def run():
        bus = InProcessBus()
        env = toy_environment(step_limit=10_000)
        records: list[dict] = []
        node = EnvNode(
            env, bus, EnvNodeConfig(turn_taking=True), recorder=records.append
        )
        log = EmissionLog(bus, ROLES)
        node.start()
        assert node.current_turn == "user", "human moves first by default"

        log.records.clear()
        attempts = 10
        for i in range(attempts):
            bus.publish(STEP, {"role": "agent", "action": f"POST(text=jump {i})"})
        rejected = [r for r in records if r["status"] == "rejected"]
        assert len(rejected) == attempts, "every out-of-turn submission rejected"
        assert log.records == [(obs_channel("agent"), "error")] * attempts
        assert env.state.components["editor"] == "", "rejections leave state untouched"

        # a wait passes the turn and nudges only the party now up
        log.records.clear()
        bus.publish(STEP, {"role": "user", "action": "WAIT_TEAMMATE_CONTINUE()"})
        assert node.current_turn == "agent"
        assert log.records == [(obs_channel("agent"), "shared_update")]

        log.records.clear()
        bus.publish(STEP, {"role": "agent", "action": "POST(text=my move)"})
        assert records[-1]["status"] == "applied"
        assert log.records == [(obs_channel("user"), "shared_update")]

        # the ablation removes idle nudges entirely
        log.records.clear()
        for _ in range(20):
            bus.publish(TICK, {})
        assert log.records == []
        return (
            f"{attempts}/{attempts} out-of-turn rejected; wait passed the turn;"
            " 0 idle broadcasts in 20 ticks"
        )

    criterion(capsys, "turn-taking-soundness", run)


# --- 7. hidden-info hygiene -----------------------------------------------------------


class QueueBackend:
    def __init__(self, replies):
        self.replies = list(replies)
        self.prompt_log = []

    def complete(self, prompt):
        self.prompt_log.append(prompt)
        if len(self.replies) > 1:
            return self.replies.pop(0)
        return self.replies[0]


def test_hidden_info_hygiene(capsys):
    def run():
        instances = [
            inst
            for task_id in available_tasks()
            for inst in builtin_instances(task_id)
        ]
        assert len(instances) >= 9
        scanned = leaks = 0
        for instance in instances:
            assert instance.hidden_info, "scan is vacuous without hidden info"
            env = make_environment(instance)
            profile = AgentProfile.from_env(env, "agent")
            backend = QueueBackend(
                [
                    "Action: SEND_TEAMMATE_MESSAGE(message=starting on the task now)",
                    "Action: WAIT_TEAMMATE_CONTINUE()",
                ]
            )
            config = SessionConfig(
                instance=instance,
                session_id=f"hygiene-{instance.instance_id}",
                max_ticks=6,
                idle_threshold=2,
            )
            run_session(
                config,
                {
                    "agent": CollaborativePolicy(profile, backend),
                    "user": HumanPolicy(RuleBrain(), instance),
                },
            )
            surfaces = list(backend.prompt_log)
            surfaces.append(
                json.dumps(env.observation_view("agent").to_json(), sort_keys=True)
            )
            scanned += len(surfaces)
            for fragment in instance.hidden_info:
                leaks += sum(
                    1 for text in surfaces if fragment.lower() in text.lower()
                )
        assert leaks == 0, f"{leaks} hidden-info occurrences reached the agent"
        return (
            f"0 hidden-info occurrences in {scanned} agent-facing surfaces"
            f" across {len(instances)} instances"
        )

    criterion(capsys, "hidden-info-hygiene", run)


# --- 8. initiative judge rubric -------------------------------------------------------

WORKED_EXAMPLES = [
    ("Let's send engine E2 to Corning.", True),
    ("Let's look at the first problem first.", True),
    (
        "Let's consider driving from Fort Lauderdale to Louisiana and explore"
        " three cities there.",
        True,
    ),
    ("Any suggestions", False),
    ("Right, okay.", False),
    (
        "We can't go by Dansville because we've got Engine 1 going on that track.",
        True,
    ),
    ("Would you like to consider traveling on a different date?", True),
    ("What do you think about the first problem?", True),
]


def test_judge_rubric_fixtures(capsys):
    def run():
        rule = RuleJudge()
        for utterance, expected in WORKED_EXAMPLES:
            assert rule.is_initiative(utterance) is expected, utterance

        replayed = LMJudge(ReplayBackend.from_file(FIXTURES / "judge_transcript.json"))
        for utterance, expected in WORKED_EXAMPLES:
            assert replayed.is_initiative(utterance) is expected, utterance
        return (
            f"{len(WORKED_EXAMPLES)}/{len(WORKED_EXAMPLES)} worked examples"
            " via rule judge and replayed transcript"
        )

    criterion(capsys, "judge-rubric-fixtures", run)


# --- 9. replay integrity --------------------------------------------------------------


def test_replay_integrity(capsys):
    def run():
        meta = golden_meta()
        golden = load_trajectory(FIXTURES / "golden_travel.jsonl")
        golden.verify()
        report = replay_trajectory(golden)
        assert report.matched
        assert report.final_digest == meta["digest"]

        # the committed fixture regenerates byte-identically from a live run
        live = run_golden_session(meta["session_id"])
        assert live.trajectory.dumps() == (FIXTURES / "golden_travel.jsonl").read_text()

        # corrupting any single event is caught at exactly that index
        for target in range(len(golden.events)):
            events = [dict(e) for e in golden.events]
            events[target]["action"] = "POST(text=forged)"
            bad = Trajectory(dict(golden.header), events, dict(golden.final))
            with pytest.raises(TamperedTrajectoryError) as err:
                bad.verify()
            assert err.value.index == target
        return (
            f"golden digest {meta['digest'][:12]}... reproduced;"
            f" tampering detected at all {len(golden.events)} indices"
        )

    criterion(capsys, "replay-integrity", run)
