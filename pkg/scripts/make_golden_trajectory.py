"""Regenerate the pinned golden trajectory fixture.

Runs the deterministic scripted travel session and writes the resulting
trajectory plus its digest to tests/fixtures/.  Re-run this only when the
trajectory format or the travel task intentionally changes, and review the
diff; the acceptance suite treats the committed files as ground truth.
"""

from __future__ import annotations

import json
from pathlib import Path

from tandem.envs.registry import load_instance
from tandem.harness.session import SessionConfig, run_session
from tandem.nodes.base import ScriptedPolicy
from tandem.nodes.simulated_human import HumanPolicy, RuleBrain

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SCRIPT = [
    "CITY_SEARCH(state=Oregon)",
    "SEND_TEAMMATE_MESSAGE(message=what is the total budget?)",
    "ATTRACTION_SEARCH(city=Portland)",
    "EDITOR_UPDATE(text=Day 1: Portland gardens. Day 2: museums. Day 3: vegetarian food tour.)",
    "FINISH()",
]


def main() -> None:
    config = SessionConfig(
        instance=load_instance("travel/trip-oregon-3day"),
        session_id="golden-travel",
    )
    policies = {
        "agent": ScriptedPolicy(SCRIPT),
        "user": HumanPolicy(RuleBrain(), config.instance),
    }
    result = run_session(config, policies)
    assert result.done and result.delivered, "golden run must finish and deliver"

    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "golden_travel.jsonl").write_text(result.trajectory.dumps())
    meta = {
        "session_id": config.session_id,
        "digest": result.env.digest(),
        "events": len(result.trajectory.events),
        "reward": result.end_payload["reward"],
        "script": SCRIPT,
    }
    (FIXTURES / "golden_travel.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"digest {meta['digest']}  events {meta['events']}  reward {meta['reward']}")


if __name__ == "__main__":
    main()
