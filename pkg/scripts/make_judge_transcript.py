"""Generate the canned LM-judge transcript used by the replay tests.

Maps each rubric prompt (keyed by sha256) to a short reasoning blob ending in
the bare Yes/No verdict line the judge parser expects.  Rerun after editing
the judge prompt template; the keys are prompt hashes, so any wording change
invalidates the old transcript on purpose.
"""

from __future__ import annotations

import json
from pathlib import Path

from tandem.eval.judge import LMJudge
from tandem.nodes.backends import prompt_key

CASES = [
    (
        "Let's send engine E2 to Corning.",
        "The speaker proposes a concrete move for the team to carry out.",
        True,
    ),
    (
        "Let's look at the first problem first.",
        "The speaker sets the ordering of the work, directing what happens next.",
        True,
    ),
    (
        "Let's consider driving from Fort Lauderdale to Louisiana and explore three cities there.",
        "A specific plan is proposed: the route and the number of cities.",
        True,
    ),
    (
        "Any suggestions",
        "This hands the direction over to the other party without proposing anything.",
        False,
    ),
    (
        "Right, okay.",
        "A bare acknowledgment; it adds no information and steers nothing.",
        False,
    ),
    (
        "We can't go by Dansville because we've got Engine 1 going on that track.",
        "Concrete constraint information is volunteered, shaping the shared plan.",
        True,
    ),
    (
        "Would you like to consider traveling on a different date?",
        "A concrete question that pushes the plan toward a specific revision.",
        True,
    ),
    (
        "What do you think about the first problem?",
        "A concrete question establishing mutual beliefs about a specific item.",
        True,
    ),
]


class _NullBackend:
    prompt_log: list[str] = []

    def complete(self, prompt: str) -> str:  # pragma: no cover - never called
        raise RuntimeError("template rendering only")


def main() -> None:
    judge = LMJudge(_NullBackend())
    transcript: dict[str, str] = {}
    for utterance, reasoning, verdict in CASES:
        prompt = judge.render_prompt(utterance)
        reply = f"{reasoning}\n{'Yes' if verdict else 'No'}"
        transcript[prompt_key(prompt)] = reply
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "judge_transcript.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(transcript, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(transcript)} entries)")


if __name__ == "__main__":
    main()
