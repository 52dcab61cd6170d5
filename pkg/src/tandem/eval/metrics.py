"""Session-level metrics.

The headline interaction metric is initiative balance: classify every chat
message as initiative-taking or not, count per party, and take the entropy of
the distribution normalized to the party count.  1.0 means initiative was
shared evenly, 0 means one side carried it entirely (or some party never took
any), and the metric is absent when nobody took initiative at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from tandem.envs.core import is_delivered  # re-exported; delivery is an outcome metric

__all__ = [
    "initiative_entropy",
    "is_delivered",
    "normalize_rating",
    "message_counts",
    "MetricReport",
]


def initiative_entropy(counts: Mapping[str, int]) -> float | None:
    """Entropy of the initiative distribution, log base = party count.

    ``counts`` maps every party (not just speakers) to its number of
    initiative-taking utterances.  Returns ``None`` when there are none at
    all: a silent session has no balance to measure.  Returns exactly 0.0
    when any party took no initiative and exactly 1.0 on a perfectly even
    split; the boundary cases short-circuit so they are exact, not within
    rounding of the formula.
    """
    if not counts:
        return None
    values = list(counts.values())
    if any(v < 0 for v in values):
        raise ValueError("initiative counts cannot be negative")
    total = sum(values)
    if total == 0:
        return None
    n = len(values)
    if n == 1:
        return 0.0
    if any(v == 0 for v in values):
        return 0.0
    if len(set(values)) == 1:
        return 1.0
    log_n = math.log(n)
    return -sum((v / total) * (math.log(v / total) / log_n) for v in values)


def normalize_rating(rating: int | float, low: int = 1, high: int = 5) -> float:
    """Map a 1..5 survey rating onto [0, 1]."""
    if not low <= rating <= high:
        raise ValueError(f"rating {rating} outside [{low}, {high}]")
    return (rating - low) / (high - low)


def message_counts(chat: list[dict], roles: tuple[str, ...]) -> dict[str, int]:
    counts = {role: 0 for role in roles}
    for entry in chat:
        sender = entry.get("sender")
        if sender in counts:
            counts[sender] += 1
    return counts


@dataclass
class MetricReport:
    """Everything we report about one finished session."""

    instance_id: str
    task_id: str
    delivered: bool
    outcome_score: float
    reward: float
    counted_actions: int
    message_counts: dict[str, int] = field(default_factory=dict)
    initiative_counts: dict[str, int] = field(default_factory=dict)
    initiative_entropy: float | None = None
    outcome_rating: int | None = None
    satisfaction_rating: int | None = None

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "task_id": self.task_id,
            "delivered": self.delivered,
            "outcome_score": self.outcome_score,
            "reward": self.reward,
            "counted_actions": self.counted_actions,
            "message_counts": dict(self.message_counts),
            "initiative_counts": dict(self.initiative_counts),
            "initiative_entropy": self.initiative_entropy,
            "outcome_rating": self.outcome_rating,
            "satisfaction_rating": self.satisfaction_rating,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MetricReport":
        return cls(**doc)
