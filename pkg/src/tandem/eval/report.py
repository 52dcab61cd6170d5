"""Turning finished trajectories into metric reports and batch summaries."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from tandem.envs.core import TaskInstance, checklist_score_text, is_delivered
from tandem.eval.judge import InitiativeJudge, RuleJudge, initiative_counts
from tandem.eval.metrics import MetricReport, initiative_entropy, message_counts
from tandem.harness.trajectory import Trajectory, load_trajectory


def evaluate_trajectory(
    traj: Trajectory,
    judge: InitiativeJudge | None = None,
    ratings: dict | None = None,
) -> MetricReport:
    judge = judge or RuleJudge()
    instance = TaskInstance.from_json(traj.config["instance"])
    roles = tuple(m["role"] for m in traj.header.get("team", ()))
    final = traj.final
    chat = final.get("chat", [])
    editor = final.get("editor")
    ratings = ratings or final.get("ratings") or {}

    init_counts = initiative_counts(chat, roles, judge)
    return MetricReport(
        instance_id=instance.instance_id,
        task_id=instance.task_id,
        delivered=is_delivered(editor),
        outcome_score=checklist_score_text(editor, instance.checklist),
        reward=float(final.get("reward", 0.0)),
        counted_actions=int(final.get("counted_actions", 0)),
        message_counts=message_counts(chat, roles),
        initiative_counts=init_counts,
        initiative_entropy=initiative_entropy(init_counts),
        outcome_rating=ratings.get("outcome"),
        satisfaction_rating=ratings.get("satisfaction"),
    )


def evaluate_file(path: str | Path, judge: InitiativeJudge | None = None) -> MetricReport:
    return evaluate_trajectory(load_trajectory(path), judge=judge)


_CSV_COLUMNS = [
    "instance_id",
    "task_id",
    "delivered",
    "outcome_score",
    "reward",
    "counted_actions",
    "messages_total",
    "initiative_entropy",
    "outcome_rating",
    "satisfaction_rating",
]


def batch_csv(reports: list[MetricReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(
            {
                "instance_id": r.instance_id,
                "task_id": r.task_id,
                "delivered": int(r.delivered),
                "outcome_score": f"{r.outcome_score:.4f}",
                "reward": f"{r.reward:.4f}",
                "counted_actions": r.counted_actions,
                "messages_total": sum(r.message_counts.values()),
                "initiative_entropy": "" if r.initiative_entropy is None else f"{r.initiative_entropy:.6f}",
                "outcome_rating": "" if r.outcome_rating is None else r.outcome_rating,
                "satisfaction_rating": "" if r.satisfaction_rating is None else r.satisfaction_rating,
            }
        )
    return buf.getvalue()
