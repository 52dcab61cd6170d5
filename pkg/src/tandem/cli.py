"""Command line entry points.

Every subcommand works locally against the in-process core; pass ``--server``
to run the same operation through a running service instead.  The CLI holds
no logic of its own beyond argument plumbing.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from tandem.envs.registry import available_tasks, builtin_instances, load_instance
from tandem.errors import ReplayDivergenceError, TamperedTrajectoryError, TandemError
from tandem.eval.report import batch_csv, evaluate_file
from tandem.harness.session import SessionConfig, run_session
from tandem.harness.trajectory import load_trajectory, replay_trajectory
from tandem.nodes.base import ScriptedPolicy
from tandem.nodes.simulated_human import HumanPolicy, RuleBrain


@click.group()
def main() -> None:
    """Dual-control task sessions: run, replay, evaluate, serve."""


def _client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server.rstrip("/"), timeout=60.0)


@main.command()
@click.option("--server", default=None, help="Service URL; omit to list local tasks.")
def tasks(server: str | None) -> None:
    """List registered tasks and their instances."""
    if server:
        for task in _client(server).get("/tasks").json():
            click.echo(f"{task['task_id']}: {task['description'][:70]}")
            for inst in task["instances"]:
                click.echo(f"  {task['task_id']}/{inst['instance_id']}")
        return
    for task_id in available_tasks():
        click.echo(task_id)
        for inst in builtin_instances(task_id):
            click.echo(f"  {task_id}/{inst.instance_id}")


@main.command()
@click.argument("instance_ref")
@click.option("--mode", type=click.Choice(["async", "turn_taking"]), default="async")
@click.option("--agent", "agent_policy", default="scripted",
              type=click.Choice(["scripted", "collaborative", "autonomous", "situational", "none"]))
@click.option("--agent-script", type=click.Path(exists=True), default=None,
              help="File with one action per line for the scripted agent.")
@click.option("--backend-url", default=None, help="Chat-completion endpoint for LM agents.")
@click.option("--model", default=None)
@click.option("--api-key", default=None)
@click.option("--out", type=click.Path(), default=None, help="Trajectory output path.")
@click.option("--max-ticks", default=60, show_default=True)
@click.option("--server", default=None, help="Run on a service instead of locally.")
def run(instance_ref, mode, agent_policy, agent_script, backend_url, model, api_key, out, max_ticks, server):
    """Run one session on a task instance."""
    script = []
    if agent_script:
        script = [line.strip() for line in Path(agent_script).read_text().splitlines() if line.strip()]

    if server:
        _run_remote(server, instance_ref, mode, agent_policy, script, backend_url, model, api_key, out, max_ticks)
        return

    try:
        instance = load_instance(instance_ref)
    except TandemError as exc:
        raise click.ClickException(str(exc)) from exc
    config = SessionConfig(instance=instance, mode=mode, max_ticks=max_ticks)

    policies = {}
    if agent_policy == "scripted":
        policies["agent"] = ScriptedPolicy(script)
    elif agent_policy != "none":
        from tandem.agents.policies import (
            AgentProfile,
            AutonomousPolicy,
            CollaborativePolicy,
            SituationalPolicy,
        )
        from tandem.envs.registry import make_environment
        from tandem.nodes.backends import HttpBackend, ScriptedBackend

        env = make_environment(instance)
        profile = AgentProfile.from_env(env, "agent")
        backend = (
            HttpBackend(backend_url, model, api_key=api_key)
            if backend_url and model
            else ScriptedBackend()
        )
        cls = {
            "collaborative": CollaborativePolicy,
            "autonomous": AutonomousPolicy,
            "situational": SituationalPolicy,
        }[agent_policy]
        policies["agent"] = cls(profile, backend)
    policies["user"] = HumanPolicy(RuleBrain(), instance)

    result = run_session(config, policies, trajectory_path=out)
    summary = {
        "session_id": config.session_id,
        "done": result.done,
        "delivered": result.delivered,
        "counted_actions": result.env.state.agent_action_count,
        "events": len(result.trajectory.events),
        "ticks": result.ticks,
        "reward": result.end_payload["reward"] if result.end_payload else 0.0,
    }
    click.echo(json.dumps(summary, indent=2))
    if out:
        click.echo(f"trajectory written to {out}")


def _run_remote(server, instance_ref, mode, agent_policy, script, backend_url, model, api_key, out, max_ticks):
    client = _client(server)
    backend = {"kind": "http", "base_url": backend_url, "model": model, "api_key": api_key} \
        if backend_url and model else {"kind": "scripted"}
    resp = client.post(
        "/sessions",
        json={
            "instance_ref": instance_ref,
            "mode": mode,
            "agent_policy": agent_policy,
            "agent_script": script,
            "backend": backend,
            "max_ticks": max_ticks,
        },
    )
    if resp.status_code != 200:
        raise click.ClickException(f"{resp.status_code}: {resp.text}")
    session = resp.json()
    sid, token = session["session_id"], session["token"]
    headers = {"x-session-token": token}
    for _ in range(max_ticks):
        status = client.get(f"/sessions/{sid}").json()
        if status["done"]:
            break
        client.post(f"/sessions/{sid}/tick", headers=headers)
    final = client.post(f"/sessions/{sid}/end", headers=headers).json()
    click.echo(json.dumps(final["metrics"], indent=2))
    if out:
        jsonl = client.get(f"/sessions/{sid}/trajectory", headers=headers).json()["jsonl"]
        Path(out).write_text(jsonl)
        click.echo(f"trajectory written to {out}")


@main.command()
@click.argument("trajectory", type=click.Path(exists=True))
@click.option("--server", default=None)
def replay(trajectory, server):
    """Verify a trajectory's hash chain and re-apply it against a fresh environment."""
    if server:
        resp = _client(server).post("/replay", json={"trajectory": Path(trajectory).read_text()})
        if resp.status_code != 200:
            raise click.ClickException(f"{resp.status_code}: {resp.text}")
        click.echo(json.dumps(resp.json(), indent=2))
        return
    try:
        report = replay_trajectory(load_trajectory(trajectory))
    except TamperedTrajectoryError as exc:
        click.echo(f"TAMPERED at event {exc.index}: {exc}", err=True)
        sys.exit(2)
    except ReplayDivergenceError as exc:
        click.echo(f"DIVERGED at event {exc.index}: expected {exc.expected} got {exc.actual}", err=True)
        sys.exit(3)
    click.echo(f"replay ok: {report.events} events, final digest {report.final_digest[:16]}…")


@main.command()
@click.argument("trajectories", type=click.Path(exists=True), nargs=-1, required=True)
@click.option("--csv", "csv_out", type=click.Path(), default=None, help="Write a CSV summary here.")
@click.option("--server", default=None)
def evaluate(trajectories, csv_out, server):
    """Compute metric reports for one or more trajectories."""
    if server:
        client = _client(server)
        reports = []
        for path in trajectories:
            resp = client.post("/evaluate", json={"trajectory": Path(path).read_text()})
            if resp.status_code != 200:
                raise click.ClickException(f"{path}: {resp.status_code} {resp.text}")
            reports.append(resp.json())
        click.echo(json.dumps(reports, indent=2))
        return
    reports = [evaluate_file(path) for path in trajectories]
    for report in reports:
        click.echo(json.dumps(report.to_json()))
    if csv_out:
        Path(csv_out).write_text(batch_csv(reports))
        click.echo(f"summary written to {csv_out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8800, show_default=True)
@click.option("--data-dir", type=click.Path(), default=None, help="Where session trajectories land.")
def serve(host, port, data_dir):
    """Start the HTTP/WebSocket service."""
    import uvicorn

    from tandem.service.app import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
