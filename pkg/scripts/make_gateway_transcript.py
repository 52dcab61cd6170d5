"""Regenerate the recorded gateway transcript used by the frontend tests.

Drives the real service in-process and records exactly what crossed the
wire: the action strings the grammar accepted, every websocket frame a
human client received, the rating rubric labels, and turn-taking status
snapshots.  The frontend contract tests replay this file, so the UI is
tested against genuine server traffic rather than hand-written samples.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from tandem.envs.registry import load_instance, make_environment
from tandem.service.app import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def wire_for(env, name: str, values: dict[str, str]) -> str:
    spec = next(s for s in env.grammar() if s.name == name)
    return spec.render(values)


def record_travel_gestures(client) -> dict:
    """One human-driven travel session; every gesture plus its wire string."""
    env = make_environment(load_instance("travel/trip-oregon-3day"))
    resp = client.post(
        "/sessions",
        json={
            "instance_ref": "travel/trip-oregon-3day",
            "agent_policy": "scripted",
            "agent_script": [],
            "human_role": "user",
        },
    )
    resp.raise_for_status()
    session = resp.json()
    headers = {"x-session-token": session["token"]}
    sid = session["session_id"]

    gestures = []

    def submit(gesture: dict, wire: str):
        out = client.post(
            f"/sessions/{sid}/actions",
            json={"role": "user", "action": wire},
            headers=headers,
        )
        out.raise_for_status()
        body = out.json()
        gestures.append(
            {
                **gesture,
                "wire": wire,
                "accepted": body["accepted"],
                "frame_type": body["payload"]["type"],
            }
        )

    submit(
        {"kind": "task_action", "name": "CITY_SEARCH", "params": [["state", "Oregon"]]},
        wire_for(env, "CITY_SEARCH", {"state": "Oregon"}),
    )
    submit(
        {
            "kind": "task_action",
            "name": "FLIGHT_SEARCH",
            "params": [
                ["origin", "Portland"],
                ["destination", "San Francisco"],
                ["date", "2026-09-01"],
            ],
        },
        wire_for(
            env,
            "FLIGHT_SEARCH",
            {"origin": "Portland", "destination": "San Francisco", "date": "2026-09-01"},
        ),
    )
    # two chat sends back to back, no wait in between; text stresses the
    # grammar with parens, commas, colons and a currency sign
    submit(
        {
            "kind": "chat",
            "text": "two quick notes: budget is tight (about $1800), and I prefer trains",
        },
        wire_for(
            env,
            "SEND_TEAMMATE_MESSAGE",
            {
                "message": "two quick notes: budget is tight (about $1800), and I prefer trains"
            },
        ),
    )
    submit(
        {"kind": "chat", "text": "also: vegetarian, please"},
        wire_for(env, "SEND_TEAMMATE_MESSAGE", {"message": "also: vegetarian, please"}),
    )
    editor_text = "Day 1: Portland. Day 2: gardens, museums. Day 3: food tour."
    submit(
        {"kind": "task_action", "name": "EDITOR_UPDATE", "params": [["text", editor_text]]},
        wire_for(env, "EDITOR_UPDATE", {"text": editor_text}),
    )
    submit({"kind": "wait"}, wire_for(env, "WAIT_TEAMMATE_CONTINUE", {}))

    observation = client.get(
        f"/sessions/{sid}/observation", params={"role": "user"}, headers=headers
    ).json()

    submit({"kind": "finish"}, wire_for(env, "FINISH", {}))

    return {
        "session": {k: session[k] for k in ("action_menu", "observation_schema", "mode")},
        "gestures": gestures,
        "observation_after_edit": observation,
    }


def record_ws_frames(client) -> dict:
    """Toy session where the scripted agent edits and chats while a human
    websocket client is connected; records every received frame verbatim."""
    resp = client.post(
        "/sessions",
        json={
            "instance_ref": "toy/toy-board",
            "agent_policy": "scripted",
            "agent_script": [
                "WAIT_TEAMMATE_CONTINUE()",
                "POST(text=draft: meet by the river)",
                "SEND_TEAMMATE_MESSAGE(message=posted a draft, take a look)",
            ],
            "human_role": "user",
        },
    )
    resp.raise_for_status()
    session = resp.json()
    headers = {"x-session-token": session["token"]}
    sid = session["session_id"]

    frames = []
    sent = []
    with client.websocket_connect(
        f"{session['ws_path']}?token={session['token']}&role=user"
    ) as ws:
        frames.append(ws.receive_json())  # connection snapshot

        client.post(
            f"/sessions/{sid}/actions",
            json={"role": "user", "action": "SEND_TEAMMATE_MESSAGE(message=hello)"},
            headers=headers,
        ).raise_for_status()
        frames.append(ws.receive_json())  # own chat echo
        frames.append(ws.receive_json())  # agent's shared edit

        client.post(
            f"/sessions/{sid}/actions",
            json={"role": "user", "action": "SEND_TEAMMATE_MESSAGE(message=are you there)"},
            headers=headers,
        ).raise_for_status()
        frames.append(ws.receive_json())  # own chat echo
        frames.append(ws.receive_json())  # agent's reply

        jot = {"type": "action", "action": "JOT(text=my private memo)", "protocol_version": 1}
        ws.send_json(jot)
        sent.append(jot)
        frames.append(ws.receive_json())  # private update, sender only

        rating = {"type": "rating", "outcome": 4, "satisfaction": 5, "protocol_version": 1}
        ws.send_json(rating)
        sent.append(rating)

        finish = {"type": "action", "action": "FINISH()", "protocol_version": 1}
        ws.send_json(finish)
        sent.append(finish)
        frames.append(ws.receive_json())  # end

    return {
        "session": {k: session[k] for k in ("action_menu", "observation_schema", "mode")},
        "frames": frames,
        "sent": sent,
        "final_editor": "draft: meet by the river",
    }


def record_turn_statuses(client) -> list[dict]:
    resp = client.post(
        "/sessions",
        json={
            "instance_ref": "toy/toy-board",
            "mode": "turn_taking",
            "agent_policy": "scripted",
            "agent_script": [],
            "human_role": "user",
        },
    )
    resp.raise_for_status()
    session = resp.json()
    headers = {"x-session-token": session["token"]}
    sid = session["session_id"]

    statuses = [client.get(f"/sessions/{sid}").json()]
    client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "WAIT_TEAMMATE_CONTINUE()"},
        headers=headers,
    ).raise_for_status()
    statuses.append(client.get(f"/sessions/{sid}").json())
    return statuses


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(tmp))
        doc = {
            "protocol_version": client.get("/health").json()["protocol_version"],
            "rating_labels": client.get("/meta/rating-labels").json(),
            "travel": record_travel_gestures(client),
            "toy_ws": record_ws_frames(client),
            "turn_statuses": record_turn_statuses(client),
        }
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "gateway_transcript.json"
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=True) + "\n")
    print(f"wrote {path}")
    print(f"  gestures: {len(doc['travel']['gestures'])}")
    print(f"  ws frames: {len(doc['toy_ws']['frames'])}")


if __name__ == "__main__":
    main()
