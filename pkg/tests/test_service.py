"""Service contract: REST endpoints, auth, ratings, websocket wire format."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from tandem.service.app import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=tmp_path)
    with TestClient(app) as c:
        yield c


def make_session(client, **overrides):
    body = {
        "instance_ref": "toy/toy-board",
        "agent_policy": "scripted",
        "agent_script": [
            "SEND_TEAMMATE_MESSAGE(message=what should the motto mention?)",
        ],
    }
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


def auth(info):
    return {"x-session-token": info["token"]}


# --- discovery -------------------------------------------------------------------


def test_health_and_labels(client):
    health = client.get("/health").json()
    assert health["status"] == "ok"
    assert health["protocol_version"] == 1
    labels = client.get("/meta/rating-labels").json()
    assert labels["satisfaction"]["1"] == "Extremely dissatisfied"
    assert labels["satisfaction"]["5"] == "Extremely satisfied"
    assert set(labels["outcome"]) == {"1", "2", "3", "4", "5"}


def test_tasks_listing_includes_grammar(client):
    tasks = {t["task_id"]: t for t in client.get("/tasks").json()}
    assert {"travel", "related_work", "tabular", "toy"} <= set(tasks)
    travel = tasks["travel"]
    names = {a["name"] for a in travel["actions"]}
    assert "SEND_TEAMMATE_MESSAGE" in names  # collaboration acts always present
    assert "FLIGHT_SEARCH" in names
    flight = next(a for a in travel["actions"] if a["name"] == "FLIGHT_SEARCH")
    assert flight["signature"] == "FLIGHT_SEARCH(origin=..., destination=..., date=...)"
    assert travel["instances"][0]["instance_id"] == "trip-oregon-3day"
    assert travel["observation_schema"] == [
        {"name": "editor", "visibility": "public"},
        {"name": "search_results", "visibility": "private"},
    ]


# --- session lifecycle --------------------------------------------------------------


def test_create_session_returns_token_and_menu(client):
    info = make_session(client)
    assert info["task_id"] == "toy"
    assert info["hidden_info"] == ["The motto must mention rivers."]
    assert len(info["token"]) >= 32
    assert any(a["name"] == "POST" for a in info["action_menu"])
    assert {s["name"] for s in info["observation_schema"]} == {"editor", "notes"}
    assert info["ws_path"].startswith("/ws/")


def test_create_session_unknown_instance_is_400(client):
    resp = client.post("/sessions", json={"instance_ref": "toy/nope"})
    assert resp.status_code == 400


def test_status_404_for_unknown_session(client):
    assert client.get("/sessions/nope").status_code == 404


def test_token_required_for_mutations(client):
    info = make_session(client)
    sid = info["session_id"]
    body = {"role": "user", "action": "POST(text=x)"}
    assert client.post(f"/sessions/{sid}/actions", json=body).status_code == 403
    bad = {"x-session-token": "wrong"}
    assert client.post(f"/sessions/{sid}/actions", json=body, headers=bad).status_code == 403
    assert client.post(f"/sessions/{sid}/end", headers=bad).status_code == 403


def test_action_flow_and_status(client):
    info = make_session(client)
    sid = info["session_id"]
    resp = client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "POST(text=Strong as the river.)"},
        headers=auth(info),
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["accepted"] is True
    assert doc["payload"]["type"] == "observation"
    assert doc["payload"]["observation"]["editor"] == "Strong as the river."
    assert doc["payload"]["protocol_version"] == 1

    status = client.get(f"/sessions/{sid}").json()
    assert status["delivered"] is True
    assert status["done"] is False
    # the scripted agent asked its question on the session-creation wake
    assert status["chat_length"] == 1


def test_invalid_action_is_not_accepted_but_not_http_error(client):
    info = make_session(client)
    sid = info["session_id"]
    resp = client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "SCRIBBLE(everywhere)"},
        headers=auth(info),
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["accepted"] is False
    assert doc["payload"]["type"] == "error"
    assert "invalid action" in doc["payload"]["error"]


def test_finish_action_returns_end_frame(client):
    info = make_session(client, agent_script=[])
    sid = info["session_id"]
    client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "POST(text=river motto)"},
        headers=auth(info),
    )
    resp = client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "FINISH()"},
        headers=auth(info),
    )
    doc = resp.json()
    assert doc["accepted"] is True
    assert doc["payload"]["type"] == "end"
    assert doc["payload"]["reward"] == 1.0


def test_observation_endpoint_is_per_role(client):
    info = make_session(client)
    sid = info["session_id"]
    client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "JOT(text=my private note)"},
        headers=auth(info),
    )
    mine = client.get(
        f"/sessions/{sid}/observation", params={"role": "user"}, headers=auth(info)
    ).json()
    theirs = client.get(
        f"/sessions/{sid}/observation", params={"role": "agent"}, headers=auth(info)
    ).json()
    assert "my private note" in mine["observation"]["notes"]
    assert "my private note" not in theirs["observation"]["notes"]


def test_manual_tick_advances_clock(client):
    info = make_session(client)
    sid = info["session_id"]
    first = client.post(f"/sessions/{sid}/tick", headers=auth(info)).json()
    second = client.post(f"/sessions/{sid}/tick", headers=auth(info)).json()
    assert second["ticks"] == first["ticks"] + 1


def test_ratings_then_end_lands_in_metrics_and_file(client, tmp_path):
    info = make_session(client, agent_script=[])
    sid = info["session_id"]
    client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "POST(text=by the river we stand)"},
        headers=auth(info),
    )
    client.post(
        f"/sessions/{sid}/actions",
        json={"role": "user", "action": "FINISH()"},
        headers=auth(info),
    )
    resp = client.post(
        f"/sessions/{sid}/ratings",
        json={"outcome": 4, "satisfaction": 5},
        headers=auth(info),
    )
    assert resp.json() == {"stored": True}
    end = client.post(f"/sessions/{sid}/end", headers=auth(info)).json()
    assert end["done"] is True
    assert end["delivered"] is True
    assert end["reward"] == 1.0
    assert end["metrics"]["outcome_rating"] == 4
    assert end["metrics"]["satisfaction_rating"] == 5
    saved = tmp_path / "tandem_sessions" / f"{sid}.jsonl"
    assert saved.exists()
    final = json.loads(saved.read_text().splitlines()[-1])
    assert final["ratings"] == {"outcome": 4, "satisfaction": 5}


def test_rating_validation(client):
    info = make_session(client)
    sid = info["session_id"]
    resp = client.post(
        f"/sessions/{sid}/ratings", json={"outcome": 9, "satisfaction": 1}, headers=auth(info)
    )
    assert resp.status_code == 422


# --- evaluate and replay over HTTP ---------------------------------------------------


def finished_trajectory(client):
    info = make_session(client, agent_script=[])
    sid = info["session_id"]
    for action in ("POST(text=river song)", "FINISH()"):
        client.post(
            f"/sessions/{sid}/actions",
            json={"role": "user", "action": action},
            headers=auth(info),
        )
    return client.get(f"/sessions/{sid}/trajectory", headers=auth(info)).json()["jsonl"]


def test_evaluate_endpoint_scores_a_trajectory(client):
    jsonl = finished_trajectory(client)
    report = client.post("/evaluate", json={"trajectory": jsonl}).json()
    assert report["delivered"] is True
    assert report["outcome_score"] == 1.0
    assert report["task_id"] == "toy"


def test_evaluate_rejects_tampered_trajectory(client):
    jsonl = finished_trajectory(client)
    lines = jsonl.strip().splitlines()
    event = json.loads(lines[1])
    event["action"] = "POST(text=forged)"
    lines[1] = json.dumps(event)
    resp = client.post("/evaluate", json={"trajectory": "\n".join(lines) + "\n"})
    assert resp.status_code == 422


def test_evaluate_rejects_malformed_input(client):
    resp = client.post("/evaluate", json={"trajectory": '{"format": "nope"}\n{}\n'})
    assert resp.status_code == 400
    assert client.post("/evaluate", json={}).status_code == 400


def test_replay_endpoint_matches_and_detects_divergence(client):
    jsonl = finished_trajectory(client)
    ok = client.post("/replay", json={"trajectory": jsonl}).json()
    assert ok["matched"] is True and ok["events"] >= 2

    # forge one event and re-chain the hashes so only replay can catch it
    from tandem.harness.trajectory import Trajectory, TrajectoryWriter, load_trajectory
    import tempfile, os

    with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as fh:
        fh.write(jsonl)
        path = fh.name
    traj = load_trajectory(path)
    os.unlink(path)
    writer = TrajectoryWriter({k: v for k, v in traj.header.items() if k not in ("type", "format")})
    for event in traj.events:
        doc = {k: v for k, v in event.items() if k not in ("type", "hash")}
        if doc["action"].startswith("POST"):
            doc["action"] = "POST(text=forged)"
        writer.record_event(doc)
    forged = writer.finalize({k: v for k, v in traj.final.items() if k not in ("type", "hash")})
    resp = client.post("/replay", json={"trajectory": forged.dumps()})
    assert resp.status_code == 409
    assert "diverged" in resp.json()["detail"]


# --- websocket -----------------------------------------------------------------------


def test_websocket_rejects_bad_token(client):
    info = make_session(client)
    with pytest.raises(Exception):
        with client.websocket_connect(f"{info['ws_path']}?token=wrong&role=user") as ws:
            ws.receive_json()


def test_websocket_flow(client):
    info = make_session(client, agent_script=[])
    url = f"{info['ws_path']}?token={info['token']}&role=user"
    with client.websocket_connect(url) as ws:
        snapshot = ws.receive_json()
        assert snapshot["type"] == "observation"
        assert snapshot["protocol_version"] == 1
        assert snapshot["observation"]["editor"] == ""

        ws.send_json({"type": "action", "action": "POST(text=down by the river)"})
        frame = ws.receive_json()
        assert frame["type"] == "observation"
        assert frame["observation"]["editor"] == "down by the river"

        ws.send_json({"type": "rating", "outcome": 5, "satisfaction": 4})
        ws.send_json({"type": "action", "action": "FINISH()"})
        end = ws.receive_json()
        assert end["type"] == "end"
        assert end["reward"] == 1.0

    session = client.app.state.sessions[info["session_id"]]
    assert session.ratings == {"outcome": 5, "satisfaction": 4}


def test_websocket_chat_frames_between_roles(client):
    # the agent's first wake is the session-creation snapshot; it waits there
    # so its chat message lands while the websocket is connected
    info = make_session(
        client,
        agent_script=[
            "WAIT_TEAMMATE_CONTINUE()",
            "SEND_TEAMMATE_MESSAGE(message=mention the river please)",
        ],
    )
    url = f"{info['ws_path']}?token={info['token']}&role=user"
    with client.websocket_connect(url) as ws:
        snapshot = ws.receive_json()
        assert snapshot["chat"] == []
        # wake the agent with a shared edit; its scripted reply is a chat message
        ws.send_json({"type": "action", "action": "POST(text=draft 1)"})
        frames = [ws.receive_json() for _ in range(2)]
        types = {f["type"] for f in frames}
        assert types == {"observation", "chat"}
        chat = next(f for f in frames if f["type"] == "chat")
        assert chat["chat"][-1]["message"] == "mention the river please"
        assert chat["chat"][-1]["sender"] == "agent"


def test_websocket_unknown_type_gets_error_frame(client):
    info = make_session(client)
    url = f"{info['ws_path']}?token={info['token']}&role=user"
    with client.websocket_connect(url) as ws:
        ws.receive_json()
        ws.send_json({"type": "telepathy"})
        frame = ws.receive_json()
        assert frame["type"] == "error"
        assert "telepathy" in frame["error"]
