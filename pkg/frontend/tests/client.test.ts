import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/client";
import { PROTOCOL_VERSION } from "../src/protocol";
import { FakeSocket } from "./helpers";

function makeClient(mode: "async" | "turn_taking" = "async") {
  const sockets: FakeSocket[] = [];
  const scheduled: Array<() => void> = [];
  const client = new GatewayClient({
    baseUrl: "ws://gateway.test",
    sessionId: "s1",
    token: "tok&en",
    role: "user",
    mode,
    schema: [{ name: "editor", visibility: "public" }],
    socketFactory: (url) => {
      const socket = new FakeSocket();
      sockets.push(socket);
      void url;
      return socket;
    },
    schedule: (fn) => scheduled.push(fn),
  });
  return { client, sockets, scheduled };
}

const frame = (extra: Record<string, unknown> = {}) => ({
  type: "observation",
  protocol_version: PROTOCOL_VERSION,
  kind: "shared_update",
  role: "user",
  observation: { editor: "" },
  chat: [],
  timestamp: 1,
  ...extra,
});

describe("GatewayClient", () => {
  it("builds the websocket url with an encoded token", () => {
    const { client } = makeClient();
    expect(client.url()).toBe("ws://gateway.test/ws/s1?token=tok%26en&role=user");
  });

  it("every gesture sends exactly one wire message", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();

    client.sendChat("hello");
    client.wait();
    client.submitAction("POST(text=hi)");
    client.finishSession();

    expect(sockets[0]!.sent).toHaveLength(4);
    const actions = sockets[0]!.sent.map((raw) => JSON.parse(raw));
    expect(actions.map((a) => a.action)).toEqual([
      "SEND_TEAMMATE_MESSAGE(message=hello)",
      "WAIT_TEAMMATE_CONTINUE()",
      "POST(text=hi)",
      "FINISH()",
    ]);
    for (const message of actions) {
      expect(message.type).toBe("action");
      expect(message.protocol_version).toBe(PROTOCOL_VERSION);
    }
  });

  it("consecutive chat sends queue optimistically and reconcile on echo", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();

    client.sendChat("first");
    client.sendChat("second"); // no waiting for a reply in between
    expect(client.state.pendingChat).toEqual(["first", "second"]);

    sockets[0]!.push(
      frame({
        type: "chat",
        kind: "new_message",
        chat: [{ sender: "user", message: "first", timestamp: 2 }],
      })
    );
    expect(client.state.pendingChat).toEqual(["second"]);
    expect(client.state.badges["new_message"]).toBeUndefined(); // own echo
  });

  it("non-echo frames badge; echoes do not", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();

    client.submitAction("POST(text=mine)");
    sockets[0]!.push(frame({ observation: { editor: "mine" } })); // echo
    expect(client.state.badges["shared_update"]).toBeUndefined();

    sockets[0]!.push(frame({ observation: { editor: "teammate edit" } }));
    expect(client.state.badges["shared_update"]).toBe(1);
    expect(client.state.observation).toEqual({ editor: "teammate edit" });
  });

  it("waits expect no echo, so the next frame still badges", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();
    client.wait();
    sockets[0]!.push(frame({ observation: { editor: "agent moved" } }));
    expect(client.state.badges["shared_update"]).toBe(1);
  });

  it("reconnects with a banner after an unexpected drop", () => {
    const { client, sockets, scheduled } = makeClient();
    client.connect();
    sockets[0]!.open();
    expect(client.state.connection).toBe("open");

    sockets[0]!.drop();
    expect(client.state.connection).toBe("reconnecting");
    expect(client.reconnectAttempts).toBe(1);

    scheduled.shift()!(); // fire the scheduled reconnect
    expect(sockets).toHaveLength(2);
    sockets[1]!.open();
    expect(client.state.connection).toBe("open");
  });

  it("a deliberate close neither reconnects nor banners", () => {
    const { client, sockets, scheduled } = makeClient();
    client.connect();
    sockets[0]!.open();
    client.close();
    expect(client.state.connection).toBe("closed");
    expect(sockets[0]!.closed).toBe(true);
    expect(scheduled).toHaveLength(0);
  });

  it("turn mode locks on submit and unlocks on the next frame", () => {
    const { client, sockets } = makeClient("turn_taking");
    client.connect();
    sockets[0]!.open();
    expect(client.state.currentTurn).toBe("user");

    client.submitAction("POST(text=my move)");
    expect(client.state.currentTurn).toBeNull();

    sockets[0]!.push(frame());
    expect(client.state.currentTurn).toBe("user");
  });

  it("ratings go out as a rating message", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();
    client.submitRatings(4, 5);
    expect(JSON.parse(sockets[0]!.sent[0]!)).toEqual({
      type: "rating",
      outcome: 4,
      satisfaction: 5,
      protocol_version: PROTOCOL_VERSION,
    });
  });

  it("end frame settles state even mid-reconnect bookkeeping", () => {
    const { client, sockets } = makeClient();
    client.connect();
    sockets[0]!.open();
    sockets[0]!.push(frame({ type: "end", kind: "end", reward: 1.0, digest: "d" }));
    expect(client.state.done).toBe(true);
    sockets[0]!.drop(); // server closes after end: no reconnect loop
    expect(client.state.connection).toBe("closed");
    expect(client.reconnectAttempts).toBe(0);
  });
});
