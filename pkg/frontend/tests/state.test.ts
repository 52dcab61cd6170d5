import { describe, expect, it } from "vitest";

import { PROTOCOL_VERSION, type ServerFrame } from "../src/protocol";
import {
  applyFrame,
  clearBadges,
  initialState,
  inputLocked,
  queueChat,
  actionSubmitted,
  setStatus,
  type UiSessionState,
} from "../src/state";

function obs(
  partial: Partial<ServerFrame> & { kind?: string } = {}
): ServerFrame {
  return {
    type: "observation",
    protocol_version: PROTOCOL_VERSION,
    kind: "shared_update",
    role: "user",
    observation: { editor: "v1" },
    chat: [],
    timestamp: 1,
    ...partial,
  } as ServerFrame;
}

const fresh = (mode: "async" | "turn_taking" = "async"): UiSessionState =>
  initialState("user", {
    mode,
    schema: [
      { name: "editor", visibility: "public" },
      { name: "notes", visibility: "private" },
    ],
  });

describe("applyFrame", () => {
  it("replaces the observation wholesale and bumps badges", () => {
    let state = fresh();
    state = applyFrame(state, obs({ observation: { editor: "agent draft" } }));
    expect(state.observation).toEqual({ editor: "agent draft" });
    expect(state.badges["shared_update"]).toBe(1);
  });

  it("echo frames refresh the view without a badge", () => {
    let state = fresh();
    state = applyFrame(state, obs(), { echo: true });
    expect(state.observation).toEqual({ editor: "v1" });
    expect(state.badges["shared_update"]).toBeUndefined();
  });

  it("chat frames reconcile optimistic echoes", () => {
    let state = queueChat(queueChat(fresh(), "first"), "second");
    expect(state.pendingChat).toEqual(["first", "second"]);
    const chat = [
      { sender: "user", message: "first", timestamp: 2 },
      { sender: "user", message: "second", timestamp: 3 },
    ];
    state = applyFrame(state, obs({ type: "chat", kind: "new_message", chat }), {
      echo: true,
    });
    expect(state.pendingChat).toEqual([]);
    expect(state.chat).toHaveLength(2);
  });

  it("errors surface inline and leave the task view alone", () => {
    let state = applyFrame(fresh(), obs({ observation: { editor: "kept" } }));
    state = applyFrame(state, {
      ...obs(),
      type: "error",
      error: "BOGUS is not a known action",
    } as ServerFrame);
    expect(state.lastError).toMatch(/BOGUS/);
    expect(state.observation).toEqual({ editor: "kept" });
    // the next good frame clears the error
    state = applyFrame(state, obs());
    expect(state.lastError).toBeNull();
  });

  it("end frames settle the session", () => {
    const state = applyFrame(fresh(), {
      ...obs(),
      type: "end",
      kind: "end",
      reward: 1.0,
      digest: "abc",
    } as ServerFrame);
    expect(state.done).toBe(true);
    expect(state.reward).toBe(1.0);
    expect(inputLocked(state)).toBe(true);
  });
});

describe("turn-taking projection", () => {
  it("opens unlocked for the human, locks after a submission", () => {
    let state = fresh("turn_taking");
    expect(inputLocked(state)).toBe(false);
    state = actionSubmitted(state);
    expect(inputLocked(state)).toBe(true);
  });

  it("any frame addressed to us means the turn is ours again", () => {
    let state = actionSubmitted(fresh("turn_taking"));
    state = applyFrame(state, obs());
    expect(state.currentTurn).toBe("user");
    expect(inputLocked(state)).toBe(false);
  });

  it("an HTTP status resync is authoritative", () => {
    let state = fresh("turn_taking");
    state = setStatus(state, { current_turn: "agent" });
    expect(inputLocked(state)).toBe(true);
    state = setStatus(state, { current_turn: "user" });
    expect(inputLocked(state)).toBe(false);
  });

  it("async mode never locks input", () => {
    let state = fresh("async");
    state = actionSubmitted(state);
    expect(inputLocked(state)).toBe(false);
  });
});

describe("badges", () => {
  it("accumulate per kind and clear individually", () => {
    let state = fresh();
    state = applyFrame(state, obs());
    state = applyFrame(state, obs({ type: "chat", kind: "new_message" }));
    state = applyFrame(state, obs({ type: "chat", kind: "new_message" }));
    expect(state.badges).toEqual({ shared_update: 1, new_message: 2 });
    state = clearBadges(state, "new_message");
    expect(state.badges).toEqual({ shared_update: 1 });
    state = clearBadges(state);
    expect(state.badges).toEqual({});
  });
});
