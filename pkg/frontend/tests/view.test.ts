import { describe, expect, it } from "vitest";

import { PROTOCOL_VERSION, type ServerFrame } from "../src/protocol";
import { applyFrame, clearBadges, initialState, setConnection } from "../src/state";
import {
  actionForms,
  banners,
  notificationSummary,
  ratingForm,
  renderChat,
  renderComponent,
  renderWorkspace,
} from "../src/view";

const SCHEMA = [
  { name: "editor", visibility: "public" as const },
  { name: "search_results", visibility: "private" as const },
];

function stateWith(observation: Record<string, unknown>) {
  const frame = {
    type: "observation",
    protocol_version: PROTOCOL_VERSION,
    kind: "shared_update",
    role: "user",
    observation,
    chat: [],
    timestamp: 1,
  } as ServerFrame;
  return applyFrame(initialState("user", { schema: SCHEMA }), frame);
}

describe("renderWorkspace", () => {
  it("projects one panel per observation component", () => {
    const panels = renderWorkspace(
      stateWith({ editor: "Day 1: Portland", search_results: "Cities in Oregon" })
    );
    expect(panels.map((p) => p.id)).toEqual(["editor", "search_results"]);
    expect(panels[0]).toMatchObject({
      title: "Shared editor",
      body: "Day 1: Portland",
      isPrivate: false,
    });
    expect(panels[1]).toMatchObject({ isPrivate: true });
    expect(panels[1]!.title).toContain("only you can see this");
  });

  it("badges shared panels on shared updates", () => {
    const panels = renderWorkspace(stateWith({ editor: "x", search_results: "" }));
    expect(panels[0]!.badge).toBe(1); // the applied frame was a shared_update
    expect(panels[1]!.badge).toBe(0);
  });

  it("components default to shared when the schema is silent", () => {
    const panels = renderWorkspace(stateWith({ draft_notes: "hello" }));
    expect(panels[0]).toMatchObject({ title: "Draft notes", isPrivate: false });
  });

  it("statelessness: the latest snapshot alone reconstructs the view", () => {
    let longLived = initialState("user", { schema: SCHEMA });
    const frames = [
      { editor: "", search_results: "" },
      { editor: "v1", search_results: "" },
      { editor: "v2", search_results: "Cities in Oregon: Eugene, Portland." },
    ];
    for (const observation of frames) {
      longLived = applyFrame(longLived, {
        type: "observation",
        protocol_version: PROTOCOL_VERSION,
        kind: "shared_update",
        role: "user",
        observation,
        chat: [],
        timestamp: 1,
      } as ServerFrame);
    }
    const reloaded = stateWith(frames[frames.length - 1]!);
    // badges are ephemeral UX, the workspace itself must be identical
    expect(renderWorkspace(clearBadges(longLived))).toEqual(
      renderWorkspace(clearBadges(reloaded))
    );
    expect(renderChat(clearBadges(longLived))).toEqual(renderChat(clearBadges(reloaded)));
  });
});

describe("renderComponent", () => {
  it("strings pass through; lists get numbered", () => {
    expect(renderComponent("plain text")).toBe("plain text");
    expect(renderComponent(["a", "b"])).toBe("1. a\n2. b");
    expect(renderComponent([{ id: "P1" }])).toBe(`1. {"id":"P1"}`);
  });
});

describe("banners", () => {
  it("reconnect banner while the socket is down", () => {
    const state = setConnection(stateWith({ editor: "" }), "reconnecting");
    expect(banners(state).map((b) => b.kind)).toContain("reconnect");
  });

  it("turn overlay only in turn_taking mode when it is not our turn", () => {
    let state = initialState("user", { mode: "turn_taking", schema: SCHEMA });
    expect(banners(state).map((b) => b.kind)).not.toContain("turn");
    state = { ...state, currentTurn: null };
    expect(banners(state).map((b) => b.kind)).toContain("turn");
    expect(banners(stateWith({ editor: "" })).map((b) => b.kind)).not.toContain("turn");
  });
});

describe("forms", () => {
  it("rating form keeps server labels verbatim and ordered", () => {
    const labels = {
      outcome: { "2": "Below what I needed", "1": "Far below what I needed" },
      satisfaction: { "5": "Extremely satisfied", "4": "Somewhat satisfied" },
    };
    const [outcome, satisfaction] = ratingForm(labels);
    expect(outcome!.options).toEqual([
      { value: 1, label: "Far below what I needed" },
      { value: 2, label: "Below what I needed" },
    ]);
    expect(satisfaction!.options.map((o) => o.value)).toEqual([4, 5]);
  });

  it("action forms skip collaboration acts and surface parameters", () => {
    const forms = actionForms([
      { name: "SEND_TEAMMATE_MESSAGE", signature: "SEND_TEAMMATE_MESSAGE(message=...)", description: "" },
      { name: "WAIT_TEAMMATE_CONTINUE", signature: "WAIT_TEAMMATE_CONTINUE()", description: "" },
      { name: "FINISH", signature: "FINISH()", description: "end" },
      {
        name: "FLIGHT_SEARCH",
        signature: "FLIGHT_SEARCH(origin=..., destination=..., date=...)",
        description: "find flights",
      },
    ]);
    expect(forms.map((f) => f.name)).toEqual(["FINISH", "FLIGHT_SEARCH"]);
    expect(forms[1]!.fields).toEqual(["origin", "destination", "date"]);
    expect(forms[0]!.fields).toEqual([]);
  });
});

describe("notificationSummary", () => {
  it("describes pending badges in words", () => {
    let state = stateWith({ editor: "x" });
    state = { ...state, badges: { shared_update: 2, new_message: 1 } };
    expect(notificationSummary(state)).toEqual([
      "2 shared workspace updates",
      "1 new message",
    ]);
  });
});
