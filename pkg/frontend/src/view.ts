/**
 * Pure display projections: state in, plain render structures out.
 *
 * Nothing here touches the DOM; the host page decides how panels, banners
 * and forms become markup.  Keeping this layer data-only is what makes the
 * statelessness property testable: the same payload must always produce the
 * same view.
 */

import type { MenuEntry } from "./protocol";
import { inputLocked, type UiSessionState } from "./state";

export interface Panel {
  id: string;
  title: string;
  body: string;
  isPrivate: boolean;
  badge: number;
}

const TITLES: Record<string, string> = {
  editor: "Shared editor",
  notes: "Notes",
  search_results: "Search results",
  library: "Library",
  notebook: "Notebook history",
};

function titleFor(name: string): string {
  const known = TITLES[name];
  if (known) return known;
  const pretty = name.replace(/_/g, " ");
  return pretty.charAt(0).toUpperCase() + pretty.slice(1);
}

export function renderComponent(value: unknown): string {
  if (typeof value === "string") return value;
  if (Array.isArray(value)) {
    return value
      .map((item, i) =>
        typeof item === "string" ? `${i + 1}. ${item}` : `${i + 1}. ${JSON.stringify(item)}`
      )
      .join("\n");
  }
  return JSON.stringify(value);
}

export function renderWorkspace(state: UiSessionState): Panel[] {
  return Object.entries(state.observation).map(([name, value]) => {
    const visibility =
      state.schema.find((c) => c.name === name)?.visibility ?? "public";
    const isPrivate = visibility === "private";
    return {
      id: name,
      title: isPrivate ? `${titleFor(name)} (only you can see this)` : titleFor(name),
      body: renderComponent(value),
      isPrivate,
      badge: state.badges[isPrivate ? "private_update" : "shared_update"] ?? 0,
    };
  });
}

export interface ChatLine {
  sender: string;
  text: string;
  own: boolean;
  pending: boolean;
}

export function renderChat(state: UiSessionState): ChatLine[] {
  const lines: ChatLine[] = state.chat.map((m) => ({
    sender: m.sender,
    text: m.message,
    own: m.sender === state.role,
    pending: false,
  }));
  for (const text of state.pendingChat) {
    lines.push({ sender: state.role, text, own: true, pending: true });
  }
  return lines;
}

export interface Banner {
  kind: "reconnect" | "error" | "turn" | "done";
  text: string;
}

export function banners(state: UiSessionState): Banner[] {
  const out: Banner[] = [];
  if (state.connection === "reconnecting") {
    out.push({ kind: "reconnect", text: "Connection lost, reconnecting..." });
  }
  if (state.lastError) {
    out.push({ kind: "error", text: state.lastError });
  }
  if (state.done) {
    const reward = state.reward === null ? "" : ` (score ${state.reward})`;
    out.push({ kind: "done", text: `Session over${reward}. Please rate the result.` });
  } else if (state.mode === "turn_taking" && inputLocked(state)) {
    out.push({ kind: "turn", text: "Waiting for your teammate's turn to finish." });
  }
  return out;
}

export interface RatingOption {
  value: number;
  label: string;
}

export interface RatingField {
  name: "outcome" | "satisfaction";
  prompt: string;
  options: RatingOption[];
}

export interface RatingLabels {
  outcome: Record<string, string>;
  satisfaction: Record<string, string>;
}

/** Builds the end-of-session form; option labels come from the server verbatim. */
export function ratingForm(labels: RatingLabels): RatingField[] {
  const toOptions = (doc: Record<string, string>): RatingOption[] =>
    Object.entries(doc)
      .map(([value, label]) => ({ value: Number(value), label }))
      .sort((a, b) => a.value - b.value);
  return [
    {
      name: "outcome",
      prompt: "How close is the final result to what you needed?",
      options: toOptions(labels.outcome),
    },
    {
      name: "satisfaction",
      prompt: "How satisfied are you with the collaboration?",
      options: toOptions(labels.satisfaction),
    },
  ];
}

export interface ActionForm {
  name: string;
  description: string;
  fields: string[];
}

/** Task-action submission forms from the session's menu; collaboration acts
 * get dedicated chat/wait controls, so they are filtered out here. */
export function actionForms(menu: MenuEntry[]): ActionForm[] {
  const collaboration = new Set(["SEND_TEAMMATE_MESSAGE", "WAIT_TEAMMATE_CONTINUE"]);
  return menu
    .filter((entry) => !collaboration.has(entry.name))
    .map((entry) => ({
      name: entry.name,
      description: entry.description,
      fields: entry.signature
        .slice(entry.signature.indexOf("(") + 1, entry.signature.lastIndexOf(")"))
        .split(", ")
        .map((part) => part.split("=")[0] ?? "")
        .filter((field) => field.length > 0),
    }));
}

export function notificationSummary(state: UiSessionState): string[] {
  const NAMES: Record<string, string> = {
    shared_update: "shared workspace update",
    private_update: "private view update",
    new_message: "new message",
    idle_tick: "idle reminder",
  };
  return Object.entries(state.badges)
    .filter(([, count]) => count > 0)
    .map(([kind, count]) => `${count} ${NAMES[kind] ?? kind}${count === 1 ? "" : "s"}`);
}
