/**
 * Session state as a pure projection of gateway payloads.
 *
 * Every server frame carries the recipient's full snapshot, so the reducer
 * simply replaces the observation and chat wholesale; there is no UI-local
 * task state to drift.  The only client-side extras are ephemeral UX bits:
 * unseen-notification badges, optimistic chat echoes and connection status.
 */

import type { ChatMessage, EndFrame, ErrorFrame, ServerFrame } from "./protocol";

export type ConnectionStatus = "connecting" | "open" | "reconnecting" | "closed";

export type Mode = "async" | "turn_taking";

export interface ComponentSchema {
  name: string;
  visibility: "public" | "private";
}

export interface UiSessionState {
  role: string;
  mode: Mode;
  schema: ComponentSchema[];
  connection: ConnectionStatus;
  observation: Record<string, unknown>;
  chat: ChatMessage[];
  /** Optimistic echoes: chat texts sent but not yet confirmed by a frame. */
  pendingChat: string[];
  /** Unseen notification counts keyed by frame kind. */
  badges: Record<string, number>;
  /** turn_taking only: whose turn the client believes it is (null = not ours). */
  currentTurn: string | null;
  lastError: string | null;
  done: boolean;
  reward: number | null;
  timestamp: number;
}

export interface InitialOptions {
  mode?: Mode;
  schema?: ComponentSchema[];
}

export function initialState(role: string, opts: InitialOptions = {}): UiSessionState {
  const mode = opts.mode ?? "async";
  return {
    role,
    mode,
    schema: opts.schema ?? [],
    connection: "connecting",
    observation: {},
    chat: [],
    pendingChat: [],
    badges: {},
    // humans move first in turn mode, so the session opens unlocked
    currentTurn: mode === "turn_taking" ? role : null,
    lastError: null,
    done: false,
    reward: null,
    timestamp: 0,
  };
}

const NOTIFYING_KINDS = new Set([
  "shared_update",
  "private_update",
  "new_message",
  "idle_tick",
]);

export interface ApplyOptions {
  /** True when this frame is the direct echo of our own submission. */
  echo?: boolean;
}

export function applyFrame(
  state: UiSessionState,
  frame: ServerFrame,
  opts: ApplyOptions = {}
): UiSessionState {
  const next: UiSessionState = { ...state, badges: { ...state.badges } };
  next.timestamp = frame.timestamp;

  if (frame.type === "error") {
    next.lastError = (frame as ErrorFrame).error;
    if (state.mode === "turn_taking") {
      // rejections never advance the turn, and error frames only reach the
      // sender, so whatever we just tried left the turn where it was
      next.currentTurn = state.role;
    }
    return next;
  }

  next.lastError = null;
  next.observation = frame.observation;
  next.chat = frame.chat;
  next.pendingChat = state.pendingChat.filter(
    (text) => !frame.chat.some((m) => m.sender === state.role && m.message === text)
  );

  if (frame.type === "end") {
    next.done = true;
    next.reward = (frame as EndFrame).reward;
    next.currentTurn = null;
    return next;
  }

  if (!opts.echo && NOTIFYING_KINDS.has(frame.kind)) {
    next.badges[frame.kind] = (next.badges[frame.kind] ?? 0) + 1;
  }
  if (state.mode === "turn_taking") {
    // in turn mode the server nudges only the party now up
    next.currentTurn = state.role;
  }
  return next;
}

export function queueChat(state: UiSessionState, text: string): UiSessionState {
  return { ...state, pendingChat: [...state.pendingChat, text] };
}

/** Called right after a gesture goes out; in turn mode the turn passes. */
export function actionSubmitted(state: UiSessionState): UiSessionState {
  if (state.mode !== "turn_taking") return state;
  return { ...state, currentTurn: null };
}

/** Merge an authoritative HTTP status snapshot (reload / resync path). */
export function setStatus(
  state: UiSessionState,
  status: { current_turn?: string | null; done?: boolean }
): UiSessionState {
  return {
    ...state,
    currentTurn: status.current_turn !== undefined ? status.current_turn : state.currentTurn,
    done: status.done ?? state.done,
  };
}

export function setConnection(
  state: UiSessionState,
  connection: ConnectionStatus
): UiSessionState {
  return { ...state, connection };
}

export function clearBadges(state: UiSessionState, kind?: string): UiSessionState {
  if (kind === undefined) return { ...state, badges: {} };
  const badges = { ...state.badges };
  delete badges[kind];
  return { ...state, badges };
}

export function clearError(state: UiSessionState): UiSessionState {
  return { ...state, lastError: null };
}

/** The turn-taking overlay: block input whenever it is not our turn. */
export function inputLocked(state: UiSessionState): boolean {
  if (state.done) return true;
  if (state.mode !== "turn_taking") return false;
  return state.currentTurn !== state.role;
}
