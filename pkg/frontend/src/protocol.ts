/**
 * Gateway wire protocol.
 *
 * Server frames arrive as JSON with a `type` discriminator and always carry
 * the recipient's full snapshot, so no frame ever needs history to render.
 * Client messages are `action` and `rating`.  Action strings must match the
 * server grammar byte for byte: `NAME(key=value, key=value)` with parameter
 * values spliced in verbatim.
 */

export const PROTOCOL_VERSION = 1;

export interface ChatMessage {
  sender: string;
  message: string;
  timestamp: number;
}

interface FrameBase {
  protocol_version: number;
  /** Notification kind: shared_update, private_update, new_message, idle_tick, error, end. */
  kind: string;
  /** The recipient's role; the server renders each frame per recipient. */
  role: string;
  observation: Record<string, unknown>;
  chat: ChatMessage[];
  timestamp: number;
}

export interface ObservationFrame extends FrameBase {
  type: "observation";
}

export interface ChatFrame extends FrameBase {
  type: "chat";
}

export interface ErrorFrame extends FrameBase {
  type: "error";
  error: string;
}

export interface EndFrame extends FrameBase {
  type: "end";
  reward: number;
  digest: string;
}

export type ServerFrame = ObservationFrame | ChatFrame | ErrorFrame | EndFrame;

export class ProtocolError extends Error {}

const FRAME_TYPES = new Set(["observation", "chat", "error", "end"]);

export function parseServerFrame(raw: string): ServerFrame {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (err) {
    throw new ProtocolError(`frame is not JSON: ${err}`);
  }
  const frame = doc as Partial<ServerFrame> | null;
  if (!frame || typeof frame !== "object" || !FRAME_TYPES.has(frame.type ?? "")) {
    throw new ProtocolError(`unknown frame type ${JSON.stringify(frame?.type)}`);
  }
  if (frame.protocol_version !== PROTOCOL_VERSION) {
    throw new ProtocolError(
      `protocol version ${frame.protocol_version}, expected ${PROTOCOL_VERSION}`
    );
  }
  return frame as ServerFrame;
}

export interface ActionMessage {
  type: "action";
  action: string;
  protocol_version: number;
}

export interface RatingMessage {
  type: "rating";
  outcome: number;
  satisfaction: number;
  protocol_version: number;
}

export function actionMessage(action: string): ActionMessage {
  return { type: "action", action, protocol_version: PROTOCOL_VERSION };
}

/** Ratings are 1..5 integers; anything else is a caller bug, not a server round trip. */
export function ratingMessage(outcome: number, satisfaction: number): RatingMessage {
  for (const [label, value] of [
    ["outcome", outcome],
    ["satisfaction", satisfaction],
  ] as const) {
    if (!Number.isInteger(value) || value < 1 || value > 5) {
      throw new RangeError(`${label} must be an integer in 1..5, got ${value}`);
    }
  }
  return { type: "rating", outcome, satisfaction, protocol_version: PROTOCOL_VERSION };
}

export function buildAction(name: string, params: Array<[string, string]>): string {
  const inner = params.map(([key, value]) => `${key}=${value}`).join(", ");
  return `${name}(${inner})`;
}

export function chatAction(text: string): string {
  return buildAction("SEND_TEAMMATE_MESSAGE", [["message", text]]);
}

export function waitAction(): string {
  return buildAction("WAIT_TEAMMATE_CONTINUE", []);
}

export function finishAction(): string {
  return buildAction("FINISH", []);
}

export const WAIT_WIRE = waitAction();

export interface MenuEntry {
  name: string;
  signature: string;
  description: string;
}

/** Ordered parameter names from a menu signature like "NAME(a=..., b=...)". */
export function signatureParams(signature: string): string[] {
  const inner = signature.slice(signature.indexOf("(") + 1, signature.lastIndexOf(")"));
  if (!inner.trim()) return [];
  return inner.split(", ").map((part) => part.split("=")[0] ?? "");
}

/** Build the wire string for a task-action form; parameter order comes from the menu. */
export function actionFromForm(entry: MenuEntry, values: Record<string, string>): string {
  const order = signatureParams(entry.signature);
  const missing = order.filter((name) => values[name] === undefined);
  if (missing.length) {
    throw new ProtocolError(`${entry.name}: missing ${missing.join(", ")}`);
  }
  return buildAction(
    entry.name,
    order.map((name) => [name, values[name] as string])
  );
}
