/**
 * One gateway websocket per tab.  The socket implementation is injected so
 * tests (and non-browser hosts) can drive the client with a fake; the class
 * only owns message framing, echo accounting and reconnect state.
 */

import {
  actionMessage,
  chatAction,
  finishAction,
  parseServerFrame,
  ratingMessage,
  waitAction,
  WAIT_WIRE,
  type ActionMessage,
  type RatingMessage,
} from "./protocol";
import {
  actionSubmitted,
  applyFrame,
  initialState,
  queueChat,
  setConnection,
  setStatus,
  type ComponentSchema,
  type Mode,
  type UiSessionState,
} from "./state";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface GatewayOptions {
  baseUrl: string;
  sessionId: string;
  token: string;
  role: string;
  mode?: Mode;
  schema?: ComponentSchema[];
  socketFactory: SocketFactory;
  onChange?: (state: UiSessionState) => void;
  reconnectDelayMs?: number;
  /** Injected timer for tests; defaults to setTimeout. */
  schedule?: (fn: () => void, ms: number) => void;
}

export class GatewayClient {
  state: UiSessionState;
  /** Raw sent messages, newest last; the contract tests read these. */
  readonly sentLog: string[] = [];
  reconnectAttempts = 0;

  private socket: SocketLike | null = null;
  private expectedEchoes = 0;

  constructor(private readonly opts: GatewayOptions) {
    this.state = initialState(opts.role, { mode: opts.mode, schema: opts.schema });
  }

  url(): string {
    const base = this.opts.baseUrl.replace(/\/$/, "");
    const token = encodeURIComponent(this.opts.token);
    const role = encodeURIComponent(this.opts.role);
    return `${base}/ws/${this.opts.sessionId}?token=${token}&role=${role}`;
  }

  connect(): void {
    const socket = this.opts.socketFactory(this.url());
    this.socket = socket;
    this.update(setConnection(this.state, "connecting"));
    socket.onopen = () => this.update(setConnection(this.state, "open"));
    socket.onmessage = (event) => this.receive(event.data);
    socket.onclose = () => this.handleClose();
  }

  close(): void {
    const socket = this.socket;
    this.socket = null; // suppress the reconnect path for deliberate closes
    if (socket) {
      socket.onclose = null;
      socket.close();
    }
    this.update(setConnection(this.state, "closed"));
  }

  receive(raw: string): void {
    const frame = parseServerFrame(raw);
    const echo = this.state.mode === "async" && this.expectedEchoes > 0;
    if (echo) this.expectedEchoes -= 1;
    this.update(applyFrame(this.state, frame, { echo }));
  }

  /** Every user gesture maps to exactly one wire action string. */
  submitAction(wire: string): string {
    const message = actionMessage(wire);
    this.send(message);
    if (this.state.mode === "async") {
      // waits are silent server-side, everything else echoes one frame back
      if (wire !== WAIT_WIRE) this.expectedEchoes += 1;
    } else {
      this.update(actionSubmitted(this.state));
    }
    return wire;
  }

  /** Chat never locks: consecutive sends are fine, echoes reconcile later. */
  sendChat(text: string): string {
    this.update(queueChat(this.state, text));
    return this.submitAction(chatAction(text));
  }

  wait(): string {
    return this.submitAction(waitAction());
  }

  finishSession(): string {
    return this.submitAction(finishAction());
  }

  submitRatings(outcome: number, satisfaction: number): void {
    this.send(ratingMessage(outcome, satisfaction));
  }

  /** Resync from an HTTP status document (page reload, reconnect). */
  applyStatus(status: { current_turn?: string | null; done?: boolean }): void {
    this.update(setStatus(this.state, status));
  }

  private handleClose(): void {
    if (this.socket === null) return; // close() already settled the state
    if (this.state.done) {
      this.update(setConnection(this.state, "closed"));
      return;
    }
    this.reconnectAttempts += 1;
    this.update(setConnection(this.state, "reconnecting"));
    const schedule = this.opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    schedule(() => this.connect(), this.opts.reconnectDelayMs ?? 1000);
  }

  private send(message: ActionMessage | RatingMessage): void {
    if (!this.socket) throw new Error("gateway not connected");
    const raw = JSON.stringify(message);
    this.sentLog.push(raw);
    this.socket.send(raw);
  }

  private update(next: UiSessionState): void {
    this.state = next;
    this.opts.onChange?.(next);
  }
}
