// Gateway client: session creation over HTTP, live events over WebSocket
// with bounded exponential reconnect that resumes the same session.

import type {
  CommandPayload,
  GatewayEvent,
  SceneInfo,
  SessionInfo,
  SessionStateSnapshot,
} from "./protocol.js";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface ClientHooks {
  onEvent: (event: GatewayEvent) => void;
  onSocket: (state: "connecting" | "open" | "reconnecting" | "closed") => void;
}

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 8000;

export class GatewayClient {
  readonly baseUrl: string;
  sessionId: string | null = null;
  private ws: WebSocketLike | null = null;
  private makeSocket: WebSocketFactory;
  private hooks: ClientHooks;
  private attempts = 0;
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(baseUrl: string, hooks: ClientHooks, makeSocket?: WebSocketFactory) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.hooks = hooks;
    this.makeSocket = makeSocket ?? ((url) => new WebSocket(url) as unknown as WebSocketLike);
  }

  async listScenes(): Promise<SceneInfo[]> {
    const response = await fetch(`${this.baseUrl}/scenes`);
    if (!response.ok) throw new Error(`GET /scenes failed: ${response.status}`);
    return response.json();
  }

  async createSession(sceneId: string): Promise<SessionInfo> {
    const response = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scene_id: sceneId }),
    });
    if (!response.ok) throw new Error(`POST /sessions failed: ${response.status}`);
    const info: SessionInfo = await response.json();
    this.sessionId = info.session_id;
    return info;
  }

  async fetchState(): Promise<SessionStateSnapshot> {
    const response = await fetch(`${this.baseUrl}/sessions/${this.sessionId}/state`);
    if (!response.ok) throw new Error(`GET state failed: ${response.status}`);
    return response.json();
  }

  async resetAll(): Promise<void> {
    await fetch(`${this.baseUrl}/sessions/${this.sessionId}/reset`, { method: "POST" });
  }

  wsUrl(): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/sessions/${this.sessionId}/ws`;
  }

  connect(): void {
    if (!this.sessionId) throw new Error("create a session before connecting");
    this.closed = false;
    this.open(false);
  }

  private open(isReconnect: boolean): void {
    this.hooks.onSocket(isReconnect ? "reconnecting" : "connecting");
    const socket = this.makeSocket(this.wsUrl());
    this.ws = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.hooks.onSocket("open");
    };
    socket.onmessage = (ev) => {
      try {
        this.hooks.onEvent(JSON.parse(String(ev.data)) as GatewayEvent);
      } catch {
        // non-JSON frames are dropped
      }
    };
    socket.onerror = () => {
      // close follows; reconnect handled there
    };
    socket.onclose = () => {
      this.ws = null;
      if (this.closed) {
        this.hooks.onSocket("closed");
        return;
      }
      const delay = Math.min(RECONNECT_MAX_MS, RECONNECT_BASE_MS * 2 ** this.attempts);
      this.attempts += 1;
      this.hooks.onSocket("reconnecting");
      this.reconnectTimer = setTimeout(() => this.open(true), delay);
    };
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }

  sendChat(text: string): void {
    this.ws?.send(JSON.stringify({ type: "chat", text }));
  }

  sendCommand(payload: CommandPayload): void {
    this.ws?.send(JSON.stringify({ type: "command", payload }));
  }
}
