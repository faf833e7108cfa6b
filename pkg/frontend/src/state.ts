// Single-reducer UI state: every WebSocket event and local action funnels
// through reduce(), which makes display invariants (monotonic frame
// sequence, processing indicator lifecycle) easy to test.

import type { GatewayEvent, LogEntry, SessionStateSnapshot } from "./protocol.js";

export interface ChatLine {
  role: "user" | "agent" | "error" | "info";
  text: string;
}

export interface UiState {
  connection: "connecting" | "open" | "reconnecting" | "closed";
  frameSeq: number;
  frameDataUrl: string | null;
  /** chat requests sent but not yet answered; > 1 means some are queued */
  pending: number;
  processing: boolean;
  queued: number;
  transcript: ChatLine[];
  streamBuffer: string;
  log: LogEntry[];
  snapshot: SessionStateSnapshot | null;
}

export function initialState(): UiState {
  return {
    connection: "connecting",
    frameSeq: 0,
    frameDataUrl: null,
    pending: 0,
    processing: false,
    queued: 0,
    transcript: [],
    streamBuffer: "",
    log: [],
    snapshot: null,
  };
}

export type UiAction =
  | { type: "socket"; state: UiState["connection"] }
  | { type: "chat_sent"; text: string }
  | { type: "state_sync"; snapshot: SessionStateSnapshot }
  | { type: "event"; event: GatewayEvent };

export function reduce(state: UiState, action: UiAction): UiState {
  switch (action.type) {
    case "socket":
      return { ...state, connection: action.state };
    case "chat_sent": {
      const pending = state.pending + 1;
      return {
        ...state,
        pending,
        processing: true,
        queued: Math.max(0, pending - 1),
        transcript: [...state.transcript, { role: "user", text: action.text }],
      };
    }
    case "state_sync":
      return { ...state, snapshot: action.snapshot };
    case "event":
      return reduceEvent(state, action.event);
  }
}

function reduceEvent(state: UiState, event: GatewayEvent): UiState {
  switch (event.type) {
    case "frame": {
      // stale frames (lower or equal sequence) are discarded
      if (event.seq <= state.frameSeq) {
        return state;
      }
      return {
        ...state,
        frameSeq: event.seq,
        frameDataUrl: `data:image/png;base64,${event.png_base64}`,
      };
    }
    case "token":
      return { ...state, streamBuffer: state.streamBuffer + event.text };
    case "status": {
      if (event.state === "processing") {
        return { ...state, processing: true };
      }
      // idle: flush any streamed reply into the transcript; an outcome marks
      // one pending chat request as finished
      const transcript = state.streamBuffer.trim()
        ? [...state.transcript, { role: "agent" as const, text: state.streamBuffer.trim() }]
        : state.transcript;
      const pending = event.outcome ? Math.max(0, state.pending - 1) : state.pending;
      return {
        ...state,
        pending,
        processing: pending > 0,
        queued: Math.max(0, pending - 1),
        transcript,
        streamBuffer: "",
      };
    }
    case "log": {
      const log = [...state.log, event.entry];
      log.sort((a, b) => a.sequence - b.sequence);
      return { ...state, log };
    }
    case "error":
      return {
        ...state,
        transcript: [...state.transcript, { role: "error", text: event.message }],
      };
  }
}

export type Listener = (state: UiState) => void;

export class Store {
  private state: UiState = initialState();
  private listeners: Listener[] = [];

  get(): UiState {
    return this.state;
  }

  dispatch(action: UiAction): void {
    this.state = reduce(this.state, action);
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
