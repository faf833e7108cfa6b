import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { GatewayClient, type WebSocketLike } from "../src/client.js";
import type { GatewayEvent } from "../src/protocol.js";

class FakeSocket implements WebSocketLike {
  static instances: FakeSocket[] = [];
  url: string;
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  constructor(url: string) {
    this.url = url;
    FakeSocket.instances.push(this);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.onclose?.();
  }

  serverOpen(): void {
    this.onopen?.();
  }

  serverSend(event: unknown): void {
    this.onmessage?.({ data: JSON.stringify(event) });
  }

  serverDrop(): void {
    this.onclose?.();
  }
}

function makeClient(events: GatewayEvent[], states: string[]) {
  const client = new GatewayClient(
    "http://gateway.test",
    {
      onEvent: (e) => events.push(e),
      onSocket: (s) => states.push(s),
    },
    (url) => new FakeSocket(url),
  );
  client.sessionId = "sess42";
  return client;
}

beforeEach(() => {
  FakeSocket.instances = [];
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("GatewayClient", () => {
  it("connects to the session websocket and forwards events", () => {
    const events: GatewayEvent[] = [];
    const states: string[] = [];
    const client = makeClient(events, states);
    client.connect();
    const socket = FakeSocket.instances[0];
    expect(socket.url).toBe("ws://gateway.test/sessions/sess42/ws");
    socket.serverOpen();
    socket.serverSend({ type: "token", text: "hi" });
    expect(states).toEqual(["connecting", "open"]);
    expect(events).toEqual([{ type: "token", text: "hi" }]);
  });

  it("reconnects with bounded exponential backoff to the same session", () => {
    const states: string[] = [];
    const client = makeClient([], states);
    client.connect();
    FakeSocket.instances[0].serverOpen();
    FakeSocket.instances[0].serverDrop();
    expect(states.at(-1)).toBe("reconnecting");

    vi.advanceTimersByTime(500); // first retry
    expect(FakeSocket.instances).toHaveLength(2);
    expect(FakeSocket.instances[1].url).toContain("sess42"); // session affinity
    FakeSocket.instances[1].serverDrop();
    vi.advanceTimersByTime(999);
    expect(FakeSocket.instances).toHaveLength(2); // 2nd delay is 1000ms
    vi.advanceTimersByTime(1);
    expect(FakeSocket.instances).toHaveLength(3);

    // delays cap at 8s no matter how many failures pile up
    for (let i = 0; i < 10; i++) {
      FakeSocket.instances.at(-1)!.serverDrop();
      vi.advanceTimersByTime(8000);
    }
    expect(FakeSocket.instances.length).toBe(13);
  });

  it("stops reconnecting after an explicit close", () => {
    const states: string[] = [];
    const client = makeClient([], states);
    client.connect();
    FakeSocket.instances[0].serverOpen();
    client.close();
    vi.advanceTimersByTime(60000);
    expect(FakeSocket.instances).toHaveLength(1);
    expect(states.at(-1)).toBe("closed");
  });

  it("serializes chat and command messages", () => {
    const client = makeClient([], []);
    client.connect();
    const socket = FakeSocket.instances[0];
    socket.serverOpen();
    client.sendChat("show the fins");
    client.sendCommand({ cmd: "reset", target: "all" });
    expect(JSON.parse(socket.sent[0])).toEqual({ type: "chat", text: "show the fins" });
    expect(JSON.parse(socket.sent[1])).toEqual({
      type: "command",
      payload: { cmd: "reset", target: "all" },
    });
  });

  it("drops malformed frames without crashing", () => {
    const events: GatewayEvent[] = [];
    const client = makeClient(events, []);
    client.connect();
    const socket = FakeSocket.instances[0];
    socket.serverOpen();
    socket.onmessage?.({ data: "not json" });
    expect(events).toEqual([]);
  });
});
