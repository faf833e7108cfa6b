// Studio bootstrap: four panes (control panel, rendering window, chat,
// action log) wired to one gateway session.

import { GatewayClient } from "./client.js";
import { createChat } from "./chat.js";
import { renderLog } from "./log.js";
import { createPanel } from "./panel.js";
import { Store } from "./state.js";

function pane(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing pane #${id}`);
  return el;
}

export async function startStudio(baseUrl?: string): Promise<void> {
  const base = baseUrl ?? new URLSearchParams(location.search).get("gateway") ?? location.origin;
  const store = new Store();

  const client = new GatewayClient(base, {
    onEvent: (event) => store.dispatch({ type: "event", event }),
    onSocket: (state) => store.dispatch({ type: "socket", state }),
  });

  const scenes = await client.listScenes();
  const renderable = scenes.filter((s) => s.kind === "full");
  if (renderable.length === 0) {
    pane("render-pane").textContent = "no renderable scenes on this gateway";
    return;
  }
  const wanted = new URLSearchParams(location.search).get("scene");
  const scene = renderable.find((s) => s.scene_id === wanted) ?? renderable[0];
  await client.createSession(scene.scene_id);
  client.connect();

  // rendering window
  const renderPane = pane("render-pane");
  renderPane.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "connection-banner";
  const img = document.createElement("img");
  img.className = "frame";
  img.alt = `rendering of ${scene.scene_id}`;
  renderPane.append(banner, img);

  store.subscribe((state) => {
    if (state.frameDataUrl) img.src = state.frameDataUrl;
    banner.textContent = state.connection === "open" ? "" : state.connection;
    banner.classList.toggle("visible", state.connection !== "open");
  });

  // control panel (needs the initial state snapshot)
  const snapshot = await client.fetchState();
  store.dispatch({ type: "state_sync", snapshot });
  const panel = createPanel(pane("panel-pane"), snapshot, {
    send: (payload) => {
      client.sendCommand(payload);
      void panel.reconcile(); // snap back if the server rejected it
    },
    resetAll: () => void client.resetAll(),
    fetchState: () => client.fetchState(),
  });

  // chat widget
  createChat(pane("chat-pane"), store, {
    send: (text) => {
      store.dispatch({ type: "chat_sent", text });
      client.sendChat(text);
    },
  });

  // action log
  store.subscribe((state) => renderLog(pane("log-pane"), state.log));
}

if (typeof document !== "undefined" && document.getElementById("render-pane")) {
  startStudio().catch((err) => {
    pane("render-pane").textContent = `failed to start: ${err}`;
  });
}
