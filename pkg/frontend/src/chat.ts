// Chat widget: transcript, streaming reply, processing/queued indicators.
// Empty input never sends; messages typed while a loop runs are queued by
// the server and the indicator says so.

import type { Store } from "./state.js";

export interface ChatDeps {
  send: (text: string) => void;
}

export function createChat(root: HTMLElement, store: Store, deps: ChatDeps) {
  root.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = "Chat";
  root.appendChild(heading);

  const transcript = document.createElement("div");
  transcript.className = "transcript";
  root.appendChild(transcript);

  const indicator = document.createElement("div");
  indicator.className = "processing-indicator";
  root.appendChild(indicator);

  const form = document.createElement("form");
  const input = document.createElement("input");
  input.type = "text";
  input.className = "chat-input";
  input.placeholder = "describe what you want to see…";
  const send = document.createElement("button");
  send.type = "submit";
  send.className = "chat-send";
  send.textContent = "send";
  form.append(input, send);
  root.appendChild(form);

  const refreshSendState = () => {
    send.disabled = input.value.trim().length === 0;
  };
  input.addEventListener("input", refreshSendState);
  refreshSendState();

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    deps.send(text);
    input.value = "";
    refreshSendState();
  });

  store.subscribe((state) => {
    transcript.innerHTML = "";
    for (const line of state.transcript) {
      const p = document.createElement("p");
      p.className = `chat-line chat-${line.role}`;
      p.textContent = line.text;
      transcript.appendChild(p);
    }
    if (state.streamBuffer) {
      const p = document.createElement("p");
      p.className = "chat-line chat-agent chat-streaming";
      p.textContent = state.streamBuffer;
      transcript.appendChild(p);
    }
    transcript.scrollTop = transcript.scrollHeight;
    if (state.processing) {
      indicator.textContent =
        state.queued > 0 ? `Processing… (${state.queued} queued)` : "Processing…";
      indicator.classList.add("active");
    } else {
      indicator.textContent = "";
      indicator.classList.remove("active");
    }
  });
}
