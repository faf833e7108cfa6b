import { beforeEach, describe, expect, it } from "vitest";

import { createChat } from "../src/chat.js";
import { Store } from "../src/state.js";

describe("chat widget", () => {
  let root: HTMLElement;
  let store: Store;
  let sent: string[];

  beforeEach(() => {
    root = document.createElement("div");
    document.body.appendChild(root);
    store = new Store();
    sent = [];
    createChat(root, store, { send: (text) => sent.push(text) });
  });

  function input(): HTMLInputElement {
    return root.querySelector(".chat-input")!;
  }

  function sendButton(): HTMLButtonElement {
    return root.querySelector(".chat-send")!;
  }

  it("disables send while the input is empty", () => {
    expect(sendButton().disabled).toBe(true);
    input().value = "   ";
    input().dispatchEvent(new Event("input"));
    expect(sendButton().disabled).toBe(true);
    input().value = "show the fins";
    input().dispatchEvent(new Event("input"));
    expect(sendButton().disabled).toBe(false);
  });

  it("submitting sends the trimmed text and clears the input", () => {
    input().value = "  hide the body  ";
    input().dispatchEvent(new Event("input"));
    root.querySelector("form")!.dispatchEvent(new Event("submit"));
    expect(sent).toEqual(["hide the body"]);
    expect(input().value).toBe("");
    expect(sendButton().disabled).toBe(true);
  });

  it("shows the processing indicator until idle, with queue depth", () => {
    const indicator = () => root.querySelector(".processing-indicator")!.textContent;
    store.dispatch({ type: "chat_sent", text: "one" });
    expect(indicator()).toBe("Processing…");
    store.dispatch({ type: "chat_sent", text: "two" });
    expect(indicator()).toBe("Processing… (1 queued)");
    const outcome = {
      reply: "", iterations: 1, completed: true, aborted: false, executed_commands: [],
    };
    store.dispatch({ type: "event", event: { type: "status", state: "idle", outcome } });
    expect(indicator()).toBe("Processing…");
    store.dispatch({ type: "event", event: { type: "status", state: "idle", outcome } });
    expect(indicator()).toBe("");
  });

  it("renders streamed tokens then the final transcript line", () => {
    store.dispatch({ type: "chat_sent", text: "hello" });
    store.dispatch({ type: "event", event: { type: "token", text: "Hi " } });
    store.dispatch({ type: "event", event: { type: "token", text: "there." } });
    expect(root.querySelector(".chat-streaming")!.textContent).toBe("Hi there.");
    store.dispatch({
      type: "event",
      event: {
        type: "status",
        state: "idle",
        outcome: { reply: "", iterations: 1, completed: true, aborted: false, executed_commands: [] },
      },
    });
    const lines = [...root.querySelectorAll(".chat-line")].map((el) => el.textContent);
    expect(lines).toEqual(["hello", "Hi there."]);
    expect(root.querySelector(".chat-streaming")).toBeNull();
  });
});
