import { describe, expect, it } from "vitest";

import { renderLog, similarityTable } from "../src/log.js";
import type { LogEntry } from "../src/protocol.js";

function entry(overrides: Partial<LogEntry>): LogEntry {
  return {
    sequence: 1,
    timestamp: 0,
    kind: "command",
    payload: '{"cmd":"reset","target":"all"}',
    detail: "",
    similarities: null,
    tool_call_id: null,
    ...overrides,
  };
}

describe("action log rendering", () => {
  it("shows command entries with their canonical payload verbatim", () => {
    const root = document.createElement("div");
    renderLog(root, [entry({ payload: '{"cmd":"set_color","component":"x","rgb":[1.0,0.0,0.0]}' })]);
    const code = root.querySelector(".log-payload")!;
    expect(code.textContent).toBe('{"cmd":"set_color","component":"x","rgb":[1.0,0.0,0.0]}');
  });

  it("renders one similarity row per component, sorted descending", () => {
    const table = similarityTable([
      { component_id: "a", similarity: 0.2 },
      { component_id: "b", similarity: 0.9 },
      { component_id: "c", similarity: 0.5 },
      { component_id: "d", similarity: 0.7 },
      { component_id: "e", similarity: 0.1 },
    ]);
    const rows = [...table.rows].slice(1); // skip header
    expect(rows).toHaveLength(5);
    expect(rows.map((r) => r.cells[0].textContent)).toEqual(["b", "d", "c", "a", "e"]);
    const values = rows.map((r) => Number(r.cells[1].textContent));
    expect(values).toEqual([...values].sort((x, y) => y - x));
  });

  it("query entries render a table, ordered overall by sequence", () => {
    const root = document.createElement("div");
    renderLog(root, [
      entry({ sequence: 1, kind: "agent_reply", payload: "looking" }),
      entry({
        sequence: 2,
        kind: "query_result",
        payload: "the shiny part",
        similarities: [
          { component_id: "fin", similarity: 0.8 },
          { component_id: "body", similarity: 0.4 },
        ],
      }),
      entry({ sequence: 3 }),
    ]);
    const items = [...root.querySelectorAll<HTMLElement>(".log-entry")];
    expect(items.map((i) => i.dataset.sequence)).toEqual(["1", "2", "3"]);
    expect(items[1].querySelector(".similarity-table")).not.toBeNull();
    expect(items[1].querySelector(".log-query")!.textContent).toContain("the shiny part");
  });
});
