// Action log pane: entries in sequence order; open-vocabulary query results
// render as a per-component similarity table, commands show their canonical
// serialization verbatim.

import type { LogEntry } from "./protocol.js";

export function renderLog(root: HTMLElement, entries: LogEntry[]): void {
  root.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = "Action log";
  root.appendChild(heading);
  const list = document.createElement("ol");
  list.className = "log-entries";
  for (const entry of entries) {
    list.appendChild(renderEntry(entry));
  }
  root.appendChild(list);
  root.scrollTop = root.scrollHeight;
}

function renderEntry(entry: LogEntry): HTMLElement {
  const item = document.createElement("li");
  item.className = `log-entry log-${entry.kind}`;
  item.dataset.sequence = String(entry.sequence);

  const head = document.createElement("div");
  head.className = "log-head";
  head.textContent = `#${entry.sequence} ${entry.kind}`;
  item.appendChild(head);

  if (entry.kind === "query_result" && entry.similarities) {
    const query = document.createElement("div");
    query.className = "log-query";
    query.textContent = `query: ${entry.payload}`;
    item.appendChild(query);
    item.appendChild(similarityTable(entry.similarities));
  } else {
    const body = document.createElement("code");
    body.className = "log-payload";
    body.textContent = entry.payload;
    item.appendChild(body);
  }
  return item;
}

export function similarityTable(
  pairs: { component_id: string; similarity: number }[],
): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "similarity-table";
  const header = table.insertRow();
  for (const text of ["component", "similarity"]) {
    const th = document.createElement("th");
    th.textContent = text;
    header.appendChild(th);
  }
  const sorted = [...pairs].sort((a, b) => b.similarity - a.similarity);
  for (const pair of sorted) {
    const row = table.insertRow();
    row.insertCell().textContent = pair.component_id;
    row.insertCell().textContent = pair.similarity.toFixed(4);
  }
  return table;
}
