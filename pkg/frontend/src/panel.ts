// Control panel: per-component visibility, opacity and color, plus global
// light and background controls and the Reset All button. Control changes
// debounce into canonical commands; if the server rejects one, the panel
// snaps back to server truth.

import { debounce } from "./debounce.js";
import {
  commands,
  hexToRgb,
  rgbToHex,
  type CommandPayload,
  type SessionStateSnapshot,
} from "./protocol.js";

export interface PanelDeps {
  send: (payload: CommandPayload) => void;
  resetAll: () => void;
  fetchState: () => Promise<SessionStateSnapshot>;
}

export function createPanel(root: HTMLElement, snapshot: SessionStateSnapshot, deps: PanelDeps) {
  root.innerHTML = "";
  const title = document.createElement("h2");
  title.textContent = "Controls";
  root.appendChild(title);

  const inputs: Array<() => void> = []; // snapback refreshers

  const reconcile = async () => {
    try {
      const fresh = await deps.fetchState();
      snapshot = fresh;
      for (const refresh of inputs) refresh();
    } catch {
      // gateway unreachable: the connection banner covers it
    }
  };

  for (const comp of snapshot.components) {
    const row = document.createElement("fieldset");
    row.className = "component-row";
    row.dataset.componentId = comp.id;
    const legend = document.createElement("legend");
    legend.textContent = comp.label || comp.id;
    row.appendChild(legend);

    const visible = document.createElement("input");
    visible.type = "checkbox";
    visible.className = "visible-toggle";
    visible.checked = comp.visible;
    visible.addEventListener("change", () => {
      deps.send(commands.setVisibility(comp.id, visible.checked));
    });
    const visLabel = document.createElement("label");
    visLabel.append(visible, " visible");
    row.appendChild(visLabel);

    const opacity = document.createElement("input");
    opacity.type = "range";
    opacity.className = "opacity-slider";
    opacity.min = "0";
    opacity.max = "2";
    opacity.step = "0.01";
    opacity.value = String(comp.opacity_scale);
    opacity.addEventListener(
      "input",
      debounce(() => {
        deps.send(commands.setOpacity(comp.id, Number(opacity.value)));
      }),
    );
    const opLabel = document.createElement("label");
    opLabel.append("opacity ", opacity);
    row.appendChild(opLabel);

    const color = document.createElement("input");
    color.type = "color";
    color.className = "color-picker";
    color.value = rgbToHex(comp.color_override ?? comp.palette_color);
    color.addEventListener(
      "input",
      debounce(() => {
        deps.send(commands.setColor(comp.id, hexToRgb(color.value)));
      }),
    );
    const colorLabel = document.createElement("label");
    colorLabel.append("color ", color);
    row.appendChild(colorLabel);

    const bestView = document.createElement("button");
    bestView.textContent = "best view";
    bestView.className = "best-view";
    bestView.addEventListener("click", () => deps.send(commands.bestView(comp.id)));
    row.appendChild(bestView);

    inputs.push(() => {
      const fresh = snapshot.components.find((c) => c.id === comp.id);
      if (!fresh) return;
      visible.checked = fresh.visible;
      opacity.value = String(fresh.opacity_scale);
      color.value = rgbToHex(fresh.color_override ?? fresh.palette_color);
    });
    root.appendChild(row);
  }

  const globals = document.createElement("fieldset");
  const legend = document.createElement("legend");
  legend.textContent = "scene";
  globals.appendChild(legend);

  const magnitude = document.createElement("input");
  magnitude.type = "range";
  magnitude.className = "light-magnitude";
  magnitude.min = "0";
  magnitude.max = "3";
  magnitude.step = "0.05";
  magnitude.value = String(snapshot.light.magnitude);
  magnitude.addEventListener(
    "input",
    debounce(() => deps.send(commands.setLighting("all", Number(magnitude.value)))),
  );
  const magLabel = document.createElement("label");
  magLabel.append("light ", magnitude);
  globals.appendChild(magLabel);

  const background = document.createElement("input");
  background.type = "color";
  background.className = "background-picker";
  background.value = rgbToHex(snapshot.background);
  background.addEventListener(
    "input",
    debounce(() => deps.send(commands.setBackground(hexToRgb(background.value)))),
  );
  const bgLabel = document.createElement("label");
  bgLabel.append("background ", background);
  globals.appendChild(bgLabel);

  const mode = document.createElement("select");
  mode.className = "render-mode";
  for (const value of ["shaded", "unlit", "alpha_heatmap"]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    mode.appendChild(option);
  }
  mode.value = snapshot.render_mode;
  mode.addEventListener("change", () => deps.send(commands.setRenderMode(mode.value)));
  globals.appendChild(mode);

  const reset = document.createElement("button");
  reset.textContent = "Reset All";
  reset.className = "reset-all";
  reset.addEventListener("click", () => {
    deps.resetAll();
    void reconcile();
  });
  globals.appendChild(reset);

  inputs.push(() => {
    magnitude.value = String(snapshot.light.magnitude);
    background.value = rgbToHex(snapshot.background);
    mode.value = snapshot.render_mode;
  });
  root.appendChild(globals);

  return { reconcile };
}
