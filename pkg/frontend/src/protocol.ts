// Wire types mirroring the gateway's HTTP/WebSocket protocol, plus the
// range clamps of the command grammar so the UI never emits an invalid value.

export interface FrameEvent {
  type: "frame";
  seq: number;
  width: number;
  height: number;
  png_base64: string;
}

export interface TokenEvent {
  type: "token";
  text: string;
}

export interface StatusEvent {
  type: "status";
  state: "processing" | "idle";
  outcome?: ChatOutcome;
  result?: { status: string; detail: string; code: string | null };
}

export interface LogEvent {
  type: "log";
  entry: LogEntry;
}

export interface ErrorEvent {
  type: "error";
  message: string;
}

export type GatewayEvent = FrameEvent | TokenEvent | StatusEvent | LogEvent | ErrorEvent;

export interface ChatOutcome {
  reply: string;
  iterations: number;
  completed: boolean;
  aborted: boolean;
  executed_commands: string[];
}

export interface SimilarityPair {
  component_id: string;
  similarity: number;
}

export interface LogEntry {
  sequence: number;
  timestamp: number;
  kind: "command" | "tool_call" | "query_result" | "agent_reply";
  payload: string;
  detail: string;
  similarities: SimilarityPair[] | null;
  tool_call_id: string | null;
}

export interface ComponentInfo {
  id: string;
  label: string;
  palette_color: [number, number, number] | null;
  primitive_count: number;
}

export interface SceneInfo {
  scene_id: string;
  kind: string;
  components: ComponentInfo[];
  has_embeddings: boolean;
  knowledge_entries: number;
}

export interface SessionInfo {
  session_id: string;
  scene_id: string;
  width: number;
  height: number;
  frame_seq: number;
}

export interface ComponentEditState {
  id: string;
  label: string;
  palette_color: [number, number, number];
  visible: boolean;
  opacity_scale: number;
  color_override: [number, number, number] | null;
  light_gains: [number, number, number, number];
}

export interface SessionStateSnapshot {
  session_id: string;
  scene_id: string;
  components: ComponentEditState[];
  light: { azimuth: number; polar: number; magnitude: number; mode: string };
  background: [number, number, number];
  render_mode: string;
  frame_seq: number;
}

export type CommandPayload = { cmd: string } & Record<string, unknown>;

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

// grammar ranges enforced client-side; the server re-validates anyway
export const commands = {
  setColor(component: string, rgb: [number, number, number]): CommandPayload {
    return { cmd: "set_color", component, rgb: rgb.map((c) => clamp(c, 0, 1)) };
  },
  setOpacity(component: string, scale: number): CommandPayload {
    return { cmd: "set_opacity", component, scale: clamp(scale, 0, 2) };
  },
  setVisibility(component: string, visible: boolean): CommandPayload {
    return { cmd: "set_visibility", component, visible };
  },
  setLighting(target: string, magnitude: number): CommandPayload {
    return { cmd: "set_lighting", target, magnitude: Math.max(0, magnitude) };
  },
  setLightDirection(azimuth: number, polar: number): CommandPayload {
    return { cmd: "set_light_direction", azimuth, polar: clamp(polar, 0, Math.PI) };
  },
  setBackground(rgb: [number, number, number]): CommandPayload {
    return { cmd: "set_background", rgb: rgb.map((c) => clamp(c, 0, 1)) };
  },
  setRenderMode(mode: string): CommandPayload {
    return { cmd: "set_render_mode", mode };
  },
  bestView(component: string): CommandPayload {
    return { cmd: "best_view", component };
  },
  resetAll(): CommandPayload {
    return { cmd: "reset", target: "all" };
  },
};

export function hexToRgb(hex: string): [number, number, number] {
  const v = parseInt(hex.replace("#", ""), 16);
  return [((v >> 16) & 255) / 255, ((v >> 8) & 255) / 255, (v & 255) / 255];
}

export function rgbToHex(rgb: [number, number, number]): string {
  const to = (c: number) =>
    Math.round(Math.min(1, Math.max(0, c)) * 255)
      .toString(16)
      .padStart(2, "0");
  return `#${to(rgb[0])}${to(rgb[1])}${to(rgb[2])}`;
}
