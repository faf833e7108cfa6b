// Trailing debounce; panel controls coalesce rapid slider moves into one
// command after 75 ms of quiet.

export const PANEL_DEBOUNCE_MS = 75;

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number = PANEL_DEBOUNCE_MS,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, waitMs);
  };
}
