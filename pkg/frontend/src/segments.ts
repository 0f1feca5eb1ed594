/**
 * Timeline segment editing: edge and body drags with grid snapping.
 *
 * Every function clamps rather than throws — a drag can wander anywhere, the
 * resulting segment must still satisfy 0 <= start < end <= duration. The
 * minimum segment width is one grid step.
 */

export interface Segment {
  start: number;
  end: number;
}

export const DEFAULT_SNAP_GRID = 0.1; // seconds

/** Snap to the nearest grid multiple; exact ties round up. */
export function snapTime(t: number, grid: number): number {
  if (!(grid > 0)) throw new Error(`grid must be > 0, got ${grid}`);
  return Math.floor(t / grid + 0.5) * grid;
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}

/** Drag one edge to time `t`; the other edge stays put. */
export function dragEdge(
  seg: Segment,
  edge: "start" | "end",
  t: number,
  grid: number = DEFAULT_SNAP_GRID,
  duration: number = Infinity,
): Segment {
  const snapped = snapTime(clamp(t, 0, duration), grid);
  if (edge === "start") {
    // cannot cross the end; leave at least one grid step
    return { start: clamp(snapped, 0, Math.max(seg.end - grid, 0)), end: seg.end };
  }
  return { start: seg.start, end: clamp(snapped, seg.start + grid, duration) };
}

/** Translate the whole segment by `dt`, clamped into [0, duration]. */
export function dragBody(seg: Segment, dt: number, duration: number = Infinity): Segment {
  const width = seg.end - seg.start;
  const start = clamp(seg.start + dt, 0, duration - width);
  return { start, end: start + width };
}

/** Lay out per-label lanes for rendering; labels sorted, segments by start. */
export function laneLayout<T extends { label: string | null }>(
  segments: readonly (Segment & T)[],
): { label: string | null; segments: (Segment & T)[] }[] {
  const byLabel = new Map<string | null, (Segment & T)[]>();
  for (const s of segments) {
    const lane = byLabel.get(s.label) ?? [];
    lane.push(s);
    byLabel.set(s.label, lane);
  }
  const labels = [...byLabel.keys()].sort((a, b) =>
    a === null ? 1 : b === null ? -1 : a.localeCompare(b),
  );
  return labels.map((label) => ({
    label,
    segments: byLabel.get(label)!.slice().sort((a, b) => a.start - b.start || a.end - b.end),
  }));
}
