/**
 * Client-side shape checks and render helpers.
 *
 * The server re-validates everything; these mirrors exist so the UI never
 * submits a shape the service would bounce, and so selection/handles work
 * without a round trip.
 */

import type { Shape, XY } from "./types.js";

export interface ShapeProblem {
  code: string;
  message: string;
  severity: "error" | "warning";
}

function vertices(s: { all_points_x: number[]; all_points_y: number[] }): XY[] {
  return s.all_points_x.map((x, i) => ({ x, y: s.all_points_y[i] ?? NaN }));
}

function allCoords(s: Shape): number[] {
  switch (s.name) {
    case "rect":
      return [s.x, s.y, s.width, s.height];
    case "circle":
      return [s.cx, s.cy, s.r];
    case "ellipse":
      return [s.cx, s.cy, s.rx, s.ry];
    case "point":
      return [s.cx, s.cy];
    case "polygon":
    case "polyline":
      return [...s.all_points_x, ...s.all_points_y];
  }
}

/** Mirrors the service's shape invariants (self-intersection is a warning). */
export function validateShape(s: Shape): ShapeProblem[] {
  const out: ShapeProblem[] = [];
  const err = (code: string, message: string) => out.push({ code, message, severity: "error" });

  if (!allCoords(s).every(Number.isFinite)) {
    err("nonfinite_coordinate", "all coordinates must be finite");
    return out;
  }
  switch (s.name) {
    case "rect":
      if (s.width <= 0 || s.height <= 0) err("nonpositive_size", "width/height must be > 0");
      break;
    case "circle":
      if (s.r <= 0) err("nonpositive_size", "radius must be > 0");
      break;
    case "ellipse":
      if (s.rx <= 0 || s.ry <= 0) err("nonpositive_size", "half-axes must be > 0");
      break;
    case "point":
      break;
    case "polygon": {
      const v = vertices(s);
      if (s.all_points_x.length !== s.all_points_y.length) {
        err("bad_points", "point lists must have equal length");
      } else if (v.length < 3) {
        err("too_few_vertices", `polygon needs >= 3 vertices, got ${v.length}`);
      } else if (hasDuplicateNeighbors(v, true)) {
        err("duplicate_vertex", "consecutive vertices must differ");
      } else if (polygonSelfIntersects(v)) {
        out.push({
          code: "self_intersecting",
          message: "polygon edges cross",
          severity: "warning",
        });
      }
      break;
    }
    case "polyline": {
      const v = vertices(s);
      if (s.all_points_x.length !== s.all_points_y.length) {
        err("bad_points", "point lists must have equal length");
      } else if (v.length < 2) {
        err("too_few_vertices", `polyline needs >= 2 vertices, got ${v.length}`);
      } else if (hasDuplicateNeighbors(v, false)) {
        err("duplicate_vertex", "consecutive vertices must differ");
      }
      break;
    }
  }
  return out;
}

export function isSubmittable(s: Shape): boolean {
  return validateShape(s).every((p) => p.severity !== "error");
}

function hasDuplicateNeighbors(v: XY[], closed: boolean): boolean {
  const last = closed ? v.length : v.length - 1;
  for (let i = 0; i < last; i++) {
    const a = v[i]!;
    const b = v[(i + 1) % v.length]!;
    if (a.x === b.x && a.y === b.y) return true;
  }
  return false;
}

function orient(a: XY, b: XY, c: XY): number {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

function segmentsCross(a: XY, b: XY, c: XY, d: XY): boolean {
  const d1 = orient(c, d, a);
  const d2 = orient(c, d, b);
  const d3 = orient(a, b, c);
  const d4 = orient(a, b, d);
  return d1 * d2 < 0 && d3 * d4 < 0;
}

function polygonSelfIntersects(v: XY[]): boolean {
  const n = v.length;
  for (let i = 0; i < n; i++) {
    for (let j = i + 2; j < n; j++) {
      if (i === 0 && j === n - 1) continue;
      if (segmentsCross(v[i]!, v[(i + 1) % n]!, v[j]!, v[(j + 1) % n]!)) return true;
    }
  }
  return false;
}

export interface BBox {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
}

export function shapeBBox(s: Shape): BBox {
  switch (s.name) {
    case "rect":
      return { xmin: s.x, ymin: s.y, xmax: s.x + s.width, ymax: s.y + s.height };
    case "circle":
      return { xmin: s.cx - s.r, ymin: s.cy - s.r, xmax: s.cx + s.r, ymax: s.cy + s.r };
    case "ellipse":
      return { xmin: s.cx - s.rx, ymin: s.cy - s.ry, xmax: s.cx + s.rx, ymax: s.cy + s.ry };
    case "point":
      return { xmin: s.cx, ymin: s.cy, xmax: s.cx, ymax: s.cy };
    case "polygon":
    case "polyline":
      return {
        xmin: Math.min(...s.all_points_x),
        ymin: Math.min(...s.all_points_y),
        xmax: Math.max(...s.all_points_x),
        ymax: Math.max(...s.all_points_y),
      };
  }
}

/** Control points for handle rendering, same order the service documents. */
export function controlPoints(s: Shape): XY[] {
  switch (s.name) {
    case "rect":
      return [
        { x: s.x, y: s.y },
        { x: s.x + s.width, y: s.y },
        { x: s.x + s.width, y: s.y + s.height },
        { x: s.x, y: s.y + s.height },
      ];
    case "circle":
    case "ellipse":
      return [{ x: s.cx, y: s.cy }];
    case "point":
      return [{ x: s.cx, y: s.cy }];
    case "polygon":
    case "polyline":
      return vertices(s);
  }
}
