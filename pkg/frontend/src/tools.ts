/**
 * Shape tools: pointer gestures in screen space -> shapes in image space.
 *
 * Rect/circle/ellipse come from a drag, point from a click, polygon and
 * polyline from click sequences. Degenerate gestures (zero-size drags,
 * too few vertices) yield null and nothing is created; every shape returned
 * here passes validateShape, so the sync layer can trust its input.
 */

import { isSubmittable } from "./shapes.js";
import type { Shape, ShapePolygon, ShapePolyline, XY } from "./types.js";
import { ViewTransform } from "./transform.js";

export type ShapeToolName = "rect" | "circle" | "ellipse" | "point" | "polygon" | "polyline";

export const SHAPE_TOOLS: ShapeToolName[] = [
  "rect",
  "circle",
  "ellipse",
  "point",
  "polygon",
  "polyline",
];

/** Default pick radius in screen pixels, e.g. for closing a polygon. */
export const HIT_TOLERANCE_PX = 5;

function dist(a: XY, b: XY): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

/** A press-drag-release gesture for the three drag tools. */
export function shapeFromDrag(
  tool: "rect" | "circle" | "ellipse",
  view: ViewTransform,
  downScreen: XY,
  upScreen: XY,
): Shape | null {
  const a = view.screenToImage(downScreen);
  const b = view.screenToImage(upScreen);
  let shape: Shape;
  switch (tool) {
    case "rect":
      shape = {
        name: "rect",
        x: Math.min(a.x, b.x),
        y: Math.min(a.y, b.y),
        width: Math.abs(b.x - a.x),
        height: Math.abs(b.y - a.y),
      };
      break;
    case "circle":
      // Press at the center, release on the rim.
      shape = { name: "circle", cx: a.x, cy: a.y, r: dist(a, b) };
      break;
    case "ellipse":
      shape = {
        name: "ellipse",
        cx: a.x,
        cy: a.y,
        rx: Math.abs(b.x - a.x),
        ry: Math.abs(b.y - a.y),
      };
      break;
  }
  return isSubmittable(shape) ? shape : null;
}

export function pointFromClick(view: ViewTransform, clickScreen: XY): Shape {
  const p = view.screenToImage(clickScreen);
  return { name: "point", cx: p.x, cy: p.y };
}

/**
 * Click-by-click polygon builder. A click near the first vertex (within the
 * tolerance, in screen pixels) closes the ring.
 */
export class PolygonBuilder {
  private points: XY[] = [];

  constructor(
    private view: ViewTransform,
    private tolerancePx: number = HIT_TOLERANCE_PX,
  ) {}

  get vertexCount(): number {
    return this.points.length;
  }

  /** Returns the finished polygon when the gesture closes, else null. */
  click(screen: XY): ShapePolygon | null {
    const first = this.points[0];
    if (first && this.points.length >= 3) {
      const firstScreen = this.view.imageToScreen(first);
      if (dist(firstScreen, screen) <= this.tolerancePx) {
        return this.finish();
      }
    }
    const p = this.view.screenToImage(screen);
    const prev = this.points[this.points.length - 1];
    if (prev && prev.x === p.x && prev.y === p.y) return null; // ignore double-click jitter
    this.points.push(p);
    return null;
  }

  /** Force-close (e.g. Enter key). Null if degenerate. */
  finish(): ShapePolygon | null {
    const shape: ShapePolygon = {
      name: "polygon",
      all_points_x: this.points.map((p) => p.x),
      all_points_y: this.points.map((p) => p.y),
    };
    this.points = [];
    return isSubmittable(shape) ? shape : null;
  }

  cancel(): void {
    this.points = [];
  }

  /** In-progress vertices, for rubber-band rendering. */
  preview(): XY[] {
    return [...this.points];
  }
}

/** Click-by-click polyline builder; double-click or Enter finishes. */
export class PolylineBuilder {
  private points: XY[] = [];

  constructor(private view: ViewTransform) {}

  get vertexCount(): number {
    return this.points.length;
  }

  click(screen: XY): void {
    const p = this.view.screenToImage(screen);
    const prev = this.points[this.points.length - 1];
    if (prev && prev.x === p.x && prev.y === p.y) return;
    this.points.push(p);
  }

  finish(): ShapePolyline | null {
    const shape: ShapePolyline = {
      name: "polyline",
      all_points_x: this.points.map((p) => p.x),
      all_points_y: this.points.map((p) => p.y),
    };
    this.points = [];
    return isSubmittable(shape) ? shape : null;
  }

  cancel(): void {
    this.points = [];
  }

  preview(): XY[] {
    return [...this.points];
  }
}
