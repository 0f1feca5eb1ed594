/**
 * The view transform between screen (canvas) pixels and image pixels.
 *
 * Uniform scale plus translation; y stays downward in both spaces. The
 * invariant the editor leans on: screen -> image -> screen returns any point
 * to itself within half a pixel at every zoom level.
 */

import type { XY } from "./types.js";

export class ViewTransform {
  scale: number;
  tx: number;
  ty: number;

  constructor(scale = 1, tx = 0, ty = 0) {
    if (!(scale > 0)) throw new Error(`zoom factor must be > 0, got ${scale}`);
    this.scale = scale;
    this.tx = tx;
    this.ty = ty;
  }

  imageToScreen(p: XY): XY {
    return { x: p.x * this.scale + this.tx, y: p.y * this.scale + this.ty };
  }

  screenToImage(p: XY): XY {
    return { x: (p.x - this.tx) / this.scale, y: (p.y - this.ty) / this.scale };
  }

  pan(dx: number, dy: number): void {
    this.tx += dx;
    this.ty += dy;
  }

  /** Zoom by `factor` keeping the image point under `anchor` (screen) fixed. */
  zoomAt(factor: number, anchor: XY): void {
    if (!(factor > 0)) throw new Error(`zoom factor must be > 0, got ${factor}`);
    const pivot = this.screenToImage(anchor);
    this.scale *= factor;
    this.tx = anchor.x - pivot.x * this.scale;
    this.ty = anchor.y - pivot.y * this.scale;
  }

  /** Fit an image of w x h pixels into a viewport, centered. */
  fit(imageW: number, imageH: number, viewW: number, viewH: number): void {
    this.scale = Math.min(viewW / imageW, viewH / imageH);
    this.tx = (viewW - imageW * this.scale) / 2;
    this.ty = (viewH - imageH * this.scale) / 2;
  }

  clone(): ViewTransform {
    return new ViewTransform(this.scale, this.tx, this.ty);
  }
}
