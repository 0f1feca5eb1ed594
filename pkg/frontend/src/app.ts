/**
 * DOM shell: wires the session, tools, timeline, and grid panel onto the
 * static page in index.html. Greyscale, keyboard-first, no framework — the
 * interesting logic all lives in the imported modules, which is also what
 * the test suite drives.
 *
 * Keys: 1-6 pick a shape tool, s the segment tool, v select; Enter closes a
 * polygon/polyline; Escape cancels; Delete removes the selection.
 */

import { SyncApi } from "./api.js";
import { bulkSet, removeMembers, summarize } from "./grid.js";
import { UNSET, groupBy } from "./replica.js";
import { laneLayout } from "./segments.js";
import { EditorSession } from "./session.js";
import { controlPoints, shapeBBox } from "./shapes.js";
import {
  PolygonBuilder,
  PolylineBuilder,
  SHAPE_TOOLS,
  pointFromClick,
  shapeFromDrag,
  type ShapeToolName,
} from "./tools.js";
import type { EntryDef, Shape, XY } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("service") ?? `${location.protocol}//${location.host}`;
  const pid = params.get("pid");
  if (!pid) {
    el<HTMLElement>("status").textContent = "add ?pid=<project id> (and optional &service=<url>) to the address";
    return;
  }
  const clientId = params.get("client") ?? `browser-${Math.random().toString(16).slice(2, 8)}`;

  const session = new EditorSession(new SyncApi(base), pid, clientId);
  await session.load();
  const app = new App(session);
  app.render();
  session.startSyncLoop(1000);
  setInterval(() => app.render(), 1000);
}

class App {
  private canvas = el<HTMLCanvasElement>("canvas");
  private timelineEl = el<HTMLCanvasElement>("timeline");
  private polygonBuilder: PolygonBuilder | null = null;
  private polylineBuilder: PolylineBuilder | null = null;
  private dragStart: XY | null = null;
  private image: HTMLImageElement | null = null;

  constructor(private session: EditorSession) {
    this.pickFile(session.replica.files.keys().next().value ?? null);
    this.bindToolbar();
    this.bindCanvas();
    this.bindKeys();
  }

  private pickFile(fid: string | null): void {
    const s = this.session;
    s.activeFile = fid;
    this.image = null;
    if (!fid) return;
    const file = s.replica.files.get(fid);
    if (file && file.media === "image") {
      const img = new Image();
      img.onload = () => {
        s.view.fit(img.naturalWidth, img.naturalHeight, this.canvas.width, this.canvas.height);
        this.image = img;
        this.render();
      };
      img.src = file.uri;
    }
  }

  private bindToolbar(): void {
    const bar = el<HTMLElement>("tools");
    for (const tool of [...SHAPE_TOOLS, "segment", "select"] as const) {
      const button = document.createElement("button");
      button.textContent = tool;
      button.dataset.tool = tool;
      button.onclick = () => this.setTool(tool);
      bar.appendChild(button);
    }
    el<HTMLButtonElement>("sync-now").onclick = () => void this.session.syncOnce().then(() => this.render());
  }

  private setTool(tool: ShapeToolName | "segment" | "select"): void {
    this.session.activeTool = tool;
    this.polygonBuilder?.cancel();
    this.polylineBuilder?.cancel();
    this.polygonBuilder = null;
    this.polylineBuilder = null;
    this.render();
  }

  private bindKeys(): void {
    const byKey: Record<string, ShapeToolName | "segment" | "select"> = {
      "1": "rect", "2": "circle", "3": "ellipse", "4": "point", "5": "polygon", "6": "polyline",
      s: "segment", v: "select",
    };
    window.addEventListener("keydown", (e) => {
      const tool = byKey[e.key];
      if (tool) return this.setTool(tool);
      if (e.key === "Enter") this.finishBuilder();
      if (e.key === "Escape") this.setTool(this.session.activeTool);
      if (e.key === "Delete" || e.key === "Backspace") this.deleteSelection();
    });
  }

  private bindCanvas(): void {
    this.canvas.addEventListener("pointerdown", (e) => {
      this.dragStart = this.eventPoint(e);
    });
    this.canvas.addEventListener("pointerup", (e) => {
      const up = this.eventPoint(e);
      const down = this.dragStart;
      this.dragStart = null;
      if (down) this.gesture(down, up);
      this.render();
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.session.view.zoomAt(e.deltaY < 0 ? 1.1 : 1 / 1.1, this.eventPoint(e));
      this.render();
    });
  }

  private eventPoint(e: MouseEvent): XY {
    const rect = this.canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  private gesture(down: XY, up: XY): void {
    const s = this.session;
    const fid = s.activeFile;
    if (!fid) return;
    const tool = s.activeTool;
    let shape: Shape | null = null;
    if (tool === "rect" || tool === "circle" || tool === "ellipse") {
      shape = shapeFromDrag(tool, s.view, down, up);
    } else if (tool === "point") {
      shape = pointFromClick(s.view, up);
    } else if (tool === "polygon") {
      this.polygonBuilder ??= new PolygonBuilder(s.view);
      shape = this.polygonBuilder.click(up);
    } else if (tool === "polyline") {
      this.polylineBuilder ??= new PolylineBuilder(s.view);
      this.polylineBuilder.click(up);
    } else if (tool === "select") {
      this.select(up);
    }
    if (shape) {
      const media = s.replica.files.get(fid)?.media;
      const frame = media === "video" ? s.playbackPosition : undefined;
      s.upsertRegion(fid, shape, {}, frame);
    }
  }

  private finishBuilder(): void {
    const s = this.session;
    const shape = this.polygonBuilder?.finish() ?? this.polylineBuilder?.finish() ?? null;
    this.polygonBuilder = null;
    this.polylineBuilder = null;
    if (shape && s.activeFile) s.upsertRegion(s.activeFile, shape);
    this.render();
  }

  private select(screen: XY): void {
    const s = this.session;
    const p = s.screenToImage(screen);
    s.selection.clear();
    for (const [mid, e] of s.visibleEntries()) {
      if (e.file_id !== s.activeFile || e.xy === null) continue;
      const b = shapeBBox(e.xy);
      if (p.x >= b.xmin && p.x <= b.xmax && p.y >= b.ymin && p.y <= b.ymax) {
        s.selection.add(mid);
        break;
      }
    }
  }

  private deleteSelection(): void {
    for (const mid of [...this.session.selection]) {
      if (this.session.replica.metadata.has(mid)) this.session.enqueueDelete(mid);
    }
    this.render();
  }

  // -- rendering ---------------------------------------------------------------

  render(): void {
    this.renderStatus();
    this.renderCanvas();
    this.renderTimeline();
    this.renderGrid();
    this.renderConflicts();
  }

  private renderStatus(): void {
    const s = this.session;
    el<HTMLElement>("status").textContent =
      `${s.pid} @ r${s.revision}` +
      (s.pending.length ? ` · ${s.pending.length} pending` : "") +
      (s.offline ? " · OFFLINE (queued)" : "");
  }

  private renderCanvas(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const s = this.session;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.image) {
      const tl = s.imageToScreen({ x: 0, y: 0 });
      ctx.drawImage(
        this.image,
        tl.x,
        tl.y,
        this.image.naturalWidth * s.view.scale,
        this.image.naturalHeight * s.view.scale,
      );
    }
    for (const [mid, e] of s.visibleEntries()) {
      if (e.file_id !== s.activeFile || e.xy === null) continue;
      this.strokeShape(ctx, e.xy, s.selection.has(mid));
    }
    const preview = this.polygonBuilder?.preview() ?? this.polylineBuilder?.preview() ?? [];
    if (preview.length > 1) {
      ctx.strokeStyle = "#999";
      ctx.setLineDash([4, 3]);
      ctx.beginPath();
      preview.map((p) => s.imageToScreen(p)).forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  private strokeShape(ctx: CanvasRenderingContext2D, shape: Shape, selected: boolean): void {
    const s = this.session;
    ctx.strokeStyle = selected ? "#000" : "#555";
    ctx.lineWidth = selected ? 2 : 1;
    ctx.beginPath();
    switch (shape.name) {
      case "rect": {
        const a = s.imageToScreen({ x: shape.x, y: shape.y });
        ctx.strokeRect(a.x, a.y, shape.width * s.view.scale, shape.height * s.view.scale);
        break;
      }
      case "circle": {
        const c = s.imageToScreen({ x: shape.cx, y: shape.cy });
        ctx.arc(c.x, c.y, shape.r * s.view.scale, 0, Math.PI * 2);
        ctx.stroke();
        break;
      }
      case "ellipse": {
        const c = s.imageToScreen({ x: shape.cx, y: shape.cy });
        ctx.ellipse(c.x, c.y, shape.rx * s.view.scale, shape.ry * s.view.scale, 0, 0, Math.PI * 2);
        ctx.stroke();
        break;
      }
      case "point": {
        const c = s.imageToScreen({ x: shape.cx, y: shape.cy });
        ctx.moveTo(c.x - 4, c.y);
        ctx.lineTo(c.x + 4, c.y);
        ctx.moveTo(c.x, c.y - 4);
        ctx.lineTo(c.x, c.y + 4);
        ctx.stroke();
        break;
      }
      case "polygon":
      case "polyline": {
        const pts = controlPoints(shape).map((p) => s.imageToScreen(p));
        pts.forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
        if (shape.name === "polygon") ctx.closePath();
        ctx.stroke();
        break;
      }
    }
  }

  private renderTimeline(): void {
    const ctx = this.timelineEl.getContext("2d");
    if (!ctx) return;
    const s = this.session;
    ctx.clearRect(0, 0, this.timelineEl.width, this.timelineEl.height);
    const fid = s.activeFile;
    const file = fid ? s.replica.files.get(fid) : null;
    if (!fid || !file || file.media === "image") return;
    const duration = file.duration ?? 60;
    const px = (t: number) => (t / duration) * this.timelineEl.width;

    const segments = [...s.visibleEntries().values()]
      .filter((e) => e.file_id === fid && e.z.length === 2)
      .map((e) => ({
        start: e.z[0]!,
        end: e.z[1]!,
        label: (Object.values(e.av)[0] as string | undefined) ?? null,
      }));
    laneLayout(segments).forEach((lane, i) => {
      const y = 8 + i * 22;
      ctx.fillStyle = "#777";
      ctx.fillText(lane.label ?? "·", 2, y + 10);
      for (const seg of lane.segments) {
        ctx.fillStyle = "#bbb";
        ctx.fillRect(40 + px(seg.start), y, Math.max(px(seg.end) - px(seg.start), 1), 14);
        ctx.strokeStyle = "#444";
        ctx.strokeRect(40 + px(seg.start), y, Math.max(px(seg.end) - px(seg.start), 1), 14);
      }
    });
  }

  private renderGrid(): void {
    const s = this.session;
    const panel = el<HTMLElement>("grid");
    panel.innerHTML = "";
    const pickerId = el<HTMLSelectElement>("grid-attribute").value;
    if (!pickerId || !s.replica.attributes.has(pickerId)) {
      this.fillAttributePicker();
      return;
    }
    for (const summary of summarize(s.replica, pickerId)) {
      const row = document.createElement("div");
      row.className = "group-row";
      row.textContent = `${summary.label} — ${summary.count}`;
      const set = document.createElement("button");
      set.textContent = "set…";
      set.onclick = () => {
        const value = prompt(`new value for ${pickerId} on ${summary.count} entries`);
        if (value === null) return;
        const group = groupBy(s.replica, pickerId).find((g) =>
          g.key === UNSET ? summary.key === UNSET : g.key === summary.key,
        );
        if (group) bulkSet(s, group, pickerId, value);
        this.render();
      };
      const prune = document.createElement("button");
      prune.textContent = "remove all";
      prune.onclick = () => {
        const group = groupBy(s.replica, pickerId).find((g) =>
          g.key === UNSET ? summary.key === UNSET : g.key === summary.key,
        );
        if (group) removeMembers(s, group, group.members);
        this.render();
      };
      row.append(" ", set, " ", prune);
      panel.appendChild(row);
    }
  }

  private fillAttributePicker(): void {
    const picker = el<HTMLSelectElement>("grid-attribute");
    if (picker.options.length > 0) return;
    for (const [aid, attr] of this.session.replica.attributes) {
      const option = document.createElement("option");
      option.value = aid;
      option.textContent = `${attr.name} (${attr.anchor})`;
      picker.appendChild(option);
    }
  }

  private renderConflicts(): void {
    const banner = el<HTMLElement>("conflicts");
    const conflicts = this.session.conflicts;
    banner.hidden = conflicts.length === 0;
    if (conflicts.length) {
      banner.textContent =
        `${conflicts.length} edit(s) lost to concurrent changes — current values shown. ` +
        conflicts
          .slice(-3)
          .map((c) => `${c.op.type} ${"entry" in c.op ? (c.op.entry.mid ?? "new") : c.op.mid}: ${c.status}${c.cause ? ` (${c.cause})` : ""}`)
          .join("; ");
    }
  }
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  void boot();
}
