/**
 * Wire types for the sync service, mirroring FORMAT.md exactly.
 * Everything here is plain JSON data; behaviour lives in the other modules.
 */

export type Media = "image" | "audio" | "video";
export type Anchor = "file" | "spatial_region" | "temporal_segment";
export type InputKind = "text" | "checkbox" | "radio" | "dropdown" | "image";

/** Attribute values: free text, one option id, or option ids (checkbox). */
export type AttrValue = string | string[];

export interface ShapeRect {
  name: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
}
export interface ShapeCircle {
  name: "circle";
  cx: number;
  cy: number;
  r: number;
}
export interface ShapeEllipse {
  name: "ellipse";
  cx: number;
  cy: number;
  rx: number;
  ry: number;
}
export interface ShapePoint {
  name: "point";
  cx: number;
  cy: number;
}
export interface ShapePolygon {
  name: "polygon";
  all_points_x: number[];
  all_points_y: number[];
}
export interface ShapePolyline {
  name: "polyline";
  all_points_x: number[];
  all_points_y: number[];
}
export type Shape =
  | ShapeRect
  | ShapeCircle
  | ShapeEllipse
  | ShapePoint
  | ShapePolygon
  | ShapePolyline;

export interface AttributeDef {
  name: string;
  anchor: Anchor;
  input: InputKind;
  options: Record<string, string>;
  default: string | null;
}

export interface FileDef {
  uri: string;
  media: Media;
  dims: [number, number] | null;
  duration: number | null;
}

export interface EntryDef {
  file_id: string;
  z: number[];
  xy: Shape | null;
  av: Record<string, AttrValue>;
}

export interface ProjectDocument {
  schema_version: string;
  project: { pid: string; name: string; id_counter: number; revision: number };
  attributes: Record<string, AttributeDef>;
  files: Record<string, FileDef>;
  metadata: Record<string, EntryDef>;
}

/** One entry as it travels in changesets and log ops (mid inline). */
export interface WireEntry extends EntryDef {
  mid?: string;
}

export type ChangeOp =
  | { type: "upsert"; entry: WireEntry }
  | { type: "delete"; mid: string };

export interface ChangeSet {
  client_id: string;
  base_revision: number;
  ops: ChangeOp[];
}

export type OpStatus =
  | { status: "applied"; mid: string; revision: number }
  | { status: "superseded"; mid: string }
  | { status: "rejected"; mid: string | null; cause: string };

export interface ChangesResponse {
  revision: number;
  accepted: OpStatus[];
}

export type LogOp =
  | { type: "insert"; entry: WireEntry & { mid: string } }
  | { type: "update"; entry: WireEntry & { mid: string } }
  | { type: "delete"; mid: string };

export interface LogRecord {
  revision: number;
  client_id: string;
  op: LogOp;
}

export interface OpsResponse {
  pid: string;
  revision: number;
  ops: LogRecord[];
}

export interface XY {
  x: number;
  y: number;
}
