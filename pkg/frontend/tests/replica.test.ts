import { describe, expect, it } from "vitest";

import { Replica, UNSET, groupBy, serializeDocument } from "../src/replica.js";
import type { LogOp } from "../src/types.js";

// A canonical document exactly as the service emits it (compact, fixed key
// order, floats with shortest round-trip decimals, integral floats as x.0).
const CANONICAL =
  '{"schema_version":"1.0",' +
  '"project":{"pid":"p-ui","name":"ui fixture","id_counter":4,"revision":4},' +
  '"attributes":{' +
  '"a1":{"name":"speaker","anchor":"temporal_segment","input":"text","options":{},"default":null},' +
  '"a2":{"name":"name","anchor":"spatial_region","input":"dropdown","options":{"1":"Sherlock","2":"John"},"default":null}},' +
  '"files":{' +
  '"f3":{"uri":"clip.mp4","media":"video","dims":[1280,720],"duration":600.0},' +
  '"f4":{"uri":"img.jpg","media":"image","dims":null,"duration":null}},' +
  '"metadata":{}}';

function build(): Replica {
  return Replica.fromBytes(CANONICAL);
}

const insertOp = (mid: string, start: number, end: number, who: string): LogOp => ({
  type: "insert",
  entry: { mid, file_id: "f3", z: [start, end], xy: null, av: { a1: who } },
});

describe("replica", () => {
  it("parses the canonical document", () => {
    const r = build();
    expect(r.pid).toBe("p-ui");
    expect(r.revision).toBe(4);
    expect(r.attributes.get("a1")?.anchor).toBe("temporal_segment");
    expect(r.files.get("f3")?.duration).toBe(600.0);
  });

  it("re-serializes to identical bytes", () => {
    expect(serializeDocument(build())).toBe(CANONICAL);
  });

  it("applies insert/update/delete ops in log order", () => {
    const r = build();
    r.applyOp(insertOp("m5", 3.1, 9.2, "pilot"), 5);
    expect(r.metadata.get("m5")?.z).toEqual([3.1, 9.2]);
    expect(r.idCounter).toBe(5);
    r.applyOp(
      { type: "update", entry: { mid: "m5", file_id: "f3", z: [3.1, 10.0], xy: null, av: { a1: "pilot" } } },
      6,
    );
    expect(r.metadata.get("m5")?.z).toEqual([3.1, 10.0]);
    r.applyOp({ type: "delete", mid: "m5" }, 7);
    expect(r.metadata.has("m5")).toBe(false);
    expect(r.revision).toBe(7);
  });

  it("rejects out-of-order ops", () => {
    const r = build();
    expect(() => r.applyOp(insertOp("m5", 0, 1, "x"), 9)).toThrow(/does not follow/);
  });

  it("detects divergence when a minted id disagrees", () => {
    const r = build();
    expect(() => r.applyOp(insertOp("m99", 0, 1, "x"), 5)).toThrow(/diverged/);
  });

  it("serializes entries with sorted av keys and .0 floats", () => {
    const r = build();
    r.applyOp(insertOp("m5", 3.0, 9.0, "pilot"), 5);
    const text = serializeDocument(r);
    expect(text).toContain('"z":[3.0,9.0]');
    expect(text).toContain('"id_counter":5,"revision":5');
  });

  it("groups by attribute value with UNSET last", () => {
    const r = build();
    r.applyOp(insertOp("m5", 0, 1, "pilot"), 5);
    r.applyOp(insertOp("m6", 2, 3, "atc"), 6);
    r.applyOp(insertOp("m7", 4, 5, "pilot"), 7);
    r.applyOp(
      { type: "insert", entry: { mid: "m8", file_id: "f3", z: [6, 7], xy: null, av: {} } },
      8,
    );
    const groups = groupBy(r, "a1");
    expect(groups.map((g) => g.key)).toEqual(["atc", "pilot", UNSET]);
    expect(groups.map((g) => g.members)).toEqual([["m6"], ["m5", "m7"], ["m8"]]);
    expect(groups[0]!.revision).toBe(8);
  });

  it("grouping skips entries of another kind", () => {
    const r = build();
    r.applyOp(insertOp("m5", 0, 1, "pilot"), 5);
    r.applyOp(
      {
        type: "insert",
        entry: {
          mid: "m6",
          file_id: "f4",
          z: [],
          xy: { name: "rect", x: 0, y: 0, width: 5, height: 5 },
          av: { a2: "1" },
        },
      },
      6,
    );
    expect(groupBy(r, "a1").flatMap((g) => g.members)).toEqual(["m5"]);
    expect(groupBy(r, "a2").flatMap((g) => g.members)).toEqual(["m6"]);
  });
});
