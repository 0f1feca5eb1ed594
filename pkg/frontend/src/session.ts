/**
 * An editor session: one annotator's live view of one shared project.
 *
 * Local edits queue as pending ops and are pushed as a changeset against the
 * session's last-synced revision; then the session pulls the op log tail and
 * replays it into the replica. Ops the server marks SUPERSEDED or REJECTED
 * are never silently dropped — they land in `conflicts`, with the winning
 * value visible in the replica after the pull.
 *
 * Going offline is not an error: pushes that cannot reach the service leave
 * the queue intact and flip `offline`; the next successful sync replays it.
 */

import { SyncApi } from "./api.js";
import { Replica } from "./replica.js";
import type { ChangeOp, EntryDef, LogRecord, OpStatus, Shape, WireEntry, XY } from "./types.js";
import { ViewTransform } from "./transform.js";
import type { ShapeToolName } from "./tools.js";

export interface PendingOp {
  op: ChangeOp;
  /** Local handle for optimistic rendering of not-yet-acked inserts. */
  localId: string;
}

export interface Conflict {
  status: OpStatus["status"];
  op: ChangeOp;
  cause?: string;
}

export class EditorSession {
  replica!: Replica;
  pending: PendingOp[] = [];
  conflicts: Conflict[] = [];
  offline = false;

  /** Editor state the panes share. */
  activeTool: ShapeToolName | "segment" | "select" = "select";
  selection = new Set<string>();
  view = new ViewTransform();
  playbackPosition = 0;
  activeFile: string | null = null;

  private localCounter = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    public api: SyncApi,
    public pid: string,
    public clientId: string,
  ) {}

  /** The session's last-synced revision. */
  get revision(): number {
    return this.replica.revision;
  }

  async load(): Promise<void> {
    this.replica = Replica.fromBytes(await this.api.getDocument(this.pid));
  }

  // -- local edits -----------------------------------------------------------

  enqueueUpsert(entry: WireEntry): string {
    const localId = entry.mid ?? `local-${++this.localCounter}`;
    this.pending.push({ op: { type: "upsert", entry }, localId });
    return localId;
  }

  enqueueDelete(mid: string): void {
    this.pending.push({ op: { type: "delete", mid }, localId: mid });
    this.selection.delete(mid);
  }

  upsertRegion(fileId: string, shape: Shape, av: Record<string, string | string[]> = {}, frameTime?: number): string {
    return this.enqueueUpsert({
      file_id: fileId,
      z: frameTime === undefined ? [] : [frameTime],
      xy: shape,
      av,
    });
  }

  upsertSegment(fileId: string, start: number, end: number, av: Record<string, string | string[]> = {}, mid?: string): string {
    const entry: WireEntry = { file_id: fileId, z: [start, end], xy: null, av };
    if (mid !== undefined) entry.mid = mid;
    return this.enqueueUpsert(entry);
  }

  /** Confirmed entries plus optimistic previews of pending inserts/updates. */
  visibleEntries(): Map<string, EntryDef> {
    const out = new Map(this.replica.metadata);
    for (const { op, localId } of this.pending) {
      if (op.type === "delete") out.delete(op.mid);
      else {
        const { mid, ...entry } = op.entry;
        out.set(mid ?? localId, { ...entry, av: entry.av ?? {} });
      }
    }
    return out;
  }

  // -- sync ----------------------------------------------------------------------

  /** Push pending ops (if any), then pull and replay the log tail. */
  async syncOnce(): Promise<void> {
    const batch = [...this.pending]; // edits made while the push is in flight stay queued
    try {
      if (batch.length > 0) {
        const response = await this.api.postChanges(this.pid, {
          client_id: this.clientId,
          base_revision: this.revision,
          ops: batch.map((p) => p.op),
        });
        this.pending = this.pending.slice(batch.length);
        response.accepted.forEach((status, i) => {
          if (status.status !== "applied") {
            this.conflicts.push({
              status: status.status,
              op: batch[i]!.op,
              cause: status.status === "rejected" ? status.cause : undefined,
            });
          } else if (batch[i]!.op.type === "upsert") {
            // remap selection from the optimistic id to the server id
            if (this.selection.delete(batch[i]!.localId)) this.selection.add(status.mid);
          }
        });
      }
      await this.pull();
      this.offline = false;
    } catch (err) {
      if (err instanceof TypeError || (err as { code?: string }).code === "ECONNREFUSED") {
        // network failure: keep the queue, try again next tick
        this.offline = true;
        return;
      }
      throw err;
    }
  }

  private async pull(): Promise<void> {
    const result = await this.api.getChanges(this.pid, this.revision);
    if (result.kind === "document") {
      this.replica = Replica.fromBytes(result.text);
      return;
    }
    for (const record of result.ops.ops as LogRecord[]) {
      this.replica.applyOp(record.op, record.revision);
    }
  }

  startSyncLoop(intervalMs = 1000): void {
    this.stopSyncLoop();
    this.timer = setInterval(() => {
      void this.syncOnce().catch(() => {
        // surfaced via conflicts/offline; the loop must keep ticking
      });
    }, intervalMs);
  }

  stopSyncLoop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  // -- view helpers -----------------------------------------------------------------

  screenToImage(p: XY): XY {
    return this.view.screenToImage(p);
  }

  imageToScreen(p: XY): XY {
    return this.view.imageToScreen(p);
  }
}
