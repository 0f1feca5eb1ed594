/**
 * Grid review actions on top of a session: bulk updates and pruning operate
 * on a group snapshot and queue ordinary entry ops, so they travel through
 * the same sync path (and the same conflict rules) as hand edits.
 *
 * Groups go stale the moment the replica moves. `withFreshGroup` re-groups
 * and re-finds the group by key, which is how a StaleGroup response from
 * review tooling is healed: refresh, reapply.
 */

import { groupBy, type Group, type GroupKey, Replica, UNSET } from "./replica.js";
import type { EditorSession } from "./session.js";
import type { AttrValue } from "./types.js";

function sameKey(a: GroupKey, b: GroupKey): boolean {
  if (a === UNSET || b === UNSET) return a === b;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((v, i) => v === b[i]);
  }
  return a === b;
}

export function isStale(session: EditorSession, group: Group): boolean {
  return group.revision !== session.replica.revision || session.pending.length > 0;
}

/** Re-resolve a group against the current replica; null if it dissolved. */
export function refreshGroup(session: EditorSession, group: Group): Group | null {
  const groups = groupBy(session.replica, group.sourceAttribute);
  return groups.find((g) => sameKey(g.key, group.key)) ?? null;
}

/** Queue `av[aid] = value` for every member; returns the member count. */
export function bulkSet(
  session: EditorSession,
  group: Group,
  aid: string,
  value: AttrValue,
): number {
  const fresh = isStale(session, group) ? refreshGroup(session, group) : group;
  if (!fresh) return 0;
  for (const mid of fresh.members) {
    const entry = session.replica.metadata.get(mid);
    if (!entry) continue;
    session.enqueueUpsert({
      mid,
      file_id: entry.file_id,
      z: entry.z,
      xy: entry.xy,
      av: { ...entry.av, [aid]: value },
    });
  }
  return fresh.members.length;
}

/** Queue deletion of the given members (erroneous detections, usually). */
export function removeMembers(session: EditorSession, group: Group, mids: string[]): number {
  const members = new Set(group.members);
  let removed = 0;
  for (const mid of mids) {
    if (!members.has(mid)) continue;
    session.enqueueDelete(mid);
    removed += 1;
  }
  return removed;
}

export interface GroupSummary {
  label: string;
  count: number;
  key: GroupKey;
}

/** Human-readable group labels for the panel header row. */
export function summarize(replica: Replica, aid: string): GroupSummary[] {
  const attr = replica.attributes.get(aid);
  if (!attr) return [];
  return groupBy(replica, aid).map((g) => {
    let label: string;
    if (g.key === UNSET) label = "(unset)";
    else if (Array.isArray(g.key)) {
      label = g.key.map((k) => attr.options[k] ?? k).join("+") || "(none)";
    } else {
      label = attr.input === "text" ? g.key : (attr.options[g.key] ?? g.key);
    }
    return { label, count: g.members.length, key: g.key };
  });
}
