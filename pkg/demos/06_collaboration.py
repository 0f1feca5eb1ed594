"""Two annotators sharing one project through the sync store.

The server applies changesets in arrival order under a single writer per
project, logs every op, and resolves same-entry conflicts deterministically:
first writer wins, the stale op comes back SUPERSEDED. Clients converge by
replaying the op log; byte-identical documents prove it.

This demo drives the store in process. `annotate serve` exposes the same
store over HTTP (see FORMAT.md for the endpoints), and demos/07 drives that.
"""

from annotate import Anchor, InputType, Media, create_project, load_project, save_project
from annotate.collab import ChangeSet, ProjectStore, apply_logged_op

# A coordinator prepares the shared project and posts it.
base = create_project("voices dataset", pid="p-voices")
clip = base.add_file("interview_041.mp4", Media.VIDEO, duration=600.0)
speaker = base.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
doc = save_project(base)

store = ProjectStore()  # in-memory; pass a directory for durable storage
pid, revision = store.create(doc)
print(f"posted {pid} at revision {revision}")

# Alice and Bob each start from the posted document.
alice = {"replica": load_project(doc), "rev": revision}
bob = {"replica": load_project(doc), "rev": revision}


def push(who, name, ops):
    revision, statuses = store.apply_changeset(pid, ChangeSet(name, who["rev"], ops))
    print(f"{name} pushed {len(ops)} op(s): {[s['status'] for s in statuses]}")
    return statuses


def pull(who, name):
    current, records = store.ops_since(pid, who["rev"])
    for record in records:
        apply_logged_op(who["replica"], record.op)
    who["rev"] = current
    print(f"{name} pulled to revision {current}")


# Disjoint work applies cleanly from the same base revision.
[s1] = push(alice, "alice", [
    {"type": "upsert", "entry": {"file_id": clip, "z": [12.0, 48.5], "av": {speaker: "host"}}},
])
[s2] = push(bob, "bob", [
    {"type": "upsert", "entry": {"file_id": clip, "z": [50.0, 95.0], "av": {speaker: "guest"}}},
])
pull(alice, "alice")
pull(bob, "bob")

# Now both try to relabel the same entry from the same base revision.
target = s1["mid"]
shared_base = alice["rev"]
push(alice, "alice", [
    {"type": "upsert", "entry": {"mid": target, "file_id": clip, "z": [12.0, 48.5], "av": {speaker: "interviewer"}}},
])
bob["rev"] = shared_base  # bob has not pulled alice's edit yet
push(bob, "bob", [
    {"type": "upsert", "entry": {"mid": target, "file_id": clip, "z": [12.0, 48.5], "av": {speaker: "moderator"}}},
])

pull(alice, "alice")
pull(bob, "bob")
winner = bob["replica"].metadata[target].av[speaker]
print(f"both replicas agree the label is {winner!r} (first writer won)")

server_doc = store.document(pid)
print(f"alice == server bytes: {save_project(alice['replica']) == server_doc}")
print(f"bob   == server bytes: {save_project(bob['replica']) == server_doc}")

# The log is the source of truth: replay from the posted base reproduces the
# live snapshot exactly. This is also how the server recovers after a crash.
replay = load_project(store.base_document(pid))
for record in store.log_records(pid):
    apply_logged_op(replay, record.op)
print(f"log replay == server bytes: {save_project(replay) == server_doc}")
print(f"\nCSV straight from the store:\n{store.export_csv(pid).decode()}")
