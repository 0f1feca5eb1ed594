"""Reviewing machine-seeded annotations in bulk: the grid workflow.

An automatic face detector plus a tracker produced 165 face boxes across
consecutive frames, all tagged with the same track id. A human reviewer
groups by track, names the whole track at once, prunes the bad detections,
and rejects tracks wholesale — never touching entries one by one.
"""

from annotate import Anchor, InputType, Media, Rect, create_project
from annotate.gridview import UNSET, bulk_set, filter_groups, group_by, remove_members

p = create_project("episode 1 face tracks")
track = p.add_attribute("track_id", Anchor.SPATIAL_REGION, InputType.TEXT)
name = p.add_attribute(
    "name", Anchor.SPATIAL_REGION, InputType.DROPDOWN, {1: "Sherlock", 2: "John"}
)
good = p.add_attribute("is_good_track", Anchor.SPATIAL_REGION, InputType.RADIO, {1: "Yes", 2: "No"})
video = p.add_file("episode1.mp4", Media.VIDEO, dims=(1280, 720), duration=3600.0)

# The detector output: one box per frame, drifting slowly across the shot.
for frame in range(165):
    p.upsert_metadata(
        video,
        z=[frame / 25.0],
        xy=Rect(200 + 0.5 * frame, 180, 60, 80),
        av={track: "17"},
    )

groups = group_by(p, track)
print(f"grouped by track_id: {[(g.key, len(g.members)) for g in groups]}")

# Name the whole track in one gesture.
[track_17] = groups
bulk_set(p, track_17, name, "1")
named = sum(1 for e in p.metadata.values() if e.av.get(name) == "1")
print(f"after bulk naming: {named} entries carry name=Sherlock")

# Groups are snapshots — after any edit, re-group before the next bulk write.
[track_17] = group_by(p, track)

# Three detections were actually a lamp. Prune them by id.
lamp = track_17.members[40:43]
remove_members(p, track_17, lamp)
print(f"after pruning {len(lamp)} false detections: {len(p.metadata)} entries remain")

# The reviewer decides the whole track is unusable after all.
[track_17] = group_by(p, track)
bulk_set(p, track_17, good, "2")

by_quality = group_by(p, good)
print(f"grouped by is_good_track: {[(g.key, len(g.members)) for g in by_quality]}")
kept = filter_groups(by_quality, lambda k: k == "1")
print(f"groups that survive a keep-only-Yes filter: {len(kept)}")

# Entries that lack an attribute land in the UNSET group, so unreviewed
# work stays visible.
unnamed = filter_groups(group_by(p, name), lambda k: k is UNSET)
print(f"entries still missing a name: {sum(len(g.members) for g in unnamed)}")
