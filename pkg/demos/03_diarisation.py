"""Temporal segments and speaker diarisation statistics.

Segments are [start, end) in seconds. Touching segments do not overlap —
that keeps adjacent speaker turns well defined — and merging coalesces them,
since split points are annotation artifacts.
"""

from annotate.timeline import Segment, diarisation_stats, merge_same_label, overlaps, segments_at, snap

# A conversation between a controller and a pilot, annotated in pieces.
raw = [
    Segment(0.0, 2.8, "controller"),
    Segment(3.1, 6.0, "pilot"),
    Segment(6.0, 9.2, "pilot"),       # touches the previous pilot turn
    Segment(8.9, 12.4, "controller"), # overlaps the pilot (crosstalk)
    Segment(14.0, 17.5, "controller"),
]

print("raw segments:")
for s in raw:
    print(f"  {s.label:10} [{s.start:5.1f}, {s.end:5.1f})")

print(f"\npilot turns touching at 6.0 overlap? {overlaps(raw[1], raw[2])}")
print(f"crosstalk at 9.0 overlaps? {overlaps(raw[2], raw[3])}")

merged = merge_same_label(raw)
print("\nmerged per speaker:")
for s in merged:
    print(f"  {s.label:10} [{s.start:5.1f}, {s.end:5.1f})")

# Who is talking at t? start-inclusive, end-exclusive.
for t in (6.0, 9.0, 9.2):
    active = [s.label for s in segments_at(t, merged)]
    print(f"t={t:4} -> {active}")

# Per-speaker totals over a 60 s recording; same-label overlaps are merged
# first so crosstalk is not double-counted.
stats = diarisation_stats(raw, duration=60.0)
print("\nspeaker          total    turns  coverage")
for label, s in stats.items():
    print(f"{label:12} {s.total_seconds:7.1f} s  {s.segment_count:5}  {s.coverage:8.2%}")

# Drag snapping for the timeline editor: nearest grid multiple, ties up.
print(f"\nsnap(3.14, 0.1) -> {snap(3.14, 0.1)}")
print(f"snap(0.05, 0.1) -> {snap(0.05, 0.1)} (tie rounds up)")
