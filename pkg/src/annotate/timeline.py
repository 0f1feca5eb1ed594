"""Temporal segment algebra for audio/video annotation.

Segments are half-open in spirit: membership is start-inclusive and
end-exclusive, and two segments that merely touch do not overlap.  That keeps
adjacent diarisation segments well defined.  Time is double-precision seconds;
there is no frame-rate coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import SegmentPastEnd


@dataclass(frozen=True)
class Segment:
    """A [start, end) stretch of an audio or video file, optionally labeled."""

    start: float
    end: float
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError("segment endpoints must be finite")
        if self.start < 0:
            raise ValueError(f"segment start must be >= 0, got {self.start}")
        if not self.start < self.end:
            raise ValueError(f"segment start must precede end, got [{self.start}, {self.end}]")

    @property
    def length(self) -> float:
        return self.end - self.start


def overlaps(a: Segment, b: Segment) -> bool:
    """True iff the segments share interior time; touching endpoints do not count."""
    return max(a.start, b.start) < min(a.end, b.end)


def segments_at(t: float, segs: Iterable[Segment]) -> list[Segment]:
    """All segments active at time ``t`` (start-inclusive, end-exclusive), input order kept."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return [s for s in segs if s.start <= t < s.end]


def merge_same_label(segs: Iterable[Segment]) -> list[Segment]:
    """Coalesce overlapping or touching segments that share a label.

    Segments with distinct labels never merge.  The result is sorted by
    (start, end), with the label as a final tie-break, and the operation is
    idempotent: merging an already merged list is a no-op.
    """
    by_label: dict[str | None, list[Segment]] = {}
    for s in segs:
        by_label.setdefault(s.label, []).append(s)

    merged: list[Segment] = []
    for label, group in by_label.items():
        group.sort(key=lambda s: (s.start, s.end))
        cur_start, cur_end = group[0].start, group[0].end
        for s in group[1:]:
            if s.start <= cur_end:  # touching counts: split points are artifacts
                cur_end = max(cur_end, s.end)
            else:
                merged.append(Segment(cur_start, cur_end, label))
                cur_start, cur_end = s.start, s.end
        merged.append(Segment(cur_start, cur_end, label))

    merged.sort(key=lambda s: (s.start, s.end, s.label is not None, s.label or ""))
    return merged


class LabelStats(NamedTuple):
    total_seconds: float
    segment_count: int
    coverage: float


def diarisation_stats(
    segs: Iterable[Segment], duration: float
) -> dict[str | None, LabelStats]:
    """Per-label speech totals over a recording of ``duration`` seconds.

    Same-label segments are merged first, so overlapping raw annotations are
    not double-counted; ``segment_count`` counts the merged segments.
    Coverage is total seconds divided by the file duration.
    """
    segs = list(segs)
    for s in segs:
        if s.end > duration:
            raise SegmentPastEnd(
                f"segment [{s.start}, {s.end}] ends past the {duration} s file"
            )
    out: dict[str | None, LabelStats] = {}
    merged = merge_same_label(segs)
    labels = sorted({s.label for s in merged}, key=lambda l: (l is not None, l or ""))
    for label in labels:
        mine = [s for s in merged if s.label == label]
        total = math.fsum(s.length for s in mine)
        out[label] = LabelStats(total, len(mine), total / duration)
    return out


def snap(t: float, grid: float) -> float:
    """Snap ``t`` to the nearest multiple of ``grid``; exact ties round up."""
    if grid <= 0:
        raise ValueError(f"grid must be > 0, got {grid}")
    return math.floor(t / grid + 0.5) * grid
