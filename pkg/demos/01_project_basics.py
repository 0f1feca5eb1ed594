"""Build an annotation project from scratch.

A project owns three ordered maps — attributes (the questions), files (the
media), metadata (the answers) — plus a revision counter that ticks on every
mutation. Everything here is plain Python; run the file and read along.
"""

from annotate import Anchor, InputType, Media, Polygon, Rect, create_project

p = create_project("swans and conversations")
print(f"fresh project {p.pid!r}, revision {p.revision}")

# Attributes are typed questions anchored to files, regions, or segments.
species = p.add_attribute(
    "species", Anchor.SPATIAL_REGION, InputType.DROPDOWN,
    options={1: "mute swan", 2: "whooper swan", 3: "goose"},
)
speaker = p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
reviewed = p.add_attribute(
    "reviewed", Anchor.FILE, InputType.RADIO, options={1: "Yes", 2: "No"}, default=2
)
print(f"attributes: {list(p.attributes)}")

photo = p.add_file("images/swan_0001.jpg", Media.IMAGE, dims=(1920, 1080))
recording = p.add_file("audio/atc_tower.wav", Media.AUDIO, duration=60.0)

# A spatial region: the swan's outline as a polygon, answered with an option id.
outline = Polygon(((420, 310), (890, 295), (1040, 620), (600, 760), (380, 540)))
region = p.upsert_metadata(photo, xy=outline, av={species: "1"})

# A temporal segment: the pilot speaks from 3.1 s to 9.2 s.
segment = p.upsert_metadata(recording, z=[3.1, 9.2], av={speaker: "pilot"})

# A file-level answer.
p.upsert_metadata(photo, av={reviewed: "1"})

print(f"entries: {list(p.metadata)}, revision now {p.revision}")

# Mutations validate eagerly; broken data never enters the aggregate.
from annotate.errors import BadZ, ShapeOnAudio

try:
    p.upsert_metadata(recording, xy=Rect(0, 0, 10, 10))
except ShapeOnAudio as e:
    print(f"rejected as expected: {e}")
try:
    p.upsert_metadata(recording, z=[9.2, 3.1])
except BadZ as e:
    print(f"rejected as expected: {e}")

# And the whole aggregate can be re-checked at any time.
print(f"validate() -> {p.validate()!r}")

# Replacing an entry keeps its id; deleting retires the id forever.
p.upsert_metadata(recording, z=[3.1, 10.0], av={speaker: "pilot"}, mid=segment)
print(f"segment {segment} now spans {p.metadata[segment].z}")
p.delete_metadata(region)
print(f"after delete: {len(p.metadata)} entries, revision {p.revision}")
