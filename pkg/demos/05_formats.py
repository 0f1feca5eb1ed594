"""Saving, loading, and flat-file interchange.

The JSON document is canonical — same value, same bytes — so annotation work
diffs like source code. CSV flattens one row per entry for spreadsheets and
downstream tools, and imports back losslessly (modulo fresh ids).
"""

from annotate import (
    Anchor,
    InputType,
    Media,
    Polygon,
    create_project,
    export_csv,
    import_csv,
    load_project,
    save_project,
)

p = create_project("interchange demo", pid="p-formats")
species = p.add_attribute(
    "species", Anchor.SPATIAL_REGION, InputType.DROPDOWN, {1: "mute swan", 2: "goose"}
)
speaker = p.add_attribute("speaker", Anchor.TEMPORAL_SEGMENT, InputType.TEXT)
photo = p.add_file("images/swan.jpg", Media.IMAGE, dims=(1920, 1080))
wav = p.add_file("audio/tower.wav", Media.AUDIO, duration=60.0)
p.upsert_metadata(photo, xy=Polygon(((420, 310), (890, 295), (600, 760))), av={species: "1"})
p.upsert_metadata(wav, z=[3.1, 9.2], av={speaker: "pilot, tower side"})  # comma on purpose

data = save_project(p)
print(f"canonical document, {len(data)} bytes:")
print(data.decode())

print(f"\nsave is deterministic: {save_project(p) == data}")
print(f"load(save(p)) == p:     {load_project(data) == p}")

csv_bytes = export_csv(p)
print(f"\nCSV export (RFC 4180; note the quoted comma):")
print(csv_bytes.decode())

# Import into a project that already has the schema: files are matched by
# name, entries get fresh ids.
target = create_project("assembled elsewhere", pid="p-target")
for a in p.attributes.values():
    target.add_attribute(a.name, a.anchor, a.input, dict(a.options), a.default)
result = import_csv(csv_bytes, target)
print(f"imported: {len(target.metadata)} entries, {len(result.errors)} row errors")
print(f"files auto-registered: {[target.files[f].uri for f in result.created_files]}")

# Unknown attribute names auto-create as TEXT and are flagged for review.
loose = create_project("no schema at all", pid="p-loose")
result = import_csv(csv_bytes, loose)
created = [loose.attributes[a].name for a in result.created_attributes]
print(f"schema-less import auto-created: {created}")
