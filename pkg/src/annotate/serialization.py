"""Deterministic project persistence (canonical JSON) and flat CSV interchange.

The canonical document is UTF-8 JSON with no insignificant whitespace, keys
in a fixed documented order (see FORMAT.md), maps in insertion order, and
floats in Python's shortest round-trip decimal form.  Serializing the same
project value twice yields byte-identical output, which makes documents
diffable and lets the sync service compare states by bytes.

Loading is tolerant of unknown keys (ignored with an
:class:`~annotate.errors.UnknownFieldWarning` each) but never yields a
project that fails validation.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

from . import geometry
from .errors import (
    HeaderMismatch,
    InvalidProject,
    ParseError,
    RowError,
    SchemaVersionUnsupported,
    UnknownFieldWarning,
    Violation,
)
from .model import (
    Anchor,
    Attribute,
    FileRef,
    InputType,
    Media,
    MetadataEntry,
    Project,
    Value,
    _check_entry,
    entry_kind,
)

SUPPORTED_SCHEMA_VERSIONS = ("1.0",)

CSV_HEADER = ("filename", "media", "metadata_id", "z", "shape", "attributes")

_COMPACT = {"separators": (",", ":"), "ensure_ascii": False, "allow_nan": False}


# -- shape codec ---------------------------------------------------------------
#
# Shape objects use the {"name": "rect", ...} convention common to annotation
# CSV pipelines, so regions survive into spreadsheets and downstream tools.

_SHAPE_FIELDS = {
    "rect": ("x", "y", "width", "height"),
    "circle": ("cx", "cy", "r"),
    "ellipse": ("cx", "cy", "rx", "ry"),
    "point": ("cx", "cy"),
    "polygon": ("all_points_x", "all_points_y"),
    "polyline": ("all_points_x", "all_points_y"),
}


def shape_to_obj(s: geometry.Shape) -> dict:
    """Encode a shape as a JSON-ready dict with a fixed key order."""
    if isinstance(s, geometry.Rect):
        return {"name": "rect", "x": s.x, "y": s.y, "width": s.w, "height": s.h}
    if isinstance(s, geometry.Circle):
        return {"name": "circle", "cx": s.cx, "cy": s.cy, "r": s.r}
    if isinstance(s, geometry.Ellipse):
        return {"name": "ellipse", "cx": s.cx, "cy": s.cy, "rx": s.rx, "ry": s.ry}
    if isinstance(s, geometry.Point):
        return {"name": "point", "cx": s.x, "cy": s.y}
    if isinstance(s, geometry.Polygon):
        return {
            "name": "polygon",
            "all_points_x": [v[0] for v in s.vertices],
            "all_points_y": [v[1] for v in s.vertices],
        }
    if isinstance(s, geometry.Polyline):
        return {
            "name": "polyline",
            "all_points_x": [v[0] for v in s.vertices],
            "all_points_y": [v[1] for v in s.vertices],
        }
    raise TypeError(f"not a shape: {s!r}")


def shape_from_obj(obj: object) -> geometry.Shape:
    """Decode a shape dict; raises ValueError on malformed input."""
    if not isinstance(obj, dict):
        raise ValueError(f"shape must be an object, got {type(obj).__name__}")
    name = obj.get("name")
    if name not in _SHAPE_FIELDS:
        raise ValueError(f"unknown shape name {name!r}")
    if name in ("polygon", "polyline"):
        xs = obj.get("all_points_x")
        ys = obj.get("all_points_y")
        if (
            not isinstance(xs, list)
            or not isinstance(ys, list)
            or len(xs) != len(ys)
            or not all(_is_number(v) for v in xs + ys)
        ):
            raise ValueError(f"{name} needs equal-length numeric point lists")
        vertices = tuple(zip((float(x) for x in xs), (float(y) for y in ys)))
        return geometry.Polygon(vertices) if name == "polygon" else geometry.Polyline(vertices)
    values = []
    for key in _SHAPE_FIELDS[name]:
        v = obj.get(key)
        if not _is_number(v):
            raise ValueError(f"{name}.{key} must be a number, got {v!r}")
        values.append(float(v))
    if name == "rect":
        return geometry.Rect(*values)
    if name == "circle":
        return geometry.Circle(*values)
    if name == "ellipse":
        return geometry.Ellipse(*values)
    return geometry.Point(*values)


def _is_number(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def value_to_obj(v: Value) -> str | list[str]:
    return list(v) if isinstance(v, tuple) else v


def value_from_obj(raw: object) -> Value:
    """JSON attribute value to canonical form; lists become sorted tuples."""
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list) and all(isinstance(x, str) for x in raw):
        return tuple(sorted(set(raw)))
    raise ValueError(f"attribute values are strings or string arrays, got {raw!r}")


# -- canonical JSON -------------------------------------------------------------


def document_from_project(p: Project) -> dict:
    """The canonical dict form of a project (see FORMAT.md for the schema)."""
    return {
        "schema_version": p.schema_version,
        "project": {
            "pid": p.pid,
            "name": p.name,
            "id_counter": p.id_counter,
            "revision": p.revision,
        },
        "attributes": {
            aid: {
                "name": a.name,
                "anchor": a.anchor.value,
                "input": a.input.value,
                "options": dict(a.options),
                "default": a.default,
            }
            for aid, a in p.attributes.items()
        },
        "files": {
            fid: {
                "uri": f.uri,
                "media": f.media.value,
                "dims": list(f.dims) if f.dims is not None else None,
                "duration": f.duration,
            }
            for fid, f in p.files.items()
        },
        "metadata": {mid: _entry_to_obj(e) for mid, e in p.metadata.items()},
    }


def _entry_to_obj(e: MetadataEntry) -> dict:
    # av keys are sorted: av is an unordered map, and equal projects must
    # serialize to equal bytes regardless of insertion history.
    return {
        "file_id": e.file_id,
        "z": list(e.z),
        "xy": shape_to_obj(e.xy) if e.xy is not None else None,
        "av": {aid: value_to_obj(e.av[aid]) for aid in sorted(e.av)},
    }


def save_project(p: Project) -> bytes:
    """Serialize to canonical bytes; refuses projects that fail validation."""
    violations = p.validate()
    if violations:
        raise InvalidProject(violations)
    return json.dumps(document_from_project(p), **_COMPACT).encode("utf-8")


def _strict_pairs(pairs):
    d = {}
    for k, v in pairs:
        if k in d:
            raise ValueError(f"duplicate key {k!r} in document")
        d[k] = v
    return d


class _Reader:
    """Collects structural violations and unknown-key warnings during load."""

    def __init__(self):
        self.violations: list[Violation] = []
        self.warnings: list[str] = []

    def bad(self, code: str, subject: str, message: str) -> None:
        self.violations.append(Violation(code, subject, message))

    def take(self, obj: dict, known: tuple[str, ...], where: str) -> None:
        for key in obj:
            if key not in known:
                self.warnings.append(f"{where}: ignoring unknown key {key!r}")


def load_project(data: bytes | str) -> Project:
    """Parse a canonical document back into a project.

    Raises :class:`ParseError` for undecodable bytes or bad JSON,
    :class:`SchemaVersionUnsupported` for documents from a schema this
    version does not read, and :class:`InvalidProject` when the reconstructed
    project breaks any invariant.  Unknown keys warn and are dropped.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"not valid UTF-8: {e.reason}", e.start) from e
    else:
        text = data
    try:
        doc = json.loads(text, object_pairs_hook=_strict_pairs)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.pos) from e
    except ValueError as e:
        raise ParseError(str(e), 0) from e

    if not isinstance(doc, dict):
        raise ParseError(f"document root must be an object, got {type(doc).__name__}", 0)
    version = doc.get("schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        raise SchemaVersionUnsupported(
            f"schema_version {version!r} not supported (supported: {', '.join(SUPPORTED_SCHEMA_VERSIONS)})"
        )

    r = _Reader()
    r.take(doc, ("schema_version", "project", "attributes", "files", "metadata"), "document")

    head = doc.get("project")
    if not isinstance(head, dict):
        raise InvalidProject([Violation("bad_document", "project", "missing 'project' section")])
    r.take(head, ("pid", "name", "id_counter", "revision"), "project")
    pid = head.get("pid")
    name = head.get("name")
    id_counter = head.get("id_counter")
    revision = head.get("revision")
    if not isinstance(pid, str) or not pid:
        r.bad("bad_document", "project", f"pid must be a non-empty string, got {pid!r}")
        pid = "?"
    if not isinstance(name, str):
        r.bad("bad_document", "project", f"name must be a string, got {name!r}")
        name = ""
    if not isinstance(id_counter, int) or isinstance(id_counter, bool) or id_counter < 0:
        r.bad("bad_document", "project", f"id_counter must be a non-negative int, got {id_counter!r}")
        id_counter = 0
    if not isinstance(revision, int) or isinstance(revision, bool) or revision < 0:
        r.bad("bad_document", "project", f"revision must be a non-negative int, got {revision!r}")
        revision = 0

    p = Project(pid, name, str(version), revision=revision, id_counter=id_counter)
    p.attributes = _read_attributes(doc.get("attributes"), r)
    p.files = _read_files(doc.get("files"), r)
    p.metadata = _read_metadata(doc.get("metadata"), r)

    if r.violations:
        raise InvalidProject(r.violations)
    deeper = p.validate()
    if deeper:
        raise InvalidProject(deeper)
    for msg in r.warnings:
        warnings.warn(msg, UnknownFieldWarning, stacklevel=2)
    return p


def _read_attributes(section: object, r: _Reader) -> dict[str, Attribute]:
    out: dict[str, Attribute] = {}
    if section is None:
        return out
    if not isinstance(section, dict):
        r.bad("bad_document", "attributes", "attributes section must be an object")
        return out
    for aid, obj in section.items():
        if not isinstance(obj, dict):
            r.bad("bad_document", aid, "attribute must be an object")
            continue
        r.take(obj, ("name", "anchor", "input", "options", "default"), f"attribute {aid}")
        try:
            anchor = Anchor(obj.get("anchor"))
            input_ = InputType(obj.get("input"))
        except ValueError as e:
            r.bad("bad_enum", aid, str(e))
            continue
        options = obj.get("options") or {}
        if not isinstance(options, dict):
            r.bad("bad_document", aid, "options must be an object")
            continue
        default = obj.get("default")
        if default is not None and not isinstance(default, str):
            r.bad("bad_document", aid, f"default must be a string or null, got {default!r}")
            continue
        name = obj.get("name")
        if not isinstance(name, str):
            r.bad("bad_document", aid, f"attribute name must be a string, got {name!r}")
            continue
        out[aid] = Attribute(aid, name, anchor, input_, dict(options), default)
    return out


def _read_files(section: object, r: _Reader) -> dict[str, FileRef]:
    out: dict[str, FileRef] = {}
    if section is None:
        return out
    if not isinstance(section, dict):
        r.bad("bad_document", "files", "files section must be an object")
        return out
    for fid, obj in section.items():
        if not isinstance(obj, dict):
            r.bad("bad_document", fid, "file must be an object")
            continue
        r.take(obj, ("uri", "media", "dims", "duration"), f"file {fid}")
        try:
            media = Media(obj.get("media"))
        except ValueError as e:
            r.bad("bad_enum", fid, str(e))
            continue
        uri = obj.get("uri")
        if not isinstance(uri, str):
            r.bad("bad_document", fid, f"uri must be a string, got {uri!r}")
            continue
        dims_raw = obj.get("dims")
        dims: tuple[int, int] | None = None
        if dims_raw is not None:
            if not isinstance(dims_raw, list) or len(dims_raw) != 2:
                r.bad("bad_document", fid, f"dims must be a [width, height] pair, got {dims_raw!r}")
                continue
            dims = (dims_raw[0], dims_raw[1])
        duration = obj.get("duration")
        if duration is not None:
            if not _is_number(duration):
                r.bad("bad_document", fid, f"duration must be a number, got {duration!r}")
                continue
            duration = float(duration)
        out[fid] = FileRef(fid, uri, media, dims, duration)
    return out


def _read_metadata(section: object, r: _Reader) -> dict[str, MetadataEntry]:
    out: dict[str, MetadataEntry] = {}
    if section is None:
        return out
    if not isinstance(section, dict):
        r.bad("bad_document", "metadata", "metadata section must be an object")
        return out
    for mid, obj in section.items():
        if not isinstance(obj, dict):
            r.bad("bad_document", mid, "entry must be an object")
            continue
        r.take(obj, ("file_id", "z", "xy", "av"), f"metadata {mid}")
        file_id = obj.get("file_id")
        if not isinstance(file_id, str):
            r.bad("bad_document", mid, f"file_id must be a string, got {file_id!r}")
            continue
        z_raw = obj.get("z", [])
        if not isinstance(z_raw, list) or not all(_is_number(t) for t in z_raw):
            r.bad("bad_z", mid, f"z must be a numeric array, got {z_raw!r}")
            continue
        xy_raw = obj.get("xy")
        xy = None
        if xy_raw is not None:
            try:
                xy = shape_from_obj(xy_raw)
            except ValueError as e:
                r.bad("invalid_shape", mid, str(e))
                continue
            if isinstance(xy_raw, dict):
                r.take(xy_raw, ("name",) + _SHAPE_FIELDS[xy_raw["name"]], f"metadata {mid} shape")
        av_raw = obj.get("av") or {}
        if not isinstance(av_raw, dict):
            r.bad("bad_document", mid, "av must be an object")
            continue
        av: dict[str, Value] = {}
        ok = True
        for aid, raw in av_raw.items():
            try:
                av[aid] = value_from_obj(raw)
            except ValueError as e:
                r.bad("invalid_value", mid, str(e))
                ok = False
        if not ok:
            continue
        out[mid] = MetadataEntry(mid, file_id, tuple(float(t) for t in z_raw), xy, av)
    return out


# -- CSV -------------------------------------------------------------------------


def export_csv(p: Project) -> bytes:
    """Flatten a project to CSV: one row per entry, sorted by (filename, id).

    The z, shape, and attributes cells carry compact JSON fragments; the
    attributes cell is keyed by attribute *name* so the file stands on its
    own.  RFC 4180 quoting, LF line endings, UTF-8.
    """
    violations = p.validate()
    if violations:
        raise InvalidProject(violations)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    rows = []
    for mid, e in p.metadata.items():
        f = p.files[e.file_id]
        names = {p.attributes[aid].name: value_to_obj(v) for aid, v in e.av.items()}
        rows.append(
            (
                f.uri,
                f.media.value,
                mid,
                json.dumps(list(e.z), **_COMPACT),
                json.dumps(shape_to_obj(e.xy) if e.xy is not None else None, **_COMPACT),
                json.dumps({k: names[k] for k in sorted(names)}, **_COMPACT),
            )
        )
    rows.sort(key=lambda row: (row[0], row[2]))
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


@dataclass
class CsvImportResult:
    """Outcome of :func:`import_csv`: the updated project plus what happened.

    ``errors`` carries one :class:`RowError` per rejected row (valid rows are
    still imported unless strict mode aborted).  Attributes or files that had
    to be invented are flagged so reviewers can check them.
    """

    project: Project
    errors: list[RowError] = field(default_factory=list)
    created_attributes: list[str] = field(default_factory=list)
    created_files: list[str] = field(default_factory=list)


def import_csv(data: bytes | str, into: Project, strict: bool = False) -> CsvImportResult:
    """Append entries from a CSV export to ``into``.

    Files are matched (or auto-registered) by filename; attributes are
    matched by name and anchor, and unknown ones are auto-created as TEXT.
    Entries always get fresh ids.  In strict mode any row error aborts the
    whole import, leaving ``into`` untouched.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise HeaderMismatch(f"expected header {','.join(CSV_HEADER)!r}, got {header!r}")

    work = copy.deepcopy(into)
    result = CsvImportResult(project=into)
    for row in reader:
        line = reader.line_num
        try:
            _import_row(row, line, work, result)
        except RowError as e:
            if strict:
                raise
            result.errors.append(e)

    # Commit by swapping state into the caller's object; `work` was a deep
    # copy, so nothing aliases the original on the error paths above.
    into.attributes = work.attributes
    into.files = work.files
    into.metadata = work.metadata
    into.revision = work.revision
    into.id_counter = work.id_counter
    return result


def _import_row(row: list[str], line: int, work: Project, result: CsvImportResult) -> None:
    if len(row) != len(CSV_HEADER):
        raise RowError(line, f"expected {len(CSV_HEADER)} cells, got {len(row)}")
    filename, media_cell, _mid, z_cell, shape_cell, av_cell = row
    if filename == "":
        raise RowError(line, "filename is empty")
    try:
        media = Media(media_cell)
    except ValueError:
        raise RowError(line, f"unknown media {media_cell!r}") from None

    try:
        z_raw = json.loads(z_cell)
        shape_raw = json.loads(shape_cell)
        av_raw = json.loads(av_cell)
    except json.JSONDecodeError as e:
        raise RowError(line, f"malformed JSON cell: {e.msg}") from None
    if not isinstance(z_raw, list) or not all(_is_number(t) for t in z_raw):
        raise RowError(line, f"z must be a numeric array, got {z_cell!r}")
    z = tuple(float(t) for t in z_raw)
    xy = None
    if shape_raw is not None:
        try:
            xy = shape_from_obj(shape_raw)
        except ValueError as e:
            raise RowError(line, str(e)) from None
    if not isinstance(av_raw, dict):
        raise RowError(line, f"attributes cell must be a JSON object, got {av_cell!r}")

    fid = next((k for k, f in work.files.items() if f.uri == filename), None)
    if fid is not None and work.files[fid].media is not media:
        raise RowError(
            line,
            f"file {filename!r} already registered as {work.files[fid].media.value}, row says {media.value}",
        )

    # Resolve attribute names against the target schema; unknown names become
    # TEXT attributes for the row's anchor, but only when the value fits.
    probe = MetadataEntry("", "__row__", z, xy, {})
    kind = entry_kind(probe)
    av: dict[str, Value] = {}
    to_create: list[str] = []
    hypothetical = dict(work.attributes)
    for name in sorted(av_raw):
        try:
            value = value_from_obj(av_raw[name])
        except ValueError as e:
            raise RowError(line, str(e)) from None
        aid = next(
            (k for k, a in work.attributes.items() if a.name == name and a.anchor is kind),
            None,
        )
        if aid is None:
            if not isinstance(value, str):
                raise RowError(
                    line, f"attribute {name!r} is unknown and its value is not text"
                )
            aid = f"__new__{len(to_create)}"
            to_create.append(name)
            hypothetical[aid] = Attribute(aid, name, kind, InputType.TEXT)
        av[aid] = value

    probe.av = av
    probe_files = {"__row__": FileRef("__row__", filename, media)}
    problems = [
        v for v in _check_entry(probe, probe_files, hypothetical, subject=f"line {line}")
        if v.severity == "error"
    ]
    if problems:
        raise RowError(line, problems[0].message)

    if fid is None:
        fid = work.add_file(filename, media)
        result.created_files.append(fid)
    for i, name in enumerate(to_create):
        new_aid = work.add_attribute(name, kind, InputType.TEXT)
        result.created_attributes.append(new_aid)
        av[new_aid] = av.pop(f"__new__{i}")
    work.upsert_metadata(fid, z, xy, av)
