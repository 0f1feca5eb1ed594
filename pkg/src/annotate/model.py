"""The project aggregate: attributes, files, metadata entries, and the
validated mutations over them.

A project owns three ordered maps (attributes, files, metadata) plus a
monotone revision counter that ticks on every successful mutation.  Ids are
minted as ``<prefix><n>`` ("a1", "f2", "m3") from a single per-project
counter, so an id is never reused within a project's lifetime, deletions
included.

Mutation methods update the project in place and return the id they touched;
callers that need value semantics can copy first.  Project values are not
internally locked: share them read-only or synchronize externally (the
collaboration service serializes all writers).
"""

from __future__ import annotations

import enum
import math
import uuid
from dataclasses import dataclass, field

from . import geometry
from .errors import (
    AnchorMismatch,
    BadZ,
    DuplicateName,
    EmptyName,
    EmptyUri,
    InvalidOptions,
    InvalidShape,
    InvalidValue,
    ShapeOnAudio,
    UnknownAttribute,
    UnknownFile,
    UnknownMetadata,
    Violation,
)
from .geometry import Shape

SCHEMA_VERSION = "1.0"

#: Attribute values: free text, a single option id, or a sorted tuple of
#: option ids for checkboxes.
Value = str | tuple[str, ...]


class Anchor(enum.Enum):
    """What an attribute describes: a whole file, a region, or a segment."""

    FILE = "file"
    SPATIAL_REGION = "spatial_region"
    TEMPORAL_SEGMENT = "temporal_segment"


class InputType(enum.Enum):
    """How annotators answer an attribute.

    TEXT is free-form.  The list inputs (checkbox/radio/dropdown/image) draw
    from a predefined option map, which keeps label naming consistent between
    annotators; IMAGE behaves like RADIO with image URIs as option labels.
    """

    TEXT = "text"
    CHECKBOX = "checkbox"
    RADIO = "radio"
    DROPDOWN = "dropdown"
    IMAGE = "image"


class Media(enum.Enum):
    IMAGE = "image"
    AUDIO = "audio"
    VIDEO = "video"


_LIST_INPUTS = (InputType.CHECKBOX, InputType.RADIO, InputType.DROPDOWN, InputType.IMAGE)
_SINGLE_OPTION_INPUTS = (InputType.RADIO, InputType.DROPDOWN, InputType.IMAGE)


@dataclass
class Attribute:
    """A named, typed question anchored to files, regions, or segments."""

    aid: str
    name: str
    anchor: Anchor
    input: InputType
    options: dict[str, str] = field(default_factory=dict)
    default: str | None = None


@dataclass
class FileRef:
    """A media file known to the project, referenced by URI only.

    The core never decodes media; dims (images/video) and duration
    (audio/video) are caller-supplied hints used for statistics and UI.
    """

    fid: str
    uri: str
    media: Media
    dims: tuple[int, int] | None = None
    duration: float | None = None


@dataclass
class MetadataEntry:
    """One annotation: a file reference, optional temporal coordinates,
    an optional spatial shape, and attribute values.

    ``z`` holds 0, 1, or 2 timestamps in seconds: empty means whole-file (or
    a pure spatial region), one value pins a video still frame, two values
    delimit a temporal segment [start, end).
    """

    mid: str
    file_id: str
    z: tuple[float, ...] = ()
    xy: Shape | None = None
    av: dict[str, Value] = field(default_factory=dict)


def entry_kind(entry: MetadataEntry) -> Anchor:
    """Which anchor class an entry belongs to.

    A shape makes it spatial (optionally pinned to a still frame); timestamps
    without a shape make it temporal; otherwise it describes the whole file.
    """
    if entry.xy is not None:
        return Anchor.SPATIAL_REGION
    if entry.z:
        return Anchor.TEMPORAL_SEGMENT
    return Anchor.FILE


_SHAPE_TYPES = (
    geometry.Rect,
    geometry.Circle,
    geometry.Ellipse,
    geometry.Point,
    geometry.Polygon,
    geometry.Polyline,
)


@dataclass
class Project:
    """Root aggregate.  Create via :func:`create_project` or the loader."""

    pid: str
    name: str
    schema_version: str = SCHEMA_VERSION
    attributes: dict[str, Attribute] = field(default_factory=dict)
    files: dict[str, FileRef] = field(default_factory=dict)
    metadata: dict[str, MetadataEntry] = field(default_factory=dict)
    revision: int = 0
    id_counter: int = 0

    # -- id minting ---------------------------------------------------------

    def _mint(self, prefix: str) -> str:
        self.id_counter += 1
        return f"{prefix}{self.id_counter}"

    # -- mutations ------------------------------------------------------------

    def add_attribute(
        self,
        name: str,
        anchor: Anchor,
        input: InputType,
        options: dict[str, str] | None = None,
        default: str | None = None,
    ) -> str:
        """Register an attribute and return its fresh id.

        Option ids (and a non-None default) are coerced to strings, so the
        common ``{1: "Yes", 2: "No"}`` spelling works.
        """
        anchor = Anchor(anchor)
        input = InputType(input)
        name = name.strip() if isinstance(name, str) else name
        opts = {str(k): v for k, v in (options or {}).items()}
        default = None if default is None else str(default)
        spec = Attribute("", name, anchor, input, opts, default)

        violations = _check_attribute(spec, subject="attribute")
        if violations:
            _raise_first(violations)
        for a in self.attributes.values():
            if a.anchor is anchor and a.name == name:
                raise DuplicateName(f"attribute {name!r} already exists for anchor {anchor.value}")

        aid = self._mint("a")
        spec.aid = aid
        self.attributes[aid] = spec
        self.revision += 1
        return aid

    def add_file(
        self,
        uri: str,
        media: Media,
        dims: tuple[int, int] | None = None,
        duration: float | None = None,
    ) -> str:
        """Register a media file by URI and return its fresh id."""
        media = Media(media)
        if not isinstance(uri, str) or uri == "":
            raise EmptyUri("file uri must be non-empty")
        if dims is not None:
            dims = tuple(dims)
        ref = FileRef("", uri, media, dims, None if duration is None else float(duration))
        violations = _check_file(ref, subject="file")
        if violations:
            raise ValueError(violations[0].message)

        fid = self._mint("f")
        ref.fid = fid
        self.files[fid] = ref
        self.revision += 1
        return fid

    def upsert_metadata(
        self,
        file_id: str,
        z: tuple[float, ...] | list[float] = (),
        xy: Shape | None = None,
        av: dict[str, Value] | None = None,
        mid: str | None = None,
    ) -> str:
        """Insert a new entry (``mid=None``, a fresh id is minted) or replace
        an existing one wholesale.  Returns the entry id.
        """
        if file_id not in self.files:
            raise UnknownFile(f"file {file_id!r} not in registry")
        if mid is not None and mid not in self.metadata:
            raise UnknownMetadata(f"metadata {mid!r} does not exist")

        entry = MetadataEntry(
            mid or "",
            file_id,
            tuple(float(t) for t in z),
            xy,
            _canon_av(self.attributes, av or {}),
        )
        violations = _check_entry(entry, self.files, self.attributes, subject=mid or "entry")
        if violations:
            _raise_first(violations)

        if mid is None:
            mid = self._mint("m")
            entry.mid = mid
        self.metadata[mid] = entry
        self.revision += 1
        return mid

    def delete_metadata(self, mid: str) -> None:
        """Remove an entry.  Deleting twice raises; ids are never reused."""
        if mid not in self.metadata:
            raise UnknownMetadata(f"metadata {mid!r} does not exist")
        del self.metadata[mid]
        self.revision += 1

    # -- validation -------------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Check every invariant; report, never throw.

        Returns one violation per broken rule, naming the offending id.  An
        empty list means the project is well formed.
        """
        out: list[Violation] = []
        if not isinstance(self.name, str) or not self.name.strip():
            out.append(Violation("empty_name", self.pid, "project name is empty"))
        if not isinstance(self.revision, int) or self.revision < 0:
            out.append(Violation("bad_revision", self.pid, f"revision {self.revision!r} invalid"))
        if not isinstance(self.id_counter, int) or self.id_counter < 0:
            out.append(Violation("bad_counter", self.pid, f"id counter {self.id_counter!r} invalid"))

        seen: dict[tuple[Anchor, str], str] = {}
        for aid, a in self.attributes.items():
            if a.aid != aid:
                out.append(Violation("id_mismatch", aid, f"attribute keyed {aid} carries id {a.aid}"))
            out.extend(_check_attribute(a, subject=aid))
            key = (a.anchor, a.name)
            if key in seen:
                out.append(
                    Violation(
                        "duplicate_name",
                        aid,
                        f"attribute name {a.name!r} duplicates {seen[key]} within anchor {a.anchor.value}",
                    )
                )
            seen[key] = aid

        for fid, f in self.files.items():
            if f.fid != fid:
                out.append(Violation("id_mismatch", fid, f"file keyed {fid} carries id {f.fid}"))
            out.extend(_check_file(f, subject=fid))

        for mid, e in self.metadata.items():
            if e.mid != mid:
                out.append(Violation("id_mismatch", mid, f"entry keyed {mid} carries id {e.mid}"))
            out.extend(_check_entry(e, self.files, self.attributes, subject=mid))
        return out


def create_project(name: str, pid: str | None = None) -> Project:
    """Start an empty project.  The name is trimmed and must be non-empty."""
    if not isinstance(name, str) or not name.strip():
        raise EmptyName("project name must be non-empty")
    return Project(pid or f"p-{uuid.uuid4().hex[:12]}", name.strip())


# -- shared checkers -----------------------------------------------------------
#
# Mutations and validate() share these so a project built through the API can
# never fail validation.  Mutations raise the first finding; validate()
# collects everything.

_RAISE_FOR: dict[str, type[Exception]] = {
    "empty_name": EmptyName,
    "invalid_options": InvalidOptions,
    "invalid_default": InvalidValue,
    "empty_uri": EmptyUri,
    "unknown_file": UnknownFile,
    "bad_z": BadZ,
    "shape_on_audio": ShapeOnAudio,
    "invalid_shape": InvalidShape,
    "dangling_attribute": UnknownAttribute,
    "anchor_mismatch": AnchorMismatch,
    "invalid_value": InvalidValue,
}


def _raise_first(violations: list[Violation]) -> None:
    v = violations[0]
    raise _RAISE_FOR.get(v.code, InvalidValue)(v.message)


def _check_attribute(a: Attribute, subject: str) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(a.name, str) or not a.name.strip():
        out.append(Violation("empty_name", subject, "attribute name is empty"))
    if a.input is InputType.TEXT:
        if a.options:
            out.append(
                Violation("invalid_options", subject, "text attributes take no options")
            )
    else:
        if not a.options:
            out.append(
                Violation(
                    "invalid_options",
                    subject,
                    f"{a.input.value} attributes need a non-empty option list",
                )
            )
        if not all(isinstance(k, str) and isinstance(v, str) for k, v in a.options.items()):
            out.append(Violation("invalid_options", subject, "options must map str ids to str labels"))
    if a.default is not None:
        if a.input is InputType.TEXT:
            if not isinstance(a.default, str):
                out.append(Violation("invalid_default", subject, "text default must be a string"))
        elif a.default not in a.options:
            out.append(
                Violation("invalid_default", subject, f"default {a.default!r} is not an option id")
            )
    return out


def _check_file(f: FileRef, subject: str) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(f.uri, str) or f.uri == "":
        out.append(Violation("empty_uri", subject, "file uri is empty"))
    if f.dims is not None:
        if f.media is Media.AUDIO:
            out.append(Violation("bad_dims", subject, "audio files have no pixel dims"))
        if (
            len(f.dims) != 2
            or not all(isinstance(d, int) and not isinstance(d, bool) for d in f.dims)
            or f.dims[0] <= 0
            or f.dims[1] <= 0
        ):
            out.append(Violation("bad_dims", subject, f"dims must be positive integers, got {f.dims!r}"))
    if f.duration is not None:
        if f.media is Media.IMAGE:
            out.append(Violation("bad_duration", subject, "image files have no duration"))
        if not isinstance(f.duration, float) or not math.isfinite(f.duration) or f.duration < 0:
            out.append(
                Violation("bad_duration", subject, f"duration must be >= 0 seconds, got {f.duration!r}")
            )
    return out


def _check_entry(
    e: MetadataEntry,
    files: dict[str, FileRef],
    attributes: dict[str, Attribute],
    subject: str,
) -> list[Violation]:
    out: list[Violation] = []
    f = files.get(e.file_id)
    if f is None:
        out.append(Violation("unknown_file", subject, f"file {e.file_id!r} not in registry"))

    z = e.z
    if len(z) > 2:
        out.append(Violation("bad_z", subject, f"z holds at most 2 timestamps, got {len(z)}"))
    elif any(not math.isfinite(t) or t < 0 for t in z):
        out.append(Violation("bad_z", subject, f"timestamps must be finite and >= 0, got {z}"))
    elif len(z) == 2 and not z[0] < z[1]:
        out.append(Violation("bad_z", subject, f"segment start must precede end, got {z}"))
    elif z and f is not None and f.media is Media.IMAGE:
        out.append(Violation("bad_z", subject, "still images carry no timestamps"))

    if e.xy is not None:
        if not isinstance(e.xy, _SHAPE_TYPES):
            out.append(Violation("invalid_shape", subject, f"not a shape: {e.xy!r}"))
        else:
            if f is not None and f.media is Media.AUDIO:
                out.append(Violation("shape_on_audio", subject, "audio entries never carry shapes"))
            if len(z) == 2:
                out.append(
                    Violation(
                        "bad_z", subject, "a region is pinned to at most one still-frame time"
                    )
                )
            for v in geometry.validate_shape(e.xy):
                if v.severity == "error":
                    out.append(Violation("invalid_shape", subject, f"{v.code}: {v.message}"))

    kind = entry_kind(e)
    for aid, value in e.av.items():
        a = attributes.get(aid)
        if a is None:
            out.append(Violation("dangling_attribute", subject, f"attribute {aid!r} not in schema"))
            continue
        if a.anchor is not kind:
            out.append(
                Violation(
                    "anchor_mismatch",
                    subject,
                    f"attribute {aid} anchors to {a.anchor.value}, entry is {kind.value}",
                )
            )
        msg = _check_value(a, value)
        if msg is not None:
            out.append(Violation("invalid_value", subject, f"attribute {aid}: {msg}"))
    return out


def _check_value(a: Attribute, value: Value) -> str | None:
    """Message describing why ``value`` is invalid for ``a``, or None."""
    if a.input is InputType.TEXT:
        if not isinstance(value, str):
            return f"expected free text, got {value!r}"
    elif a.input in _SINGLE_OPTION_INPUTS:
        if not isinstance(value, str) or value not in a.options:
            return f"expected one option id of {sorted(a.options)}, got {value!r}"
    else:  # CHECKBOX
        if (
            not isinstance(value, tuple)
            or not all(isinstance(v, str) for v in value)
            or list(value) != sorted(set(value))
        ):
            return f"expected a sorted tuple of option ids, got {value!r}"
        if not set(value) <= set(a.options):
            return f"option ids {sorted(set(value) - set(a.options))} are not defined"
    return None


def _canon_av(attributes: dict[str, Attribute], av: dict[str, Value]) -> dict[str, Value]:
    """Coerce raw attribute values into canonical stored form.

    Checkbox answers accept any iterable of option ids and are stored as a
    sorted duplicate-free tuple.  Unknown attributes pass through here and are
    rejected by the entry checker, which knows the entry id.
    """
    out: dict[str, Value] = {}
    for aid, value in av.items():
        a = attributes.get(aid)
        if a is not None and a.input is InputType.CHECKBOX:
            if isinstance(value, str) or not isinstance(value, (list, tuple, set, frozenset)):
                raise InvalidValue(
                    f"attribute {aid}: checkbox values are collections of option ids, got {value!r}"
                )
            value = tuple(sorted({str(v) for v in value}))
        elif a is not None and a.input in _SINGLE_OPTION_INPUTS and not isinstance(value, str):
            value = str(value)
        out[aid] = value
    return out
