"""Core library for manual annotation of images, audio, and video.

Spatial regions (six shapes) and temporal segments carry typed attribute
values on a validated project aggregate.  Projects serialize to a canonical
JSON document and a flat CSV; a grid-review module supports bulk curation of
machine-seeded annotations; the collab subpackage shares projects over HTTP
with deterministic conflict handling.
"""

from . import collab, geometry, gridview, serialization, timeline
from .errors import AnnotationError, Violation
from .geometry import BBox, Circle, Ellipse, Point, Polygon, Polyline, Rect, Shape
from .model import (
    Anchor,
    Attribute,
    FileRef,
    InputType,
    Media,
    MetadataEntry,
    Project,
    create_project,
    entry_kind,
)
from .serialization import export_csv, import_csv, load_project, save_project
from .timeline import Segment

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "AnnotationError",
    "Attribute",
    "BBox",
    "Circle",
    "Ellipse",
    "FileRef",
    "InputType",
    "Media",
    "MetadataEntry",
    "Point",
    "Polygon",
    "Polyline",
    "Project",
    "Rect",
    "Segment",
    "Shape",
    "Violation",
    "collab",
    "create_project",
    "entry_kind",
    "export_csv",
    "geometry",
    "gridview",
    "import_csv",
    "load_project",
    "save_project",
    "serialization",
    "timeline",
]
