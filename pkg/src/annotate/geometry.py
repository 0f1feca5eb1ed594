"""The six spatial region shapes and the geometric queries the tooling needs.

Coordinates live in image pixel space: origin at the top-left corner, y grows
downward, values are real (sub-pixel precision is meaningful).  All functions
here are pure; shapes are frozen dataclasses and never mutated.

Containment is boundary-inclusive.  Polygon membership follows the even-odd
(ray casting) rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import WARNING, NonPositiveFactor, Violation

#: Default pick tolerance (px) for POINT and POLYLINE hit tests.
DEFAULT_HIT_TOLERANCE = 5.0

PointXY = tuple[float, float]


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for f in ("x", "y", "w", "h"):
            object.__setattr__(self, f, float(getattr(self, f)))


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        for f in ("cx", "cy", "r"):
            object.__setattr__(self, f, float(getattr(self, f)))


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse; rx/ry are the half-axes along x and y."""

    cx: float
    cy: float
    rx: float
    ry: float

    def __post_init__(self):
        for f in ("cx", "cy", "rx", "ry"):
            object.__setattr__(self, f, float(getattr(self, f)))


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[PointXY, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in self.vertices)
        )


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[PointXY, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in self.vertices)
        )


Shape = Rect | Circle | Ellipse | Point | Polygon | Polyline


@dataclass(frozen=True)
class BBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float


# -- validation ---------------------------------------------------------------


def validate_shape(s: Shape) -> list[Violation]:
    """Check a shape against its invariants.

    Returns an empty list when the shape is well formed.  Self-intersecting
    polygons are legal annotation data and yield a warning-class violation,
    not an error.
    """
    kind = shape_kind(s)
    out: list[Violation] = []

    def err(code: str, msg: str) -> None:
        out.append(Violation(code, kind, msg))

    coords = _all_coordinates(s)
    if any(not math.isfinite(c) for c in coords):
        err("nonfinite_coordinate", "all coordinates must be finite")
        return out

    if isinstance(s, Rect):
        if s.w <= 0 or s.h <= 0:
            err("nonpositive_size", f"width and height must be > 0, got {s.w}x{s.h}")
    elif isinstance(s, Circle):
        if s.r <= 0:
            err("nonpositive_size", f"radius must be > 0, got {s.r}")
    elif isinstance(s, Ellipse):
        if s.rx <= 0 or s.ry <= 0:
            err("nonpositive_size", f"half-axes must be > 0, got {s.rx}, {s.ry}")
    elif isinstance(s, Point):
        pass
    elif isinstance(s, Polygon):
        if len(s.vertices) < 3:
            err("too_few_vertices", f"polygon needs >= 3 vertices, got {len(s.vertices)}")
        else:
            if _has_duplicate_neighbors(s.vertices, closed=True):
                err("duplicate_vertex", "consecutive vertices must differ")
            elif _polygon_self_intersects(s.vertices):
                out.append(
                    Violation(
                        "self_intersecting",
                        kind,
                        "polygon edges cross; area uses the even-odd rule",
                        WARNING,
                    )
                )
    elif isinstance(s, Polyline):
        if len(s.vertices) < 2:
            err("too_few_vertices", f"polyline needs >= 2 vertices, got {len(s.vertices)}")
        elif _has_duplicate_neighbors(s.vertices, closed=False):
            err("duplicate_vertex", "consecutive vertices must differ")
    else:
        raise TypeError(f"not a shape: {s!r}")
    return out


def shape_kind(s: Shape) -> str:
    """Lowercase tag of the shape type ('rect', 'circle', ...)."""
    return type(s).__name__.lower()


def _all_coordinates(s: Shape) -> tuple[float, ...]:
    if isinstance(s, Rect):
        return (s.x, s.y, s.w, s.h)
    if isinstance(s, Circle):
        return (s.cx, s.cy, s.r)
    if isinstance(s, Ellipse):
        return (s.cx, s.cy, s.rx, s.ry)
    if isinstance(s, Point):
        return (s.x, s.y)
    if isinstance(s, (Polygon, Polyline)):
        return tuple(c for v in s.vertices for c in v)
    raise TypeError(f"not a shape: {s!r}")


def _has_duplicate_neighbors(vertices: tuple[PointXY, ...], closed: bool) -> bool:
    n = len(vertices)
    pairs = range(n) if closed else range(n - 1)
    return any(vertices[i] == vertices[(i + 1) % n] for i in pairs)


def _orient(a: PointXY, b: PointXY, c: PointXY) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _in_box(p: PointXY, a: PointXY, b: PointXY) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_intersect(a: PointXY, b: PointXY, c: PointXY, d: PointXY) -> bool:
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _in_box(a, c, d):
        return True
    if d2 == 0 and _in_box(b, c, d):
        return True
    if d3 == 0 and _in_box(c, a, b):
        return True
    if d4 == 0 and _in_box(d, a, b):
        return True
    return False


def _polygon_self_intersects(vertices: tuple[PointXY, ...]) -> bool:
    # Brute-force pairwise check over non-adjacent edges; annotation polygons
    # are small, so O(n^2) is fine.
    n = len(vertices)
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            if adjacent:
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return True
    return False


# -- queries ------------------------------------------------------------------


def hit_test(s: Shape, p: PointXY, tol: float = DEFAULT_HIT_TOLERANCE) -> bool:
    """Whether a pointer at ``p`` selects the shape.

    Area shapes test boundary-inclusive containment; POINT tests distance to
    the point and POLYLINE distance to its nearest segment, both against
    ``tol`` pixels.
    """
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    px, py = float(p[0]), float(p[1])
    if isinstance(s, Rect):
        return s.x <= px <= s.x + s.w and s.y <= py <= s.y + s.h
    if isinstance(s, Circle):
        return (px - s.cx) ** 2 + (py - s.cy) ** 2 <= s.r**2
    if isinstance(s, Ellipse):
        return ((px - s.cx) / s.rx) ** 2 + ((py - s.cy) / s.ry) ** 2 <= 1.0
    if isinstance(s, Point):
        return math.hypot(px - s.x, py - s.y) <= tol
    if isinstance(s, Polyline):
        return _min_segment_distance(s.vertices, px, py, closed=False) <= tol
    if isinstance(s, Polygon):
        return _polygon_contains(s.vertices, px, py)
    raise TypeError(f"not a shape: {s!r}")


def _min_segment_distance(
    vertices: tuple[PointXY, ...], px: float, py: float, closed: bool
) -> float:
    n = len(vertices)
    last = n if closed else n - 1
    best = math.inf
    for i in range(last):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        best = min(best, _point_segment_distance(px, py, x1, y1, x2, y2))
    return best


def _point_segment_distance(
    px: float, py: float, x1: float, y1: float, x2: float, y2: float
) -> float:
    dx, dy = x2 - x1, y2 - y1
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * dx + (py - y1) * dy) / length_sq
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def _polygon_contains(vertices: tuple[PointXY, ...], px: float, py: float) -> bool:
    # Boundary first (inclusive), then even-odd crossing count for the
    # interior.  The half-open vertex rule below counts each crossing once.
    n = len(vertices)
    x1, y1 = vertices[-1]
    for x2, y2 in vertices:
        if _on_segment(px, py, x1, y1, x2, y2):
            return True
        x1, y1 = x2, y2
    inside = False
    x1, y1 = vertices[-1]
    for x2, y2 in vertices:
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
        x1, y1 = x2, y2
    return inside


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def bbox(s: Shape) -> BBox:
    """Tight axis-aligned bounds; a point yields a degenerate box."""
    if isinstance(s, Rect):
        return BBox(s.x, s.y, s.x + s.w, s.y + s.h)
    if isinstance(s, Circle):
        return BBox(s.cx - s.r, s.cy - s.r, s.cx + s.r, s.cy + s.r)
    if isinstance(s, Ellipse):
        return BBox(s.cx - s.rx, s.cy - s.ry, s.cx + s.rx, s.cy + s.ry)
    if isinstance(s, Point):
        return BBox(s.x, s.y, s.x, s.y)
    if isinstance(s, (Polygon, Polyline)):
        xs = [v[0] for v in s.vertices]
        ys = [v[1] for v in s.vertices]
        return BBox(min(xs), min(ys), max(xs), max(ys))
    raise TypeError(f"not a shape: {s!r}")


def area(s: Shape) -> float:
    """Enclosed area in px^2; open shapes (point, polyline) have none.

    Self-intersecting polygons get the absolute shoelace value, which is the
    even-odd area only up to winding multiplicity; such polygons are flagged
    by :func:`validate_shape`.
    """
    if isinstance(s, Rect):
        return s.w * s.h
    if isinstance(s, Circle):
        return math.pi * s.r**2
    if isinstance(s, Ellipse):
        return math.pi * s.rx * s.ry
    if isinstance(s, (Point, Polyline)):
        return 0.0
    if isinstance(s, Polygon):
        acc = 0.0
        n = len(s.vertices)
        for i in range(n):
            x1, y1 = s.vertices[i]
            x2, y2 = s.vertices[(i + 1) % n]
            acc += x1 * y2 - x2 * y1
        return abs(acc) / 2.0
    raise TypeError(f"not a shape: {s!r}")


def control_points(s: Shape) -> tuple[PointXY, ...]:
    """The pick/edit handles of a shape, in a fixed documented order.

    RECT: the four corners clockwise from top-left.  CIRCLE and ELLIPSE: the
    center.  POINT: itself.  POLYGON/POLYLINE: the vertices in order.
    """
    if isinstance(s, Rect):
        return ((s.x, s.y), (s.x + s.w, s.y), (s.x + s.w, s.y + s.h), (s.x, s.y + s.h))
    if isinstance(s, Circle):
        return ((s.cx, s.cy),)
    if isinstance(s, Ellipse):
        return ((s.cx, s.cy),)
    if isinstance(s, Point):
        return ((s.x, s.y),)
    if isinstance(s, (Polygon, Polyline)):
        return s.vertices
    raise TypeError(f"not a shape: {s!r}")


def nearest_vertex(s: Shape, p: PointXY) -> tuple[int, float]:
    """Index and distance of the control point closest to ``p``.

    Ties break toward the lowest index.
    """
    px, py = float(p[0]), float(p[1])
    best_i, best_d = 0, math.inf
    for i, (vx, vy) in enumerate(control_points(s)):
        d = math.hypot(px - vx, py - vy)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


# -- editing transforms --------------------------------------------------------


def translate(s: Shape, dx: float, dy: float) -> Shape:
    """Rigid move by (dx, dy); the shape type is preserved."""
    dx, dy = float(dx), float(dy)
    if isinstance(s, Rect):
        return replace(s, x=s.x + dx, y=s.y + dy)
    if isinstance(s, Circle):
        return replace(s, cx=s.cx + dx, cy=s.cy + dy)
    if isinstance(s, Ellipse):
        return replace(s, cx=s.cx + dx, cy=s.cy + dy)
    if isinstance(s, Point):
        return Point(s.x + dx, s.y + dy)
    if isinstance(s, (Polygon, Polyline)):
        moved = tuple((x + dx, y + dy) for x, y in s.vertices)
        return type(s)(moved)
    raise TypeError(f"not a shape: {s!r}")


def scale(s: Shape, factor: float, origin: PointXY = (0.0, 0.0)) -> Shape:
    """Uniform scale about ``origin``; the shape type is preserved."""
    factor = float(factor)
    if factor <= 0:
        raise NonPositiveFactor(f"scale factor must be > 0, got {factor}")
    ox, oy = float(origin[0]), float(origin[1])

    def sx(x: float) -> float:
        return ox + (x - ox) * factor

    def sy(y: float) -> float:
        return oy + (y - oy) * factor

    if isinstance(s, Rect):
        return Rect(sx(s.x), sy(s.y), s.w * factor, s.h * factor)
    if isinstance(s, Circle):
        return Circle(sx(s.cx), sy(s.cy), s.r * factor)
    if isinstance(s, Ellipse):
        return Ellipse(sx(s.cx), sy(s.cy), s.rx * factor, s.ry * factor)
    if isinstance(s, Point):
        return Point(sx(s.x), sy(s.y))
    if isinstance(s, (Polygon, Polyline)):
        return type(s)(tuple((sx(x), sy(y)) for x, y in s.vertices))
    raise TypeError(f"not a shape: {s!r}")
