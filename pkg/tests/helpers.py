"""Shared test machinery: randomized-but-valid project generation and the
independent oracles the derived expectations come from.

Oracles deliberately avoid the library's own code paths: polygon membership
is re-derived with a differently-formulated crossing count, areas come from
Monte Carlo rejection sampling, merges from dense boolean timelines.
"""

from __future__ import annotations

import random
from collections import Counter

from annotate import (
    Anchor,
    Circle,
    Ellipse,
    InputType,
    Media,
    Point,
    Polygon,
    Polyline,
    Project,
    Rect,
    create_project,
)

_EXT = {Media.IMAGE: "jpg", Media.AUDIO: "wav", Media.VIDEO: "mp4"}

# Deliberately awkward label material: commas, quotes, newlines, non-ASCII.
_LABELS = [
    "Yes",
    "No",
    "swan",
    "naïve label",
    'quo"ted',
    "a,b,c",
    "two\nlines",
    "Sherlock",
    "John",
    "пилот",
    "12.5%",
]


def rand_label(rng: random.Random) -> str:
    return rng.choice(_LABELS)


def random_shape(rng: random.Random):
    kind = rng.randrange(6)
    if kind == 0:
        return Rect(rng.uniform(-50, 2000), rng.uniform(-50, 2000), rng.uniform(0.1, 500), rng.uniform(0.1, 500))
    if kind == 1:
        return Circle(rng.uniform(0, 2000), rng.uniform(0, 2000), rng.uniform(0.1, 300))
    if kind == 2:
        return Ellipse(rng.uniform(0, 2000), rng.uniform(0, 2000), rng.uniform(0.1, 300), rng.uniform(0.1, 300))
    if kind == 3:
        return Point(rng.uniform(-50, 2000), rng.uniform(-50, 2000))
    if kind == 4:
        if rng.random() < 0.7:
            return star_polygon(rng, rng.randint(3, 10))
        vertices = tuple((rng.uniform(0, 500), rng.uniform(0, 500)) for _ in range(rng.randint(3, 8)))
        return Polygon(vertices)
    return Polyline(tuple((rng.uniform(0, 500), rng.uniform(0, 500)) for _ in range(rng.randint(2, 8))))


def star_polygon(
    rng: random.Random,
    n: int,
    cx: float | None = None,
    cy: float | None = None,
    rmin: float = 50.0,
    rmax: float = 100.0,
) -> Polygon:
    """A guaranteed-simple polygon: vertices at increasing angles around a hub.

    Angles are jittered off a regular spacing, which keeps the polygon from
    collapsing into a sliver (Monte Carlo area oracles need a healthy
    area-to-bbox ratio to converge).
    """
    import math

    cx = rng.uniform(200, 800) if cx is None else cx
    cy = rng.uniform(200, 800) if cy is None else cy
    step = 2 * math.pi / n
    angles = [step * (i + rng.uniform(0.0, 0.8)) for i in range(n)]
    vertices = tuple(
        (cx + r * math.cos(a), cy + r * math.sin(a))
        for a, r in ((a, rng.uniform(rmin, rmax)) for a in angles)
    )
    return Polygon(vertices)


def random_value(rng: random.Random, attr):
    if attr.input is InputType.TEXT:
        return rand_label(rng)
    if attr.input is InputType.CHECKBOX:
        ids = list(attr.options)
        return tuple(sorted(rng.sample(ids, rng.randint(0, len(ids)))))
    return rng.choice(list(attr.options))


def random_project(rng: random.Random, pid: str | None = None) -> Project:
    """A small valid project with mixed anchors, media, and value types."""
    p = create_project(f"project {rng.randrange(10_000)}", pid=pid or f"p-{rng.randrange(16**10):010x}")
    for i in range(rng.randint(1, 6)):
        anchor = rng.choice(list(Anchor))
        input_ = rng.choice(list(InputType))
        options = None
        default = None
        if input_ is not InputType.TEXT:
            options = {f"o{j + 1}": rand_label(rng) for j in range(rng.randint(1, 4))}
            if rng.random() < 0.3:
                default = rng.choice(list(options))
        elif rng.random() < 0.3:
            default = rand_label(rng)
        p.add_attribute(f"attr{i}", anchor, input_, options, default)

    fids = []
    for i in range(rng.randint(1, 5)):
        media = rng.choice(list(Media))
        dims = None
        duration = None
        if media is not Media.AUDIO and rng.random() < 0.7:
            dims = (rng.randint(100, 4000), rng.randint(100, 4000))
        if media is not Media.IMAGE and rng.random() < 0.8:
            duration = round(rng.uniform(5, 600), 3)
        fids.append(p.add_file(f"media/{i:04d}.{_EXT[media]}", media, dims=dims, duration=duration))

    by_anchor = {
        anchor: [aid for aid, a in p.attributes.items() if a.anchor is anchor]
        for anchor in Anchor
    }
    for _ in range(rng.randint(0, 12)):
        fid = rng.choice(fids)
        media = p.files[fid].media
        choices = ["file"]
        if media is not Media.AUDIO:
            choices.append("spatial")
        if media is not Media.IMAGE:
            choices.append("temporal")
        kind = rng.choice(choices)
        z: tuple[float, ...] = ()
        xy = None
        if kind == "spatial":
            xy = random_shape(rng)
            if media is Media.VIDEO and rng.random() < 0.5:
                z = (rng.uniform(0, 500),)
            anchor = Anchor.SPATIAL_REGION
        elif kind == "temporal":
            if rng.random() < 0.2:
                z = (rng.uniform(0, 500),)
            else:
                start = rng.uniform(0, 400)
                z = (start, start + rng.uniform(0.01, 100))
            anchor = Anchor.TEMPORAL_SEGMENT
        else:
            anchor = Anchor.FILE
        av = {}
        for aid in by_anchor[anchor]:
            if rng.random() < 0.6:
                av[aid] = random_value(rng, p.attributes[aid])
        p.upsert_metadata(fid, z=z, xy=xy, av=av)
    return p


def clone_schema(p: Project, pid: str | None = None) -> Project:
    """A fresh project with the same attributes (ids re-minted in order)."""
    out = create_project(p.name, pid=pid or (p.pid + "-clone"))
    for a in p.attributes.values():
        out.add_attribute(a.name, a.anchor, a.input, dict(a.options), a.default)
    return out


def csv_signature(p: Project) -> Counter:
    """The multiset CSV interchange must preserve: (filename, z, shape, av-by-name)."""
    sig = Counter()
    for e in p.metadata.values():
        av = tuple(sorted((p.attributes[aid].name, v) for aid, v in e.av.items()))
        sig[(p.files[e.file_id].uri, e.z, e.xy, av)] += 1
    return sig


# -- independent geometry oracles ------------------------------------------------


def even_odd_contains(vertices, px: float, py: float) -> bool:
    """Textbook even-odd ray cast, coded independently of the library.

    Counts crossings of the rightward ray using the lower-endpoint-inclusive
    rule; horizontal edges never cross.
    """
    crossings = 0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if y1 == y2:
            continue
        if y1 < y2:
            hit = y1 <= py < y2
        else:
            hit = y2 <= py < y1
        if hit:
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if x_at > px:
                crossings += 1
    return crossings % 2 == 1


def mc_polygon_area(vertices, n_samples: int, seed: int) -> float:
    """Monte Carlo rejection estimate of even-odd polygon area."""
    import numpy as np

    rng = np.random.default_rng(seed)
    xs = np.array([v[0] for v in vertices])
    ys = np.array([v[1] for v in vertices])
    xmin, xmax = xs.min(), xs.max()
    ymin, ymax = ys.min(), ys.max()
    px = rng.uniform(xmin, xmax, n_samples)
    py = rng.uniform(ymin, ymax, n_samples)
    inside = np.zeros(n_samples, dtype=bool)
    x1, y1 = xs[-1], ys[-1]
    for x2, y2 in zip(xs, ys):
        if y2 != y1:
            straddle = (y1 > py) != (y2 > py)
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddle & (px < x_cross)
        x1, y1 = x2, y2
    return float(inside.mean()) * float((xmax - xmin) * (ymax - ymin))


def segments_properly_cross(a, b, c, d) -> bool:
    """Parametric segment intersection, independent of the library's orientation tests."""
    rx, ry = b[0] - a[0], b[1] - a[1]
    sx, sy = d[0] - c[0], d[1] - c[1]
    denom = rx * sy - ry * sx
    qpx, qpy = c[0] - a[0], c[1] - a[1]
    if denom == 0:
        return False
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    return 0 < t < 1 and 0 < u < 1
