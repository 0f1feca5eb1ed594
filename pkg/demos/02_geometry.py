"""The six region shapes and the queries an editor needs.

Coordinates are image pixels: origin top-left, y grows downward, sub-pixel
precision allowed. All functions are pure.
"""

from annotate.geometry import (
    Circle,
    Ellipse,
    Point,
    Polygon,
    Polyline,
    Rect,
    area,
    bbox,
    hit_test,
    nearest_vertex,
    scale,
    translate,
    validate_shape,
)

shapes = {
    "rect": Rect(100, 100, 300, 200),
    "circle": Circle(500, 300, 80),
    "ellipse": Ellipse(200, 500, 120, 60),
    "point": Point(640, 360),
    "polygon": Polygon(((400, 50), (520, 120), (480, 260), (340, 230), (320, 110))),
    "polyline": Polyline(((50, 600), (200, 640), (350, 600), (500, 680))),
}

for name, s in shapes.items():
    box = bbox(s)
    print(f"{name:9} area={area(s):10.1f}  bbox=({box.xmin:.0f},{box.ymin:.0f})..({box.xmax:.0f},{box.ymax:.0f})")

# Hit testing drives region selection: area shapes test containment
# (boundary inclusive), point and polyline use a pixel tolerance.
pointer = (450, 150)
hits = [name for name, s in shapes.items() if hit_test(s, pointer, tol=5)]
print(f"\npointer {pointer} selects: {hits}")
print(f"circle boundary is inclusive: {hit_test(Circle(0, 0, 5), (3, 4))}")  # 3-4-5

# Vertex grabbing for drag-editing: nearest control point, ties to the
# lowest index.
idx, dist = nearest_vertex(shapes["polygon"], (330, 115))
print(f"nearest polygon vertex to (330,115): index {idx}, {dist:.2f} px away")

# Editing transforms preserve the shape type.
moved = translate(shapes["rect"], 50, -20)
doubled = scale(shapes["circle"], 2, origin=(0, 0))
print(f"\ntranslate rect -> {moved}")
print(f"scale circle x2 about origin -> {doubled}")
print(f"area scales with the square: {area(doubled) / area(shapes['circle']):.1f}x")

# Validation reports instead of raising; self-intersection is a warning,
# because annotators do draw bow-ties and the even-odd rule handles them.
bow_tie = Polygon(((0, 0), (2, 2), (2, 0), (0, 2)))
for v in validate_shape(bow_tie):
    print(f"\nbow-tie: {v}")
print(f"bow-tie area under the even-odd rule: {area(bow_tie)}")
