"""Planar primitives and collision predicates.

Object discs may touch each other (contact is not overlap). Static obstacles
are closed sets, so a swept footprint that grazes an obstacle boundary counts
as a hit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

EPS = 1e-9


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, stored counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(Point(float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise ValueError("polygon vertices must be finite")
        area = signed_area(verts)
        if abs(area) <= EPS:
            raise ValueError("polygon is degenerate (zero area)")
        if not _is_simple(verts):
            raise ValueError("polygon is self-intersecting")
        if area < 0:
            verts = verts[::-1]
        object.__setattr__(self, "vertices", verts)

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def contains(self, p: Point) -> bool:
        """Point-in-polygon (interior or boundary)."""
        inside = False
        for a, b in self.edges():
            if point_segment_distance(p, a, b) <= EPS:
                return True
            if (a.y > p.y) != (b.y > p.y):
                x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
                if p.x < x_cross:
                    inside = not inside
        return inside

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def signed_area(verts: Sequence[Point]) -> float:
    s = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _is_simple(verts: Sequence[Point]) -> bool:
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c, d = verts[j], verts[(j + 1) % n]
            if segment_segment_distance(a, b, c, d) <= EPS:
                return False
    return True


def distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    # collinear / touching cases fall through to the distance test
    return False


def segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    if segments_intersect(a, b, c, d):
        return 0.0
    return min(
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
    )


def disc_disc_overlap(a: Disc, b: Disc) -> bool:
    """True iff the open interiors intersect; tangent discs do not overlap."""
    return distance(a.center, b.center) < a.radius + b.radius - EPS


def swept_disc_hits_disc(start: Point, end: Point, moving_radius: float, target: Disc) -> bool:
    """Does the capsule swept by a disc moving start->end overlap target's interior?"""
    if not moving_radius > 0:
        raise ValueError("moving_radius must be positive")
    d = point_segment_distance(target.center, start, end)
    return d < moving_radius + target.radius - EPS


def segment_polygon_distance(a: Point, b: Point, poly: Polygon) -> float:
    if poly.contains(a) or poly.contains(b):
        return 0.0
    return min(segment_segment_distance(a, b, u, v) for u, v in poly.edges())


def swept_disc_hits_polygon(start: Point, end: Point, radius: float, obstacle: Polygon) -> bool:
    """Closed-set test: grazing the boundary at exactly `radius` is a hit."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    return segment_polygon_distance(start, end, obstacle) <= radius + EPS


def capsule_in_bounds(start: Point, end: Point, radius: float, bounds) -> bool:
    """Rectangle is convex, so checking both end discs suffices."""
    xmin, ymin, xmax, ymax = bounds
    for x, y in (start, end):
        if x - radius < xmin - EPS or x + radius > xmax + EPS:
            return False
        if y - radius < ymin - EPS or y + radius > ymax + EPS:
            return False
    return True


def path_length(points: Sequence[Point]) -> float:
    return sum(distance(points[i], points[i + 1]) for i in range(len(points) - 1))
