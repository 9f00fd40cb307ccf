import math

import pytest
from hypothesis import given, strategies as st

from pebblegraph.geometry import (
    Disc,
    Point,
    Polygon,
    capsule_in_bounds,
    disc_disc_overlap,
    point_segment_distance,
    segment_segment_distance,
    segments_intersect,
    swept_disc_hits_disc,
    swept_disc_hits_polygon,
)

coord = st.floats(-10, 10, allow_nan=False)
radius = st.floats(0.01, 5, allow_nan=False)
points = st.builds(Point, coord, coord)


def square(x0, y0, x1, y1):
    return Polygon((Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)))


def test_touching_discs_do_not_overlap():
    assert not disc_disc_overlap(Disc(Point(0, 0), 4.0), Disc(Point(8.0, 0), 4.0))


def test_interior_overlap():
    assert disc_disc_overlap(Disc(Point(0, 0), 4.0), Disc(Point(7.9, 0), 4.0))


def test_identical_discs_overlap():
    d = Disc(Point(1, 2), 0.5)
    assert disc_disc_overlap(d, d)


def test_disc_radius_must_be_positive():
    with pytest.raises(ValueError):
        Disc(Point(0, 0), 0.0)


def test_coincident_sweep_hits():
    assert swept_disc_hits_disc(Point(3, 3), Point(3, 3), 1.0, Disc(Point(3, 3), 1.0))


def test_sweep_separated_by_margin():
    target = Disc(Point(5, 3.0), 1.0)
    # segment at distance 3 = 1 + 1 + 1
    assert not swept_disc_hits_disc(Point(0, 0), Point(10, 0), 1.0, target)


def test_sweep_grazes_within_sum_of_radii():
    assert swept_disc_hits_disc(Point(0, 0), Point(10, 0), 1.0, Disc(Point(5, 1.5), 1.0))
    assert point_segment_distance(Point(5, 1.5), Point(0, 0), Point(10, 0)) == pytest.approx(1.5)


def test_segment_inside_polygon_hits():
    box = square(0, 0, 4, 4)
    assert swept_disc_hits_polygon(Point(1, 1), Point(3, 2), 0.1, box)


def test_segment_far_from_polygon_misses():
    box = square(0, 0, 4, 4)
    assert not swept_disc_hits_polygon(Point(6, 0), Point(6, 4), 1.0, box)


def test_grazing_polygon_counts_as_hit():
    box = square(0, 0, 4, 4)
    # segment runs parallel to the right edge at exactly the radius
    assert swept_disc_hits_polygon(Point(5, -1), Point(5, 5), 1.0, box)
    assert not swept_disc_hits_polygon(Point(5.001, -1), Point(5.001, 5), 1.0, box)


def test_polygon_normalized_ccw():
    cw = Polygon((Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)))
    xs = cw.vertices
    area = sum(a.x * b.y - b.x * a.y for a, b in zip(xs, xs[1:] + xs[:1]))
    assert area > 0


def test_polygon_rejects_self_intersection():
    with pytest.raises(ValueError):
        Polygon((Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1)))


def test_polygon_needs_three_vertices():
    with pytest.raises(ValueError):
        Polygon((Point(0, 0), Point(1, 1)))


def test_segments_intersect_cross_and_parallel():
    assert segments_intersect(Point(0, 0), Point(2, 2), Point(0, 2), Point(2, 0))
    assert not segments_intersect(Point(0, 0), Point(2, 0), Point(0, 1), Point(2, 1))
    assert segment_segment_distance(Point(0, 0), Point(2, 0), Point(0, 1), Point(2, 1)) == pytest.approx(1)


def test_capsule_in_bounds():
    b = (0.0, 0.0, 1.0, 1.0)
    assert capsule_in_bounds(Point(0.1, 0.1), Point(0.9, 0.9), 0.1, b)
    assert not capsule_in_bounds(Point(0.05, 0.5), Point(0.5, 0.5), 0.1, b)


@given(points, radius, points, radius)
def test_overlap_symmetric(c1, r1, c2, r2):
    a, b = Disc(c1, r1), Disc(c2, r2)
    assert disc_disc_overlap(a, b) == disc_disc_overlap(b, a)


@given(points, points, radius, points, radius, st.floats(0.01, 1.0))
def test_sweep_monotone_in_radius(s, e, r, c, R, shrink):
    target = Disc(c, R)
    if not swept_disc_hits_disc(s, e, r, target):
        assert not swept_disc_hits_disc(s, e, r * shrink, target)


@given(points, radius, points, radius)
def test_degenerate_sweep_is_static_overlap(c, r, c2, r2):
    assert swept_disc_hits_disc(c, c, r, Disc(c2, r2)) == disc_disc_overlap(Disc(c, r), Disc(c2, r2))


@given(points, points, points)
def test_point_segment_distance_bounds(p, a, b):
    d = point_segment_distance(p, a, b)
    assert d <= min(math.dist(p, a), math.dist(p, b)) + 1e-9
    assert d >= 0
