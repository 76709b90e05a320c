import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from lozilab.geom import (
    AbsGraphFold,
    GeometryError,
    HorizontalAxisFold,
    Location,
    Point,
    Polyline,
    SegmentIndex,
    SimplePolygon,
    VerticalAxisFold,
    closest_point_on_segment,
    convex_hull,
    hausdorff_distance,
    on_segment,
    orientation,
    point_in_polygon,
    polygon_area,
    polygon_contains,
    polygon_strictly_contains,
    segment_intersection,
    split_at_fold,
)

coords = st.fractions(min_value=-8, max_value=8, max_denominator=6)


def brute_segment_intersection(p1, p2, p3, p4):
    """Oracle: solve the 2x2 parametric system in exact rationals."""
    d = (p2.x - p1.x) * (p4.y - p3.y) - (p2.y - p1.y) * (p4.x - p3.x)
    if d != 0:
        t = ((p3.x - p1.x) * (p4.y - p3.y) - (p3.y - p1.y) * (p4.x - p3.x)) / d
        s = ((p3.x - p1.x) * (p2.y - p1.y) - (p3.y - p1.y) * (p2.x - p1.x)) / d
        if 0 <= t <= 1 and 0 <= s <= 1:
            return Point(p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y))
        return None
    return "parallel"


def test_segment_intersection_crossing():
    hit = segment_intersection(Point(0, -1), Point(0, 1), Point(-1, 0), Point(1, 0))
    assert hit.kind == "point" and hit.proper
    assert hit.point == Point(0, 0)


def test_segment_intersection_parallel_disjoint():
    hit = segment_intersection(Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1))
    assert hit.kind == "empty"


def test_segment_intersection_collinear_overlap():
    hit = segment_intersection(Point(0, 0), Point(2, 0), Point(1, 0), Point(3, 0))
    assert hit.kind == "overlap"
    assert hit.overlap == (Point(1, 0), Point(2, 0))
    touch = segment_intersection(Point(0, 0), Point(1, 0), Point(1, 0), Point(2, 0))
    assert touch.kind == "point" and touch.point == Point(1, 0)


def test_segment_intersection_vs_brute_force():
    rng = random.Random(42)
    for _ in range(500):
        pts = [Point(F(rng.randint(-6, 6), rng.randint(1, 3)),
                     F(rng.randint(-6, 6), rng.randint(1, 3))) for _ in range(4)]
        if pts[0] == pts[1] or pts[2] == pts[3]:
            continue
        hit = segment_intersection(*pts)
        oracle = brute_segment_intersection(*pts)
        if oracle == "parallel":
            assert hit.kind in ("empty", "point", "overlap")
            assert not hit.proper
        elif oracle is None:
            assert hit.kind == "empty"
        else:
            assert hit.kind == "point"
            assert hit.point == oracle


def unit_square():
    return SimplePolygon([Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)])


def test_point_in_polygon_basics():
    tri = SimplePolygon([Point(0, 0), Point(1, 0), Point(0, 1)])
    centroid = Point(F(1, 3), F(1, 3))
    assert point_in_polygon(centroid, tri) is Location.INTERIOR
    assert point_in_polygon(Point(0, 0), tri) is Location.BOUNDARY
    assert point_in_polygon(Point(F(1, 2), F(1, 2)), tri) is Location.BOUNDARY
    assert point_in_polygon(Point(2, 2), tri) is Location.EXTERIOR


def convex_oracle(p, poly):
    """Oracle for convex polygons: orientation against every edge."""
    signs = [orientation(a, b, p) for a, b in poly.segments()]
    if any(s < 0 for s in signs):
        return Location.EXTERIOR
    if any(s == 0 for s in signs):
        # on an edge line: boundary only if within the polygon's hull
        if all(s >= 0 for s in signs):
            for a, b in poly.segments():
                if on_segment(p, a, b):
                    return Location.BOUNDARY
            return Location.INTERIOR
    return Location.INTERIOR


def test_point_in_polygon_vs_convex_oracle():
    rng = random.Random(9)
    checked = 0
    while checked < 1000:
        raw = [Point(F(rng.randint(-8, 8), rng.randint(1, 4)),
                     F(rng.randint(-8, 8), rng.randint(1, 4))) for _ in range(8)]
        hull = convex_hull(raw)
        if len(hull) < 3:
            continue
        poly = SimplePolygon(hull)
        for _ in range(10):
            p = Point(F(rng.randint(-10, 10), rng.randint(1, 4)),
                      F(rng.randint(-10, 10), rng.randint(1, 4)))
            assert point_in_polygon(p, poly) is convex_oracle(p, poly)
            checked += 1


def test_polygon_area():
    assert polygon_area(unit_square()) == 1
    tri = SimplePolygon([Point(0, 0), Point(1, 0), Point(0, 1)])
    assert polygon_area(tri) == F(1, 2)


def test_polygon_area_rotation_and_orientation():
    vs = [Point(0, 0), Point(3, 1), Point(2, 4), Point(-1, 2)]
    base = polygon_area(SimplePolygon(vs))
    for k in range(1, 4):
        rot = vs[k:] + vs[:k]
        assert polygon_area(SimplePolygon(rot)) == base
    assert polygon_area(SimplePolygon(list(reversed(vs)))) == base


def test_polygon_normalizes_ccw():
    cw = SimplePolygon([Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)])
    from lozilab.geom import _signed_area2
    assert _signed_area2(cw.vertices) > 0


def test_split_at_fold_vertical():
    line = Polyline([Point(-1, 0), Point(1, 0)])
    out = split_at_fold(line, VerticalAxisFold())
    assert [v.to_floats() for v in out.vertices] == [(-1, 0), (0, 0), (1, 0)]
    assert out.vertices[1].x == 0


def test_split_at_fold_no_crossing_identity():
    line = Polyline([Point(1, 0), Point(2, 5), Point(3, -1)])
    out = split_at_fold(line, VerticalAxisFold())
    assert out.vertices == line.vertices


def test_split_at_fold_abs_graph():
    fold = AbsGraphFold(F(1))  # y = |x| - 1
    line = Polyline([Point(-2, 0), Point(2, 0)])  # crosses both arms
    out = split_at_fold(line, fold)
    assert Point(-1, 0) in out.vertices and Point(1, 0) in out.vertices


@settings(max_examples=120)
@given(st.lists(st.tuples(coords, coords), min_size=2, max_size=6, unique=True))
def test_split_at_fold_properties(raw):
    pts = [Point(x, y) for x, y in raw]
    try:
        line = Polyline(pts)
    except GeometryError:
        return
    for fold in (VerticalAxisFold(), HorizontalAxisFold(), AbsGraphFold(F(3, 2))):
        out = split_at_fold(line, fold)
        again = split_at_fold(out, fold)
        assert again.vertices == out.vertices  # idempotent
        for a, b in out.segments():
            mid = Point((a.x + b.x) / 2, (a.y + b.y) / 2)
            sa, sb, sm = fold.side(a), fold.side(b), fold.side(mid)
            # no segment interior strictly crosses: midpoint side agrees
            assert sa * sb >= 0
            if sm != 0:
                assert sm in (sa, sb) or (sa == 0 and sb == 0)


def test_hausdorff_identical_and_translate():
    sq = unit_square()
    d0 = hausdorff_distance(sq, sq)
    assert float(d0.value) == 0.0
    moved = SimplePolygon([Point(F(1, 4), 0), Point(F(5, 4), 0),
                           Point(F(5, 4), 1), Point(F(1, 4), 1)])
    d = hausdorff_distance(sq, moved)
    assert abs(float(d.value) - 0.25) <= d.err + 1e-12


def test_hausdorff_vs_dense_sampling():
    rng = random.Random(3)
    a = SimplePolygon([Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2)])
    b = SimplePolygon([Point(F(1, 5), F(1, 10)), Point(F(9, 5), F(-1, 10)),
                       Point(2, 2), Point(F(-1, 10), F(11, 5))])
    got = hausdorff_distance(a, b)

    def sample(poly, n=4000):
        pts = []
        segs = [(p.to_floats(), q.to_floats()) for p, q in poly.segments()]
        per = max(2, n // len(segs))
        for (ax, ay), (bx, by) in segs:
            for i in range(per + 1):
                t = i / per
                pts.append((ax + t * (bx - ax), ay + t * (by - ay)))
        return pts

    pa, pb = sample(a), sample(b)
    d_ab = max(min(math.dist(p, q) for q in pb) for p in pa)
    d_ba = max(min(math.dist(p, q) for q in pa) for p in pb)
    oracle = max(d_ab, d_ba)
    assert abs(float(got.value) - oracle) < 5e-3


def test_convex_hull():
    pts = [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2), Point(1, 1)]
    hull = convex_hull(pts)
    assert len(hull) == 4
    assert Point(1, 1) not in hull


def test_containment_shared_boundary():
    outer = unit_square()
    inner = SimplePolygon([Point(0, 0), Point(1, 0), Point(F(1, 2), F(1, 2))])
    assert polygon_contains(outer, inner)
    assert not polygon_strictly_contains(outer, inner)
    strict_inner = SimplePolygon([Point(F(1, 4), F(1, 4)), Point(F(3, 4), F(1, 4)),
                                  Point(F(1, 2), F(3, 4))])
    assert polygon_strictly_contains(outer, strict_inner)
    escaping = SimplePolygon([Point(F(1, 4), F(1, 4)), Point(F(3, 2), F(1, 2)),
                              Point(F(1, 2), F(3, 4))])
    assert not polygon_contains(outer, escaping)


def test_containment_catches_excursion_between_boundary_touches():
    outer = unit_square()
    # edge leaves through the top boundary and comes back: vertices inside
    sneaky = SimplePolygon([Point(F(1, 4), F(1, 2)), Point(F(1, 2), F(3, 2)),
                            Point(F(3, 4), F(1, 2))])
    assert not polygon_contains(outer, sneaky)


def test_segment_index_matches_brute_force():
    rng = random.Random(11)
    segs = []
    for _ in range(120):
        a = Point(F(rng.randint(-40, 40), 4), F(rng.randint(-40, 40), 4))
        b = Point(a.x + F(rng.randint(-8, 8), 4), a.y + F(rng.randint(-8, 8), 4))
        if a != b:
            segs.append((a, b))
    idx = SegmentIndex(segs)
    from lozilab.geom import bbox_overlap, segment_bbox
    for _ in range(60):
        qa = Point(F(rng.randint(-40, 40), 4), F(rng.randint(-40, 40), 4))
        qb = Point(qa.x + F(rng.randint(-20, 20), 4), qa.y + F(rng.randint(-20, 20), 4))
        if qa == qb:
            continue
        bb = segment_bbox(qa, qb)
        brute = [i for i, s in enumerate(segs) if bbox_overlap(bb, segment_bbox(*s))]
        assert idx.candidates(bb) == brute


def test_closest_point_on_segment():
    q, d2 = closest_point_on_segment(Point(0, 1), Point(-1, 0), Point(1, 0))
    assert q == Point(0, 0) and d2 == 1
    q, d2 = closest_point_on_segment(Point(5, 1), Point(-1, 0), Point(1, 0))
    assert q == Point(1, 0) and d2 == 17
