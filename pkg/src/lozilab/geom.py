"""Exact planar primitives: points, segments, polylines, simple polygons.

Predicates are exact for rational/quadratic coordinates; a float-interval
filter decides the easy cases before any big-integer work.  No epsilon
appears anywhere in the decision paths.
"""

from __future__ import annotations

import functools
import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .numeric import (
    FloatScalar,
    Scalar,
    UncertainSignError,
    _iv_add,
    _iv_mul,
    float_interval,
    scalar_cmp,
    scalar_sign,
    scalar_to_float,
)


class GeometryError(ValueError):
    pass


class Location(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def _as_scalar(v) -> Scalar:
    return Fraction(v) if isinstance(v, int) else v


class Point:
    __slots__ = ("x", "y", "_ivx", "_ivy")

    def __init__(self, x, y):
        self.x = _as_scalar(x)
        self.y = _as_scalar(y)
        self._ivx = float_interval(self.x)
        self._ivy = float_interval(self.y)

    def __repr__(self) -> str:
        return f"Point({self.x!r}, {self.y!r})"

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def to_floats(self) -> tuple[float, float]:
        return (0.5 * (self._ivx[0] + self._ivx[1]), 0.5 * (self._ivy[0] + self._ivy[1]))


def orientation(o: Point, a: Point, b: Point) -> int:
    """Sign of the cross product (a-o) x (b-o); exact after the float filter."""
    axl = _iv_add(a._ivx, (-o._ivx[1], -o._ivx[0]))
    ayl = _iv_add(a._ivy, (-o._ivy[1], -o._ivy[0]))
    bxl = _iv_add(b._ivx, (-o._ivx[1], -o._ivx[0]))
    byl = _iv_add(b._ivy, (-o._ivy[1], -o._ivy[0]))
    lo, hi = _iv_add(_iv_mul(axl, byl), _iv_mul((-ayl[1], -ayl[0]), bxl))
    if lo > 0.0:
        return 1
    if hi < 0.0:
        return -1
    cross = (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    return scalar_sign(cross, strict=True)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """Is p on the closed segment ab (endpoints included)?"""
    if orientation(a, b, p) != 0:
        return False
    if scalar_cmp(a.x, b.x) != 0:
        lo, hi = (a.x, b.x) if scalar_cmp(a.x, b.x) < 0 else (b.x, a.x)
        return scalar_cmp(p.x, lo) >= 0 and scalar_cmp(p.x, hi) <= 0
    lo, hi = (a.y, b.y) if scalar_cmp(a.y, b.y) < 0 else (b.y, a.y)
    return scalar_cmp(p.y, lo) >= 0 and scalar_cmp(p.y, hi) <= 0


class SegmentHit:
    """Outcome of an exact segment intersection: empty, one point, or overlap."""

    __slots__ = ("kind", "point", "overlap", "proper")

    def __init__(self, kind: str, point: Optional[Point] = None,
                 overlap: Optional[tuple[Point, Point]] = None, proper: bool = False):
        self.kind = kind          # "empty" | "point" | "overlap"
        self.point = point
        self.overlap = overlap
        self.proper = proper      # interior-interior transversal crossing

    def __repr__(self):
        return f"SegmentHit({self.kind}, {self.point}, {self.overlap}, proper={self.proper})"

    def __bool__(self):
        return self.kind != "empty"


def _line_point(p1: Point, p2: Point, t: Scalar) -> Point:
    return Point(p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y))


def _axis_key(a: Point, b: Point):
    # coordinate that strictly orders points along the line through a, b
    if scalar_cmp(a.x, b.x) != 0:
        return lambda p: p.x
    return lambda p: p.y


def segment_intersection(p1: Point, p2: Point, p3: Point, p4: Point) -> SegmentHit:
    if p1 == p2 or p3 == p4:
        raise GeometryError("degenerate segment")
    if not bbox_overlap(segment_bbox(p1, p2), segment_bbox(p3, p4)):
        return SegmentHit("empty")
    d1 = orientation(p3, p4, p1)
    d2 = orientation(p3, p4, p2)
    d3 = orientation(p1, p2, p3)
    d4 = orientation(p1, p2, p4)
    if d1 != d2 and d3 != d4 and 0 not in (d1, d2, d3, d4):
        denom = (p2.x - p1.x) * (p4.y - p3.y) - (p2.y - p1.y) * (p4.x - p3.x)
        t = ((p3.x - p1.x) * (p4.y - p3.y) - (p3.y - p1.y) * (p4.x - p3.x)) / denom
        return SegmentHit("point", point=_line_point(p1, p2, t), proper=True)
    if d1 == 0 and d2 == 0:
        # collinear: order all four points along the common line
        key = _axis_key(p1, p2)
        s1, e1 = (p1, p2) if scalar_cmp(key(p1), key(p2)) <= 0 else (p2, p1)
        s2, e2 = (p3, p4) if scalar_cmp(key(p3), key(p4)) <= 0 else (p4, p3)
        lo = s1 if scalar_cmp(key(s1), key(s2)) >= 0 else s2
        hi = e1 if scalar_cmp(key(e1), key(e2)) <= 0 else e2
        c = scalar_cmp(key(lo), key(hi))
        if c > 0:
            return SegmentHit("empty")
        if c == 0:
            return SegmentHit("point", point=lo)
        return SegmentHit("overlap", overlap=(lo, hi))
    # touching cases: an endpoint lies on the other segment
    for p, (a, b) in ((p1, (p3, p4)), (p2, (p3, p4)), (p3, (p1, p2)), (p4, (p1, p2))):
        if on_segment(p, a, b):
            return SegmentHit("point", point=p)
    return SegmentHit("empty")


class Polyline:
    """Ordered vertex chain; consecutive duplicates are removed on build."""

    __slots__ = ("vertices", "_bbox")

    def __init__(self, vertices: Sequence[Point]):
        vs: list[Point] = []
        for v in vertices:
            if not vs or v != vs[-1]:
                vs.append(v)
        if len(vs) < 2:
            raise GeometryError("polyline needs at least two distinct vertices")
        self.vertices = tuple(vs)
        self._bbox = None

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polyline(<{len(self.vertices)} vertices>)"

    def segments(self) -> Iterator[tuple[Point, Point]]:
        vs = self.vertices
        for i in range(len(vs) - 1):
            yield vs[i], vs[i + 1]

    def reversed(self) -> "Polyline":
        return Polyline(tuple(reversed(self.vertices)))

    def bbox(self) -> tuple[float, float, float, float]:
        if self._bbox is None:
            xs_lo = min(v._ivx[0] for v in self.vertices)
            xs_hi = max(v._ivx[1] for v in self.vertices)
            ys_lo = min(v._ivy[0] for v in self.vertices)
            ys_hi = max(v._ivy[1] for v in self.vertices)
            self._bbox = (xs_lo, xs_hi, ys_lo, ys_hi)
        return self._bbox

    def length_float(self) -> float:
        total = 0.0
        for a, b in self.segments():
            ax, ay = a.to_floats()
            bx, by = b.to_floats()
            total += math.hypot(bx - ax, by - ay)
        return total


class SimplePolygon:
    """Simple closed polygon, vertices normalized to counterclockwise order.

    Simplicity is not re-proved on every construction (it is quadratic);
    callers at the few spots where the contracts demand it run
    verify_simple() and treat failure as fatal.
    """

    __slots__ = ("vertices", "_bbox", "_area")

    def __init__(self, vertices: Sequence[Point]):
        vs: list[Point] = []
        for v in vertices:
            if not vs or v != vs[-1]:
                vs.append(v)
        if len(vs) >= 2 and vs[0] == vs[-1]:
            vs.pop()
        if len(vs) < 3:
            raise GeometryError("polygon needs at least three distinct vertices")
        area2 = _signed_area2(vs)
        s = scalar_sign(area2, strict=True)
        if s == 0:
            raise GeometryError("polygon has zero area")
        if s < 0:
            vs.reverse()
            area2 = -area2
        self.vertices = tuple(vs)
        self._bbox = None
        self._area = area2 / 2

    def __repr__(self):
        return f"SimplePolygon(<{len(self.vertices)} vertices>)"

    def segments(self) -> Iterator[tuple[Point, Point]]:
        vs = self.vertices
        n = len(vs)
        for i in range(n):
            yield vs[i], vs[(i + 1) % n]

    def area(self) -> Scalar:
        return self._area

    def bbox(self) -> tuple[float, float, float, float]:
        if self._bbox is None:
            xs_lo = min(v._ivx[0] for v in self.vertices)
            xs_hi = max(v._ivx[1] for v in self.vertices)
            ys_lo = min(v._ivy[0] for v in self.vertices)
            ys_hi = max(v._ivy[1] for v in self.vertices)
            self._bbox = (xs_lo, xs_hi, ys_lo, ys_hi)
        return self._bbox

    def boundary(self) -> Polyline:
        return Polyline(self.vertices + (self.vertices[0],))

    def verify_simple(self) -> None:
        """Exact O(n^2) simplicity check (bbox-pruned); raises on failure."""
        segs = list(self.segments())
        n = len(segs)
        idx = SegmentIndex(segs)
        for i in range(n):
            for j in idx.candidates_for(segs[i]):
                if j <= i:
                    continue
                adjacent = (j == i + 1) or (i == 0 and j == n - 1)
                hit = segment_intersection(*segs[i], *segs[j])
                if not hit:
                    continue
                if hit.kind == "overlap":
                    raise GeometryError(f"boundary edges {i} and {j} overlap")
                if adjacent:
                    shared = segs[i][1] if j == i + 1 else segs[i][0]
                    if hit.point != shared:
                        raise GeometryError(f"adjacent edges {i},{j} cross")
                else:
                    raise GeometryError(f"boundary edges {i} and {j} intersect")


def _signed_area2(vs: Sequence[Point]) -> Scalar:
    total: Scalar = Fraction(0)
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        total = total + (a.x * b.y - b.x * a.y)
    return total


def polygon_area(poly: SimplePolygon) -> Scalar:
    return poly.area()


def point_in_polygon(p: Point, poly: SimplePolygon) -> Location:
    """Exact three-way point location by crossing parity."""
    xlo, xhi, ylo, yhi = poly.bbox()
    if p._ivx[1] < xlo or p._ivx[0] > xhi or p._ivy[1] < ylo or p._ivy[0] > yhi:
        return Location.EXTERIOR
    for a, b in poly.segments():
        if on_segment(p, a, b):
            return Location.BOUNDARY
    parity = 0
    for a, b in poly.segments():
        ca = scalar_cmp(a.y, p.y)
        cb = scalar_cmp(b.y, p.y)
        if ca <= 0 < cb:      # upward edge, half-open rule
            if orientation(a, b, p) > 0:
                parity ^= 1
        elif cb <= 0 < ca:    # downward edge
            if orientation(a, b, p) < 0:
                parity ^= 1
    return Location.INTERIOR if parity else Location.EXTERIOR


# --- fold loci -------------------------------------------------------------

class Fold:
    """Linearity-break locus used when mapping polylines exactly."""

    def side(self, p: Point) -> int:
        raise NotImplementedError

    def segment_crossings(self, a: Point, b: Point) -> list[Point]:
        """Points strictly inside segment ab where the locus is crossed."""
        raise NotImplementedError


class VerticalAxisFold(Fold):
    """x = 0, the fold of the forward map."""

    def side(self, p: Point) -> int:
        return scalar_sign(p.x, strict=True)

    def segment_crossings(self, a: Point, b: Point) -> list[Point]:
        sa, sb = self.side(a), self.side(b)
        if sa * sb >= 0:
            return []
        t = a.x / (a.x - b.x)
        return [Point(Fraction(0), a.y + t * (b.y - a.y))]


class HorizontalAxisFold(Fold):
    """y = 0, the fold of the inverse map."""

    def side(self, p: Point) -> int:
        return scalar_sign(p.y, strict=True)

    def segment_crossings(self, a: Point, b: Point) -> list[Point]:
        sa, sb = self.side(a), self.side(b)
        if sa * sb >= 0:
            return []
        t = a.y / (a.y - b.y)
        return [Point(a.x + t * (b.x - a.x), Fraction(0))]


class AbsGraphFold(Fold):
    """y = a|x| - 1, the preimage of the vertical axis under the forward map."""

    def __init__(self, a: Scalar):
        self.a = a

    def _g(self, p: Point) -> Scalar:
        ax = p.x if scalar_sign(p.x, strict=True) >= 0 else -p.x
        return p.y - self.a * ax + 1

    def side(self, p: Point) -> int:
        return scalar_sign(self._g(p), strict=True)

    def segment_crossings(self, a: Point, b: Point) -> list[Point]:
        # split at the kink x=0 first; g is linear on each side
        pieces = [a]
        pieces += VerticalAxisFold().segment_crossings(a, b)
        pieces.append(b)
        out: list[Point] = []
        for i in range(len(pieces) - 1):
            u, v = pieces[i], pieces[i + 1]
            gu, gv = self._g(u), self._g(v)
            su, sv = scalar_sign(gu, strict=True), scalar_sign(gv, strict=True)
            if i > 0 and su == 0:
                out.append(u)  # kink vertex landing exactly on the locus
            if su * sv < 0:
                t = gu / (gu - gv)
                out.append(_line_point(u, v, t))
        return out


def split_at_fold(line: Polyline, fold: Fold) -> Polyline:
    """Insert exact crossing vertices so no segment interior crosses the fold."""
    out: list[Point] = [line.vertices[0]]
    for a, b in line.segments():
        out.extend(fold.segment_crossings(a, b))
        out.append(b)
    return Polyline(out)


# --- convex hulls ----------------------------------------------------------

def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Strict convex hull (no collinear vertices kept), counterclockwise."""
    def lexless(p, q):
        c = scalar_cmp(p.x, q.x)
        return c < 0 or (c == 0 and scalar_cmp(p.y, q.y) < 0)

    uniq: list[Point] = []
    for p in points:
        if all(p != q for q in uniq):
            uniq.append(p)
    pts = uniq[:]
    pts.sort(key=functools.cmp_to_key(
        lambda p, q: -1 if lexless(p, q) else (1 if lexless(q, p) else 0)))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and orientation(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orientation(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# --- spatial index ---------------------------------------------------------

def segment_bbox(a: Point, b: Point) -> tuple[float, float, float, float]:
    return (min(a._ivx[0], b._ivx[0]), max(a._ivx[1], b._ivx[1]),
            min(a._ivy[0], b._ivy[0]), max(a._ivy[1], b._ivy[1]))


def bbox_overlap(b1, b2) -> bool:
    return not (b1[1] < b2[0] or b2[1] < b1[0] or b1[3] < b2[2] or b2[3] < b1[2])


class SegmentIndex:
    """Uniform-grid index over float bounding boxes, for candidate pruning."""

    def __init__(self, segments: Sequence[tuple[Point, Point]]):
        self.segments = segments
        self.bboxes = [segment_bbox(a, b) for a, b in segments]
        self.big: list[int] = []  # segments spanning too many cells to grid
        self.grid: dict[tuple[int, int], list[int]] = {}
        if not segments:
            self.cell = 1.0
            return
        xlo = min(b[0] for b in self.bboxes)
        xhi = max(b[1] for b in self.bboxes)
        ylo = min(b[2] for b in self.bboxes)
        yhi = max(b[3] for b in self.bboxes)
        span = max(xhi - xlo, yhi - ylo, 1e-300)
        self.cell = span / max(1.0, math.sqrt(len(segments)))
        for i, bb in enumerate(self.bboxes):
            keys = self._cells(bb)
            if keys is None:
                self.big.append(i)
            else:
                for key in keys:
                    self.grid.setdefault(key, []).append(i)

    def _cells(self, bb):
        c = self.cell
        i0, i1 = math.floor(bb[0] / c), math.floor(bb[1] / c)
        j0, j1 = math.floor(bb[2] / c), math.floor(bb[3] / c)
        if (i1 - i0 + 1) * (j1 - j0 + 1) > 4096:
            return None
        return [(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1)]

    def candidates(self, bb) -> list[int]:
        seen: set[int] = set()
        keys = self._cells(bb)
        if keys is None:
            # query box too large to enumerate cells: scan everything
            return [i for i, sbb in enumerate(self.bboxes) if bbox_overlap(bb, sbb)]
        for key in keys:
            for i in self.grid.get(key, ()):
                if i not in seen and bbox_overlap(bb, self.bboxes[i]):
                    seen.add(i)
        for i in self.big:
            if i not in seen and bbox_overlap(bb, self.bboxes[i]):
                seen.add(i)
        return sorted(seen)

    def candidates_for(self, seg: tuple[Point, Point]) -> list[int]:
        return self.candidates(segment_bbox(*seg))


# --- containment -----------------------------------------------------------

def _edge_cut_points(a: Point, b: Point, outer: SimplePolygon,
                     index: SegmentIndex) -> list[Point]:
    cuts: list[Point] = []
    for j in index.candidates_for((a, b)):
        hit = segment_intersection(a, b, *index.segments[j])
        if hit.kind == "point":
            cuts.append(hit.point)
        elif hit.kind == "overlap":
            cuts.extend(hit.overlap)
    # order cuts along ab by parameter, exactly
    keyfn = _axis_key(a, b)
    cuts.sort(key=functools.cmp_to_key(lambda p, q: scalar_cmp(keyfn(p), keyfn(q))))
    if scalar_cmp(keyfn(a), keyfn(b)) > 0:
        cuts.reverse()
    out = [a]
    for p in cuts:
        if p != out[-1]:
            out.append(p)
    if b != out[-1]:
        out.append(b)
    return out


def polyline_within_polygon(line: Polyline, outer: SimplePolygon,
                            index: Optional[SegmentIndex] = None) -> bool:
    """Exact test that every point of the polyline lies in Cl(outer).

    Each edge is cut at all boundary intersections; the midpoints of the
    resulting pieces decide whether any portion escapes.
    """
    if index is None:
        index = SegmentIndex(list(outer.segments()))
    for v in line.vertices:
        if point_in_polygon(v, outer) is Location.EXTERIOR:
            return False
    for a, b in line.segments():
        chain = _edge_cut_points(a, b, outer, index)
        for i in range(len(chain) - 1):
            mid = Point((chain[i].x + chain[i + 1].x) / 2,
                        (chain[i].y + chain[i + 1].y) / 2)
            if point_in_polygon(mid, outer) is Location.EXTERIOR:
                return False
    return True


def polygon_contains(outer: SimplePolygon, inner: SimplePolygon,
                     index: Optional[SegmentIndex] = None) -> bool:
    """inner subset of Cl(outer), boundary contact allowed."""
    return polyline_within_polygon(inner.boundary(), outer, index=index)


def polygon_strictly_contains(outer: SimplePolygon, inner: SimplePolygon,
                              index: Optional[SegmentIndex] = None) -> bool:
    """inner subset of Int(outer): no vertex or edge touches the boundary."""
    if index is None:
        index = SegmentIndex(list(outer.segments()))
    for v in inner.vertices:
        if point_in_polygon(v, outer) is not Location.INTERIOR:
            return False
    for a, b in inner.segments():
        for j in index.candidates_for((a, b)):
            if segment_intersection(a, b, *index.segments[j]):
                return False
    return True


# --- float distances and Hausdorff ----------------------------------------

def _dist_point_segment_float(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    if vv <= 0.0:
        return math.hypot(wx, wy)
    t = (wx * vx + wy * vy) / vv
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(wx - t * vx, wy - t * vy)


def _dist_point_polyline_float(px, py, segs) -> float:
    return min(_dist_point_segment_float(px, py, *s) for s in segs)


def _float_segments(obj) -> list[tuple[float, float, float, float]]:
    out = []
    for a, b in obj.segments():
        ax, ay = a.to_floats()
        bx, by = b.to_floats()
        out.append((ax, ay, bx, by))
    return out


def hausdorff_distance(a_obj, b_obj, precision_bits: int = 53,
                       max_samples: int = 20000) -> FloatScalar:
    """Symmetric Hausdorff distance between polyline/polygon boundaries.

    Sampled densely along each segment; the distance-to-set function is
    1-Lipschitz in arc length, so half the sampling step bounds how far the
    reported value can sit below the true one.  That bound is returned as
    the error field.
    """
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    segs_a = _float_segments(a_obj)
    segs_b = _float_segments(b_obj)

    def directed(src, dst) -> tuple[float, float]:
        total_len = sum(math.hypot(bx - ax, by - ay) for ax, ay, bx, by in src)
        budget = max(len(src) * 2, max_samples)
        step = total_len / budget if total_len > 0 else 1.0
        best = 0.0
        worst_gap = 0.0
        for (ax, ay, bx, by) in src:
            seg_len = math.hypot(bx - ax, by - ay)
            n = max(1, min(4096, int(seg_len / step) if step > 0 else 1))
            worst_gap = max(worst_gap, seg_len / n)
            for i in range(n + 1):
                t = i / n
                d = _dist_point_polyline_float(ax + t * (bx - ax), ay + t * (by - ay), dst)
                if d > best:
                    best = d
        return best, worst_gap / 2

    d_ab, e1 = directed(segs_a, segs_b)
    d_ba, e2 = directed(segs_b, segs_a)
    value = max(d_ab, d_ba)
    err = max(e1, e2) + math.ulp(value) * 8
    return FloatScalar(value, err)


def polygon_diameter_float(poly: SimplePolygon) -> float:
    pts = [v.to_floats() for v in poly.vertices]
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]))
    return best


# --- exact closest point ---------------------------------------------------

def closest_point_on_segment(p: Point, a: Point, b: Point) -> tuple[Point, Scalar]:
    """Exact nearest point of segment ab to p, with squared distance."""
    vx, vy = b.x - a.x, b.y - a.y
    wx, wy = p.x - a.x, p.y - a.y
    vv = vx * vx + vy * vy
    t = (wx * vx + wy * vy) / vv
    if scalar_sign(t, strict=True) <= 0:
        q = a
    elif scalar_cmp(t, Fraction(1)) >= 0:
        q = b
    else:
        q = _line_point(a, b, t)
    dx, dy = p.x - q.x, p.y - q.y
    return q, dx * dx + dy * dy
