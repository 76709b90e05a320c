"""Trapping polygon machinery and the nested approximation of the
accumulation set.

The chord construction closes a polygon against a bounded piece of the
unstable manifold.  Its double-step images form a nested sequence whose area
shrinks by the Jacobian factor each time; the intersection of the sequence is
the right half of the accumulation set, with the single image giving the
left half.  Everything here is exact in rational mode: case selection, chord
anchors, polygon boundaries, containment, and the area bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceededError, InconsistencyError
from .geom import (
    AbsGraphFold,
    Location,
    Point,
    Polyline,
    SegmentIndex,
    SimplePolygon,
    closest_point_on_segment,
    hausdorff_distance,
    on_segment,
    point_in_polygon,
    polygon_contains,
    polygon_diameter_float,
    polygon_strictly_contains,
    segment_intersection,
    split_at_fold,
)
from .lozimap import Params, apply
from .manifold import Branch, UnstableManifold, _axis_events, image_of_polyline
from .numeric import FloatScalar, Scalar, scalar_cmp, scalar_sign


class TrapCase(Enum):
    RIGHT_BRANCH_RECROSSES = "right-branch-recrosses"   # extra crossings on Ox
    FIRST_CROSSING_ONLY = "first-crossing-only"         # left branch supplies S


@dataclass
class TrapConstruction:
    """Anchors and polygons of the trapping construction.

    axis_point (S) sits on the horizontal axis; chord_point (T) closes the
    polygon whose boundary is the manifold piece from the first axis crossing
    to T plus the straight chord back.
    """

    case: TrapCase
    axis_point: Point
    chord_point: Point
    manifold: UnstableManifold
    arc_to_chord: Polyline                     # manifold piece [Z, T]
    cross_arc: Optional[int] = None            # case 1: index i
    clear_arc: Optional[int] = None            # case 1: offset k
    chord_point_pre: Optional[Point] = None    # case 2: T^{-1}
    first_three: Optional[tuple] = None        # case 2: B1, B2, B3
    trap: Optional[SimplePolygon] = None
    collar: Optional[SimplePolygon] = None

    def to_json(self) -> dict:
        from .numeric import scalar_to_json

        def pt(p):
            return {"x": scalar_to_json(p.x), "y": scalar_to_json(p.y)}

        out = {
            "case": self.case.value,
            "axis_point": pt(self.axis_point),
            "chord_point": pt(self.chord_point),
            "cross_arc": self.cross_arc,
            "clear_arc": self.clear_arc,
        }
        if self.chord_point_pre is not None:
            out["chord_point_pre"] = pt(self.chord_point_pre)
        if self.first_three is not None:
            out["first_three"] = [pt(p) for p in self.first_three]
        if self.trap is not None:
            out["trap_vertices"] = len(self.trap.vertices)
            out["trap_area"] = scalar_to_json(self.trap.area())
        if self.collar is not None:
            out["collar_vertices"] = len(self.collar.vertices)
            out["collar_area"] = scalar_to_json(self.collar.area())
        return out


def _arc_meets_horizontal_axis(arc: Polyline, skip_first_vertex: bool) -> list[Point]:
    events = _axis_events(arc, Branch.U_PLUS, "x")
    pts = [e.point for e in events]
    if skip_first_vertex and pts and pts[0] == arc.vertices[0]:
        pts = pts[1:]
    return pts


def _arc_meets_graph(arc: Polyline, a: Scalar) -> bool:
    fold = AbsGraphFold(a)
    split = split_at_fold(arc, fold)
    return any(fold.side(v) == 0 for v in split.vertices)


def _chain_slice(chain: Polyline, start: Point, end: Point) -> Polyline:
    """Exact sub-polyline of a chain between two of its points, in chain order."""
    verts = chain.vertices
    out: list[Point] = []
    collecting = False
    for i, (s, e) in enumerate(chain.segments()):
        if not collecting:
            if on_segment(start, s, e):
                # end may live on the same segment, closer to e
                if on_segment(end, s, e) and on_segment(end, start, e) and start != end:
                    return Polyline([start, end])
                out = [start]
                if e != start:
                    out.append(e)
                collecting = True
            continue
        if on_segment(end, s, e):
            if end != out[-1]:
                out.append(end)
            return Polyline(out)
        out.append(e)
    raise ValueError("slice endpoints not found along the chain")


def construct_trap(params: Params, depth: int,
                   manifold: Optional[UnstableManifold] = None) -> TrapConstruction:
    """Locate the chord anchors S and T on the computed unstable manifold.

    Case selection follows the crossing pattern: if the right branch meets
    the horizontal axis beyond its first crossing, the chord endpoint is the
    rightmost axis intersection of the first arc whose predecessors have all
    crossed the preimage curve y = a|x| - 1 but which itself stays clear of
    it.  Otherwise the anchors come from the first three axis crossings of
    the left branch and the point closest to the backward crossing.

    Requires the recurrent-crossings regime; raises BudgetExceededError when
    the computed depth cannot exhibit the required pattern.
    """
    if manifold is None:
        manifold = UnstableManifold(params, depth)
    else:
        manifold.extend_to(depth)
    z = params.first_crossing()

    first_cross_arc = None
    for n in range(1, depth + 1):
        if _arc_meets_horizontal_axis(manifold.arcs_plus[n], skip_first_vertex=False):
            first_cross_arc = n
            break

    if first_cross_arc is not None:
        i = first_cross_arc - 1
        if not _arc_meets_graph(manifold.arcs_plus[i], params.a):
            raise InconsistencyError(
                "axis crossing without a preimage-curve crossing one arc earlier")
        k = None
        for kk in range(1, depth - i):
            if not _arc_meets_graph(manifold.arcs_plus[i + kk], params.a):
                k = kk
                break
        if k is None:
            raise BudgetExceededError(
                f"no clear arc found up to depth {depth}; raise the depth budget")
        manifold.extend_to(max(depth, i + k + 1))
        hits = _arc_meets_horizontal_axis(manifold.arcs_plus[i + k], skip_first_vertex=False)
        if not hits:
            raise InconsistencyError("clear arc lost its axis intersection")
        s_point = hits[0]
        for p in hits[1:]:
            if scalar_cmp(p.x, s_point.x) > 0:
                s_point = p
        chain = manifold.branch_polyline(Branch.U_PLUS)
        arc_to_chord = _chain_slice(chain, z, s_point)
        return TrapConstruction(
            case=TrapCase.RIGHT_BRANCH_RECROSSES, axis_point=s_point,
            chord_point=s_point, manifold=manifold, arc_to_chord=arc_to_chord,
            cross_arc=i, clear_arc=k)

    # case 2: the right branch only meets the axis at its first crossing
    minus_chain = manifold.branch_polyline(Branch.U_MINUS)
    events = [e for e in _axis_events(minus_chain, Branch.U_MINUS, "x")]
    if len(events) < 3:
        raise BudgetExceededError(
            f"left branch shows {len(events)} axis intersections at depth {depth}; "
            "need three (or the crossings are not recurrent)")
    b1, b2, b3 = (events[0].point, events[1].point, events[2].point)
    s_point = b2
    z_m1 = Point(params.zero(), z.x - 1)
    between = _chain_slice(minus_chain, b2, b3)
    best: Optional[tuple] = None  # (dist2, seg index, point)
    for idx, (sa, sb) in enumerate(between.segments()):
        q, d2 = closest_point_on_segment(z_m1, sa, sb)
        if best is None or scalar_cmp(d2, best[0]) < 0:
            best = (d2, idx, q)
        elif scalar_cmp(d2, best[0]) == 0:
            # tie: keep the point furthest along the arc
            best = (d2, idx, q)
    t_pre = best[2]
    t_point = apply(params, t_pre, 1)
    arc_pre = _chain_slice(minus_chain, z_m1, t_pre)
    arc_to_chord = image_of_polyline(params, arc_pre, 1)
    return TrapConstruction(
        case=TrapCase.FIRST_CROSSING_ONLY, axis_point=s_point,
        chord_point=t_point, manifold=manifold, arc_to_chord=arc_to_chord,
        chord_point_pre=t_pre, first_three=(b1, b2, b3))


def verify_chords(tc: TrapConstruction, upto: Optional[int] = None) -> None:
    """Exact check that the closing chords meet the computed manifold only at
    their endpoints; failure contradicts the construction lemma."""
    segs = tc.manifold.chain_segments(upto)
    z = tc.manifold.params.first_crossing()
    chords = [("chord", z, tc.chord_point)]
    if tc.axis_point != tc.chord_point:
        chords.append(("anchor-chord", tc.axis_point, tc.chord_point))
    if tc.axis_point != z:
        chords.append(("axis-chord", tc.axis_point, z))
    for name, a, b in chords:
        if a == b:
            continue
        allowed = {a, b}
        for _, _, s, e in segs:
            hit = segment_intersection(a, b, s, e)
            if not hit:
                continue
            if hit.kind == "overlap":
                raise InconsistencyError(f"{name} overlaps the manifold")
            if hit.point not in allowed:
                raise InconsistencyError(
                    f"{name} meets the manifold away from its endpoints at {hit.point!r}")


def trap_polygon(tc: TrapConstruction, verify: bool = True) -> SimplePolygon:
    """The polygon bounded by the manifold piece [Z, T] and the chord TZ."""
    poly = SimplePolygon(tc.arc_to_chord.vertices)
    if verify:
        poly.verify_simple()
        _verify_forward_branch_inside(tc, poly)
    tc.trap = poly
    return poly


def _verify_forward_branch_inside(tc: TrapConstruction, poly: SimplePolygon) -> None:
    """The right branch beyond T must stay inside the closed polygon."""
    manifold = tc.manifold
    chain = manifold.branch_polyline(Branch.U_PLUS)
    try:
        tail = _chain_slice(chain, tc.chord_point, chain.vertices[-1])
    except ValueError:
        return  # chord point is the chain end: nothing beyond
    from .geom import polyline_within_polygon
    if not polyline_within_polygon(tail, poly):
        raise InconsistencyError(
            "forward branch escapes the trapping polygon: construction defect")


def image_polygon(params: Params, poly: SimplePolygon, steps: int) -> SimplePolygon:
    """Exact image of a simple polygon under the given number of map steps."""
    closed = Polyline(poly.vertices + (poly.vertices[0],))
    img = image_of_polyline(params, closed, steps)
    return SimplePolygon(img.vertices[:-1])


def collar_polygon(tc: TrapConstruction, params: Params, verify: bool = True) -> SimplePolygon:
    """The fundamental collar between the trap polygon and its double-step
    image: chord, first arc, image chord, and the arc from T to its image."""
    z = params.first_crossing()
    t = tc.chord_point
    t2 = apply(params, t, 2)
    manifold = tc.manifold
    arc0 = manifold.arcs_plus[0]                       # [Z, Z^2]
    chord = Polyline([t, z])
    img_chord = image_of_polyline(params, chord, 2)    # T^2 .. Z^2
    chain = manifold.branch_polyline(Branch.U_PLUS)
    arc_t_t2 = _chain_slice(chain, t, t2)              # [T, T^2]
    vertices: list[Point] = list(chord.vertices)
    vertices.extend(arc0.vertices[1:])                 # Z -> Z^2
    rev_img = list(reversed(img_chord.vertices))       # Z^2 -> T^2
    vertices.extend(rev_img[1:])
    rev_arc = list(reversed(arc_t_t2.vertices))        # T^2 -> T
    vertices.extend(rev_arc[1:])
    poly = SimplePolygon(vertices[:-1])
    if verify:
        poly.verify_simple()
    tc.collar = poly
    return poly


@dataclass(frozen=True)
class NestedImages:
    """Double-step images of the trap polygon with exact diagnostics."""

    polygons: tuple[SimplePolygon, ...]     # L^2 D, L^4 D, ...
    areas: tuple[Scalar, ...]
    nesting_verified: bool


def iterate_trap(params: Params, poly: SimplePolygon, count: int,
                 verify: bool = True) -> NestedImages:
    """Compute the chain of double-step images.

    Each image's area must equal the previous one scaled by b^2 exactly, and
    each polygon must sit inside its predecessor; violations are fatal since
    both facts are theorems for the construction.
    """
    polys: list[SimplePolygon] = []
    areas: list[Scalar] = []
    prev = poly
    factor = params.b * params.b
    for j in range(count):
        nxt = image_polygon(params, prev, 2)
        if verify:
            expected = prev.area() * factor
            if scalar_sign(nxt.area() - expected) != 0:
                raise InconsistencyError(
                    f"area law violated at double-step image {j + 1}")
            if not polygon_contains(prev, nxt):
                raise InconsistencyError(
                    f"double-step image {j + 1} escapes its predecessor")
        polys.append(nxt)
        areas.append(nxt.area())
        prev = nxt
    return NestedImages(polygons=tuple(polys), areas=tuple(areas),
                        nesting_verified=verify)


def trapping_index(params: Params, trap: SimplePolygon, images: NestedImages,
                   max_k: Optional[int] = None) -> Optional[int]:
    """Least k with the k-th double-step image strictly inside the polygon's
    interior.  None when the budget of computed images is exhausted."""
    index = SegmentIndex(list(trap.segments()))
    limit = len(images.polygons) if max_k is None else min(max_k, len(images.polygons))
    for j in range(limit):
        if polygon_strictly_contains(trap, images.polygons[j], index=index):
            return j + 1
    return None


def collar_area_identity(params: Params, tc: TrapConstruction,
                         images: NestedImages, collar_images: int = 3) -> bool:
    """Exact bookkeeping: the trap area equals the k-th image area plus the
    geometric sum of collar-image areas, for every computed k.

    The first few collar areas are recomputed from actual image polygons;
    beyond that the exact scaling law (already verified per iterate) covers
    the rest of the sum.
    """
    if tc.trap is None or tc.collar is None:
        raise ValueError("trap and collar polygons must be built first")
    area_d = tc.trap.area()
    area_k = tc.collar.area()
    factor = params.b * params.b
    collar_areas: list[Scalar] = [area_k]
    poly = tc.collar
    for _ in range(collar_images):
        poly = image_polygon(params, poly, 2)
        collar_areas.append(poly.area())
    for j in range(1, len(collar_areas)):
        if scalar_sign(collar_areas[j] - collar_areas[j - 1] * factor) != 0:
            raise InconsistencyError("collar image area violates the scaling law")
    running = area_d
    scale = Fraction(1)
    for k in range(1, len(images.polygons) + 1):
        expected_collar_sum = area_k * (1 - scale * factor ** k) / (1 - factor) \
            if params.exact else None
        running_sum = sum((area_k * factor ** j for j in range(k)), Fraction(0))
        if scalar_sign(area_d - (images.areas[k - 1] + running_sum)) != 0:
            return False
    return True


@dataclass(frozen=True)
class AccumulationApprox:
    """Outer approximation of the accumulation set at a given iterate depth."""

    k: int
    right: SimplePolygon
    left: SimplePolygon
    right_area: Scalar
    right_diameter: float
    left_diameter: float
    cycle_in_right: Location
    cycle_in_left: Location
    change_from_previous: Optional[FloatScalar]

    def to_json(self) -> dict:
        from .numeric import scalar_to_json
        return {
            "k": self.k,
            "right_vertices": len(self.right.vertices),
            "left_vertices": len(self.left.vertices),
            "right_area": scalar_to_json(self.right_area),
            "right_diameter": self.right_diameter,
            "left_diameter": self.left_diameter,
            "cycle_in_right": self.cycle_in_right.value,
            "cycle_in_left": self.cycle_in_left.value,
            "change_from_previous": None if self.change_from_previous is None
            else float(self.change_from_previous.value),
        }


def accumulation_approximation(params: Params, trap: SimplePolygon, k: int,
                               images: Optional[NestedImages] = None) -> AccumulationApprox:
    """The k-th double-step image and its single image, with the two-cycle
    membership verified exactly; losing the cycle is fatal because the cycle
    provably lies in the accumulation set."""
    if k < 1:
        raise ValueError("k must be positive")
    if images is None or len(images.polygons) < k:
        images = iterate_trap(params, trap, k)
    right = images.polygons[k - 1]
    left = image_polygon(params, right, 1)
    p, pp = params.two_cycle()
    loc_p = point_in_polygon(p, right)
    loc_pp = point_in_polygon(pp, left)
    if loc_p is Location.EXTERIOR or loc_pp is Location.EXTERIOR:
        raise InconsistencyError(
            "two-cycle escaped the nested approximation: contradicts the "
            "cycle-in-accumulation-set corollary")
    change = None
    if k >= 2:
        change = hausdorff_distance(images.polygons[k - 2], right, max_samples=4000)
    return AccumulationApprox(
        k=k, right=right, left=left, right_area=right.area(),
        right_diameter=polygon_diameter_float(right),
        left_diameter=polygon_diameter_float(left),
        cycle_in_right=loc_p, cycle_in_left=loc_pp,
        change_from_previous=change)
