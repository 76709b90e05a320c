"""Invariant manifolds as exact polygonal objects.

The unstable manifold of the first-quadrant saddle is generated arc by arc:
both branches decompose into double-step images of a fundamental arc anchored
at the first axis crossing, and every image is computed by fold splitting
followed by affine vertex mapping, so the polylines are exact.  The stable
manifold is a ray plus a backward-iterated fundamental segment.  On top of
the generators: axis-crossing enumeration, homoclinic search, the local-arc
separation bound, and escape iteration from the axis triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceededError, InconsistencyError
from .geom import (
    HorizontalAxisFold,
    Point,
    Polyline,
    SegmentIndex,
    VerticalAxisFold,
    on_segment,
    orientation,
    segment_intersection,
    split_at_fold,
)
from .lozimap import Params, SaddleFrame, apply, eigen_data
from .numeric import FloatScalar, Scalar, scalar_cmp, scalar_sign


class Branch(Enum):
    U_PLUS = "u+"
    U_MINUS = "u-"
    S_PLUS = "s+"
    S_MINUS = "s-"


def image_of_polyline(params: Params, line: Polyline, k: int) -> Polyline:
    """Exact image of a polyline under k map steps (negative k: inverse).

    Before each unit step the polyline is split at that step's linearity
    fold (the vertical axis forward, the horizontal axis backward), so every
    segment maps affinely and the result is the exact image.
    """
    forward = k >= 0
    fold = VerticalAxisFold() if forward else HorizontalAxisFold()
    step = 1 if forward else -1
    for _ in range(abs(k)):
        line = split_at_fold(line, fold)
        line = Polyline([apply(params, v, step) for v in line.vertices])
    return line


@dataclass(frozen=True)
class ManifoldArc:
    branch: Branch
    index: int
    polyline: Polyline


class UnstableManifold:
    """Both branches of the unstable manifold, computed to a given arc depth.

    Arc n of the right branch is the double-step image of [Z, Z^2]; arc n of
    the left branch the double-step image of [Z^-1, Z^1], where Z is the
    first crossing of the positive horizontal axis.  Depth counts arcs, i.e.
    double map steps.
    """

    def __init__(self, params: Params, depth: int):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.params = params
        x0 = params.fixed_point_q1()
        z = params.first_crossing()
        z_m1 = Point(params.zero(), z.x - 1)
        self.seed_right = Polyline([x0, z])
        self.seed_left = Polyline([x0, z_m1])
        left_image = image_of_polyline(params, self.seed_right, 1)
        z1 = left_image.vertices[-1]
        if not on_segment(z_m1, x0, z1):
            raise InconsistencyError("backward crossing fell off the seed segment")
        self.arcs_plus: list[Polyline] = []
        self.arcs_minus: list[Polyline] = [Polyline([z_m1, z1])]
        self.arcs_plus.append(image_of_polyline(params, self.arcs_minus[0], 1))
        self.depth = 0
        self.extend_to(depth)

    def extend_to(self, depth: int) -> None:
        while len(self.arcs_plus) <= depth:
            self.arcs_plus.append(image_of_polyline(self.params, self.arcs_plus[-1], 2))
            self.arcs_minus.append(image_of_polyline(self.params, self.arcs_minus[-1], 2))
        self.depth = max(self.depth, depth)

    def arcs(self, branch: Branch) -> list[Polyline]:
        if branch is Branch.U_PLUS:
            return self.arcs_plus
        if branch is Branch.U_MINUS:
            return self.arcs_minus
        raise ValueError("unstable branches only")

    def branch_polyline(self, branch: Branch, upto: Optional[int] = None) -> Polyline:
        """Concatenated branch from the fixed point outward."""
        seed = self.seed_right if branch is Branch.U_PLUS else self.seed_left
        vertices = list(seed.vertices)
        arcs = self.arcs(branch)
        n = len(arcs) if upto is None else min(upto + 1, len(arcs))
        for arc in arcs[:n]:
            if arc.vertices[0] != vertices[-1]:
                raise InconsistencyError("arc chain endpoints disagree")
            vertices.extend(arc.vertices[1:])
        return Polyline(vertices)

    def chain_segments(self, upto: Optional[int] = None) -> list[tuple[Branch, int, Point, Point]]:
        """All segments with (branch, position-in-chain) provenance."""
        out = []
        for branch in (Branch.U_PLUS, Branch.U_MINUS):
            line = self.branch_polyline(branch, upto)
            for i, (a, b) in enumerate(line.segments()):
                out.append((branch, i, a, b))
        return out

    def verify_injective(self, upto: Optional[int] = None) -> int:
        """Exact self-intersection scan; the manifold is injectively immersed,
        so any hit beyond shared chain endpoints is fatal.  Returns the number
        of segment pairs tested."""
        segs = self.chain_segments(upto)
        index = SegmentIndex([(a, b) for _, _, a, b in segs])
        x0 = self.params.fixed_point_q1()
        tested = 0
        for i, (br_i, pos_i, a1, b1) in enumerate(segs):
            for j in index.candidates_for((a1, b1)):
                if j <= i:
                    continue
                br_j, pos_j, a2, b2 = segs[j]
                hit = segment_intersection(a1, b1, a2, b2)
                if not hit:
                    continue
                tested += 1
                if br_i is br_j and pos_j == pos_i + 1:
                    if hit.kind == "point" and hit.point == b1:
                        continue
                if br_i is not br_j and pos_i == 0 and pos_j == 0:
                    if hit.kind == "point" and hit.point == x0:
                        continue
                raise InconsistencyError(
                    f"unstable manifold self-intersection between {br_i.value}[{pos_i}] "
                    f"and {br_j.value}[{pos_j}]: {hit!r}")
        return tested


def unstable_manifold(params: Params, depth: int, verify: bool = True) -> UnstableManifold:
    manifold = UnstableManifold(params, depth)
    if verify:
        manifold.verify_injective()
    return manifold


@dataclass(frozen=True)
class StableManifold:
    """The stable set of the first-quadrant saddle: an upward ray plus the
    downward branch computed by backward iteration of [X, V]."""

    params: Params
    ray_origin: Point
    ray_dir: tuple[Scalar, Scalar]
    down_branch: Polyline
    v_point: Point
    depth: int

    def segments(self) -> list[tuple[Point, Point]]:
        return list(self.down_branch.segments())


def stable_manifold(params: Params, depth: int) -> StableManifold:
    """Backward-iterate the fundamental stable segment to the given depth.

    The fundamental segment runs from the saddle down to its first crossing
    of the vertical axis; every backward step splits at the horizontal axis,
    the fold of the inverse map.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    x0 = params.fixed_point_q1()
    ed = eigen_data(params)
    lam_s, b = ed.lam_s, params.b
    # downward along -(lam_s, b) from X until x = 0
    t = x0.x / lam_s
    v_point = Point(params.zero(), x0.y - t * b)
    fundamental = Polyline([x0, v_point])
    down = image_of_polyline(params, fundamental, -depth) if depth else fundamental
    return StableManifold(params=params, ray_origin=x0, ray_dir=(lam_s, b),
                          down_branch=down, v_point=v_point, depth=depth)


# --- axis crossings ---------------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    point: Point
    axis: str          # "x" for the horizontal axis, "y" for the vertical
    branch: Branch
    kind: str          # "crossing" | "touch"
    chain_pos: tuple   # (segment index, float parameter) along the branch
    arclen: float      # float arc length from the fixed point


def _zero_like(s: Scalar) -> Scalar:
    return FloatScalar(0.0) if isinstance(s, FloatScalar) else Fraction(0)


def _axis_events(line: Polyline, branch: Branch, axis: str) -> list[Crossing]:
    coord = (lambda p: p.y) if axis == "x" else (lambda p: p.x)
    sides = [scalar_sign(coord(v)) for v in line.vertices]
    verts = line.vertices
    lengths = [0.0]
    for a, b in line.segments():
        ax, ay = a.to_floats()
        bx, by = b.to_floats()
        lengths.append(lengths[-1] + math.hypot(bx - ax, by - ay))
    events: list[Crossing] = []
    n = len(verts)
    i = 0
    while i < n:
        if sides[i] == 0:
            # run of consecutive on-axis vertices
            j = i
            while j + 1 < n and sides[j + 1] == 0:
                j += 1
            before = sides[i - 1] if i > 0 else 0
            after = sides[j + 1] if j + 1 < n else 0
            kind = "crossing" if before * after < 0 else "touch"
            events.append(Crossing(point=verts[i], axis=axis, branch=branch,
                                   kind=kind, chain_pos=(i, 0.0), arclen=lengths[i]))
            i = j + 1
            continue
        if i + 1 < n and sides[i + 1] != 0 and sides[i] * sides[i + 1] < 0:
            a, b = verts[i], verts[i + 1]
            ca, cb = coord(a), coord(b)
            t = ca / (ca - cb)
            if axis == "x":
                p = Point(a.x + t * (b.x - a.x), _zero_like(a.y))
            else:
                p = Point(_zero_like(a.x), a.y + t * (b.y - a.y))
            tf = float(FloatScalar.of(t).value)
            events.append(Crossing(point=p, axis=axis, branch=branch, kind="crossing",
                                   chain_pos=(i, tf), arclen=lengths[i] + tf * (lengths[i + 1] - lengths[i])))
        i += 1
    return events


def axis_crossings(params: Params, depth: int,
                   manifold: Optional[UnstableManifold] = None) -> list[Crossing]:
    """All exact meetings of the unstable branches with the coordinate axes,
    ordered along each branch from the fixed point outward.  Vertices exactly
    on an axis with both neighbors strictly to one side are tagged "touch"
    and are not counted as crossings by the classifier."""
    if manifold is None:
        manifold = unstable_manifold(params, depth)
    else:
        manifold.extend_to(depth)
    out: list[Crossing] = []
    for branch in (Branch.U_PLUS, Branch.U_MINUS):
        line = manifold.branch_polyline(branch, depth)
        events = _axis_events(line, branch, "x") + _axis_events(line, branch, "y")
        events.sort(key=lambda c: (c.chain_pos[0], c.chain_pos[1]))
        out.extend(events)
    return out


# --- homoclinic search ------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    point: Point
    transversal: bool
    u_location: tuple
    s_location: tuple


@dataclass(frozen=True)
class HomoclinicResult:
    witness: Optional[Witness]
    u_depth: int
    s_depth: int
    pairs_tested: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def _ray_segment_hits(origin: Point, direction: tuple[Scalar, Scalar],
                      a: Point, b: Point) -> list[Point]:
    """Exact intersections of segment ab with the ray origin + t*dir, t >= 0."""
    dx, dy = direction
    sx, sy = b.x - a.x, b.y - a.y
    denom = sx * dy - sy * dx
    if scalar_sign(denom) == 0:
        # parallel; collinear overlap reduces to endpoint membership on the ray
        hits = []
        for p in (a, b):
            wx, wy = p.x - origin.x, p.y - origin.y
            if scalar_sign(wx * dy - wy * dx) == 0:
                t = (wx * dx + wy * dy) / (dx * dx + dy * dy)
                if scalar_sign(t) >= 0:
                    hits.append(p)
        return hits
    wx, wy = origin.x - a.x, origin.y - a.y
    s = (wx * dy - wy * dx) / denom
    if scalar_sign(s) < 0 or scalar_cmp(s, Fraction(1)) > 0:
        return []
    px, py = a.x + s * sx, a.y + s * sy
    t_num = (px - origin.x) * dx + (py - origin.y) * dy
    if scalar_sign(t_num) < 0:
        return []
    return [Point(px, py)]


def homoclinic_search(params: Params, u_depth: int, s_depth: int,
                      manifold: Optional[UnstableManifold] = None,
                      stable: Optional[StableManifold] = None) -> HomoclinicResult:
    """Exact search for stable/unstable intersections other than the saddle.

    A returned witness is an exact point common to both computed sets; absence
    is depth-stamped evidence only, never a certificate.
    """
    if manifold is None:
        manifold = unstable_manifold(params, u_depth)
    else:
        manifold.extend_to(u_depth)
    if stable is None or stable.depth < s_depth:
        stable = stable_manifold(params, s_depth)
    x0 = params.fixed_point_q1()
    u_segs = manifold.chain_segments(u_depth)
    s_segs = list(stable.down_branch.segments())
    index = SegmentIndex([(a, b) for a, b in s_segs])
    pairs = 0
    witnesses: list[Witness] = []

    def consider(point: Point, transversal: bool, u_loc, s_loc):
        if point == x0:
            return
        witnesses.append(Witness(point=point, transversal=transversal,
                                 u_location=u_loc, s_location=s_loc))

    for branch, pos, a1, b1 in u_segs:
        # against the backward-iterated downward branch
        for j in index.candidates_for((a1, b1)):
            a2, b2 = s_segs[j]
            hit = segment_intersection(a1, b1, a2, b2)
            pairs += 1
            if not hit:
                continue
            if hit.kind == "overlap":
                consider(hit.overlap[0], False, (branch.value, pos), ("s-", j))
                consider(hit.overlap[1], False, (branch.value, pos), ("s-", j))
                continue
            consider(hit.point, bool(hit.proper), (branch.value, pos), ("s-", j))
        # against the upward stable ray
        for p in _ray_segment_hits(stable.ray_origin, stable.ray_dir, a1, b1):
            pairs += 1
            dx, dy = stable.ray_dir
            cross = (b1.x - a1.x) * dy - (b1.y - a1.y) * dx
            consider(p, scalar_sign(cross) != 0, (branch.value, pos), ("s+", 0))

    witnesses.sort(key=lambda w: (w.u_location, w.s_location))
    best = None
    for w in witnesses:
        if w.transversal:
            best = w
            break
    if best is None and witnesses:
        best = witnesses[0]
    return HomoclinicResult(witness=best, u_depth=u_depth, s_depth=s_depth,
                            pairs_tested=pairs)


# --- local arc separation -----------------------------------------------------

def _prefix_to_point(manifold: UnstableManifold, q: Point) -> tuple[Polyline, Branch, int]:
    """Sub-polyline of a branch from the fixed point to q (exact location)."""
    if q == manifold.params.fixed_point_q1():
        raise ValueError("arc endpoint must differ from the fixed point")
    for branch in (Branch.U_PLUS, Branch.U_MINUS):
        line = manifold.branch_polyline(branch)
        verts = line.vertices
        for i, (a, b) in enumerate(line.segments()):
            if on_segment(q, a, b):
                prefix = list(verts[:i + 1])
                if q != prefix[-1]:
                    prefix.append(q)
                if len(prefix) >= 2:
                    return Polyline(prefix), branch, i
    raise ValueError("point does not lie on the computed manifold")


def _float_seg_dist(ax, ay, bx, by, cx, cy, dx, dy) -> float:
    from .geom import _dist_point_segment_float

    def orient(px, py, qx, qy, rx, ry):
        v = (qx - px) * (ry - py) - (qy - py) * (rx - px)
        return (v > 0) - (v < 0)

    d1 = orient(cx, cy, dx, dy, ax, ay)
    d2 = orient(cx, cy, dx, dy, bx, by)
    d3 = orient(ax, ay, bx, by, cx, cy)
    d4 = orient(ax, ay, bx, by, dx, dy)
    if d1 != d2 and d3 != d4:
        return 0.0
    return min(_dist_point_segment_float(ax, ay, cx, cy, dx, dy),
               _dist_point_segment_float(bx, by, cx, cy, dx, dy),
               _dist_point_segment_float(cx, cy, ax, ay, bx, by),
               _dist_point_segment_float(dx, dy, ax, ay, bx, by))


def _walk_to_distance(pts: list[tuple[float, float]], eps: float) -> Optional[tuple[int, tuple[float, float]]]:
    """First point along the float polyline at Euclidean distance eps from its
    first vertex; returns (segment index, point).  Distance to the origin is
    convex on each segment, so the first crossing is found where the segment
    entry is closer than eps and the exit at least eps away."""
    ox, oy = pts[0]
    for i in range(len(pts) - 1):
        (ax, ay), (bx, by) = pts[i], pts[i + 1]
        da = math.hypot(ax - ox, ay - oy)
        db = math.hypot(bx - ox, by - oy)
        if da < eps <= db:
            lo, hi = 0.0, 1.0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                mx, my = ax + mid * (bx - ax), ay + mid * (by - ay)
                if math.hypot(mx - ox, my - oy) < eps:
                    lo = mid
                else:
                    hi = mid
            return i, (ax + lo * (bx - ax), ay + lo * (by - ay))
    return None


def local_arc_epsilon(params: Params, q: Point, depth: int,
                      manifold: Optional[UnstableManifold] = None) -> FloatScalar:
    """Largest dyadic radius (halving search, float evaluation) whose tube
    around the arc from the saddle to q meets the computed manifold only in
    that arc.  The tube is anchored on the arc shrunk by the radius at both
    ends; returns a positive lower bound for the radius.  Failure to find any
    positive radius contradicts the local-arc property and raises
    InconsistencyError."""
    if manifold is None:
        manifold = unstable_manifold(params, depth)
    else:
        manifold.extend_to(depth)
    x0 = params.fixed_point_q1()
    prefix, branch, seg_idx = _prefix_to_point(manifold, q)
    rest: list[tuple[Point, Point]] = []
    adjacent: list[bool] = []
    for br, pos, a, b in manifold.chain_segments():
        if br is branch and pos <= seg_idx:
            continue
        rest.append((a, b))
        adjacent.append(a == q or b == q or a == x0 or b == x0)
    if not rest:
        raise ValueError("no manifold remainder at this depth")

    prefix_f = [v.to_floats() for v in prefix.vertices]
    rest_f = [(a.to_floats(), b.to_floats()) for a, b in rest]

    cap = math.inf
    for i in range(len(prefix_f) - 1):
        (ax, ay), (bx, by) = prefix_f[i], prefix_f[i + 1]
        for k, ((cx, cy), (dx, dy)) in enumerate(rest_f):
            if adjacent[k]:
                continue
            cap = min(cap, _float_seg_dist(ax, ay, bx, by, cx, cy, dx, dy))
    cap = cap / 2
    if not math.isfinite(cap) or cap <= 0:
        cap = max(prefix.length_float() / 4, 2.0 ** -20)

    def tube_clear(eps_val: float) -> bool:
        hit_start = _walk_to_distance(prefix_f, eps_val)
        hit_end = _walk_to_distance(prefix_f[::-1], eps_val)
        if hit_start is None or hit_end is None:
            return False
        i0, p_start = hit_start
        j_rev, p_end = hit_end
        j0 = len(prefix_f) - 2 - j_rev
        if i0 > j0 or (i0 == j0 and
                       math.hypot(p_start[0] - prefix_f[i0][0], p_start[1] - prefix_f[i0][1])
                       > math.hypot(p_end[0] - prefix_f[j0][0], p_end[1] - prefix_f[j0][1])):
            return False
        shrunk = [p_start] + prefix_f[i0 + 1:j0 + 1] + [p_end]
        for i in range(len(shrunk) - 1):
            (ax, ay), (bx, by) = shrunk[i], shrunk[i + 1]
            for k, ((cx, cy), (dx, dy)) in enumerate(rest_f):
                d = _float_seg_dist(ax, ay, bx, by, cx, cy, dx, dy)
                # adjacent pieces meet the tube radius exactly when the arc
                # runs straight through q or the saddle; tolerate equality
                bound = eps_val * (1 - 1e-6) if adjacent[k] else eps_val * (1 - 1e-12)
                if d < bound:
                    return False
        return True

    eps = 2.0 ** math.floor(math.log2(cap))
    for _ in range(100):
        if eps < 2.0 ** -70:
            raise InconsistencyError(
                "no positive separation radius found: contradicts the local-arc property")
        if tube_clear(eps):
            return FloatScalar(eps, eps * 1e-6)
        eps /= 2
    raise InconsistencyError(
        "no positive separation radius found: contradicts the local-arc property")


# --- escape from the axis triangle -------------------------------------------

@dataclass(frozen=True)
class EscapeResult:
    kind: str                  # "escaped" | "still-inside" | "on-stable-line"
    index: Optional[int]
    predicted_bound: Optional[float]


def escape_from_triangle(params: Params, a_point: Point, max_iter: int) -> EscapeResult:
    """Iterate a first-quadrant point below the chord between the first axis
    crossing and its preimage until it reaches the second quadrant.

    Points exactly on the local stable line never leave and are reported as
    such; anything else escapes in finitely many steps, and the expansion
    rate along the unstable direction predicts roughly when."""
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    z = params.first_crossing()
    z_m1 = Point(params.zero(), z.x - 1)
    if scalar_sign(a_point.x) < 0 or scalar_sign(a_point.y) < 0:
        raise ValueError("point not in the closed first quadrant")
    if orientation(z_m1, z, a_point) >= 0:
        raise ValueError("point not strictly below the axis chord")
    x0 = params.fixed_point_q1()
    ed = eigen_data(params)
    lam_s, b = ed.lam_s, params.b
    cross = (a_point.x - x0.x) * b - (a_point.y - x0.y) * lam_s
    d0 = abs(float(FloatScalar.of(cross).value)) / math.hypot(
        float(FloatScalar.of(lam_s).value), float(FloatScalar.of(b).value))
    lam_u_abs = abs(float(FloatScalar.of(ed.lam_u).value))
    zx = float(FloatScalar.of(z.x).value)
    predicted = None
    if d0 > 0:
        predicted = math.log(max(zx, 1.0) / d0) / math.log(lam_u_abs)
    if scalar_sign(cross) == 0:
        return EscapeResult(kind="on-stable-line", index=None, predicted_bound=predicted)
    p = a_point
    for m in range(1, max_iter + 1):
        p = apply(params, p, 1)
        sx, sy = scalar_sign(p.x), scalar_sign(p.y)
        if sx < 0 and sy >= 0:
            return EscapeResult(kind="escaped", index=m, predicted_bound=predicted)
        if sx >= 0 and sy >= 0:
            continue
        raise InconsistencyError("triangle iterate left the upper half-plane")
    return EscapeResult(kind="still-inside", index=None, predicted_bound=predicted)


# --- manifolds of periodic saddles -------------------------------------------

def _normalize_direction(v: tuple[Scalar, Scalar]) -> tuple[Scalar, Scalar]:
    ax = v[0] if scalar_sign(v[0]) >= 0 else -v[0]
    ay = v[1] if scalar_sign(v[1]) >= 0 else -v[1]
    big = ax if scalar_cmp(ax, ay) >= 0 else ay
    return (v[0] / big, v[1] / big)


def _seed_segment(p0: Point, direction: tuple[Scalar, Scalar], rho: Fraction) -> Polyline:
    dx, dy = direction
    return Polyline([Point(p0.x - rho * dx, p0.y - rho * dy),
                     Point(p0.x + rho * dx, p0.y + rho * dy)])


def _segment_halfplane_ok(line: Polyline, coord) -> bool:
    signs = [scalar_sign(coord(v)) for v in line.vertices]
    return not (1 in signs and -1 in signs)


def _verified_seed(params: Params, p0: Point, direction: tuple[Scalar, Scalar],
                   period: int, backward: bool, rho: Fraction) -> Polyline:
    """Shrink the seed until one full period of (backward for unstable,
    forward for stable) images stays inside a single linearity half-plane at
    every step and lands inside the seed again; nesting then makes the seed an
    exact subset of the invariant manifold."""
    step = -1 if backward else 1
    coord = (lambda p: p.y) if backward else (lambda p: p.x)
    for _ in range(60):
        seed = _seed_segment(p0, direction, rho)
        cur = seed
        ok = True
        for _ in range(period):
            if not _segment_halfplane_ok(cur, coord):
                ok = False
                break
            cur = Polyline([apply(params, v, step) for v in cur.vertices])
        if ok:
            a, b = cur.vertices[0], cur.vertices[-1]
            if on_segment(a, *seed.vertices[:2]) and on_segment(b, *seed.vertices[:2]):
                return seed
        rho /= 8
    raise BudgetExceededError("could not verify a seed segment for the saddle manifold")


@dataclass(frozen=True)
class SaddleManifolds:
    frame: SaddleFrame
    unstable_pieces: tuple[Polyline, ...]
    stable_pieces: tuple[Polyline, ...]
    u_steps: int
    s_steps: int


def saddle_manifolds(params: Params, frame: SaddleFrame, u_steps: int, s_steps: int,
                     rho: Fraction = Fraction(1, 1024)) -> SaddleManifolds:
    """Grow exact local manifolds of a periodic saddle by iterating verified
    seed segments.  The last `period` images cover all earlier ones, so only
    those are kept."""
    n = frame.orbit.period
    p0 = frame.orbit.points[0]
    dir_u = _normalize_direction(frame.dirs_u[0])
    dir_s = _normalize_direction(frame.dirs_s[0])
    seed_u = _verified_seed(params, p0, dir_u, n, backward=True, rho=rho)
    seed_s = _verified_seed(params, p0, dir_s, n, backward=False, rho=rho)
    pieces_u: list[Polyline] = [seed_u]
    for _ in range(u_steps):
        pieces_u.append(image_of_polyline(params, pieces_u[-1], 1))
    pieces_s: list[Polyline] = [seed_s]
    for _ in range(s_steps):
        pieces_s.append(image_of_polyline(params, pieces_s[-1], -1))
    keep_u = pieces_u[-n:] if len(pieces_u) > n else pieces_u
    keep_s = pieces_s[-n:] if len(pieces_s) > n else pieces_s
    return SaddleManifolds(frame=frame, unstable_pieces=tuple(keep_u),
                           stable_pieces=tuple(keep_s),
                           u_steps=u_steps, s_steps=s_steps)


def saddle_connection_search(params: Params, sm: SaddleManifolds) -> HomoclinicResult:
    """Exact intersections between a periodic saddle's stable and unstable
    pieces, excluding the orbit itself."""
    orbit_pts = set(sm.frame.orbit.points)
    s_segs: list[tuple[Point, Point]] = []
    for piece in sm.stable_pieces:
        s_segs.extend(piece.segments())
    index = SegmentIndex(s_segs)
    pairs = 0
    witnesses: list[Witness] = []
    for pi, piece in enumerate(sm.unstable_pieces):
        for si, (a1, b1) in enumerate(piece.segments()):
            for j in index.candidates_for((a1, b1)):
                a2, b2 = s_segs[j]
                hit = segment_intersection(a1, b1, a2, b2)
                pairs += 1
                if not hit or hit.kind == "overlap":
                    if hit and hit.kind == "overlap":
                        witnesses.append(Witness(hit.overlap[0], False, (pi, si), (0, j)))
                    continue
                if hit.point in orbit_pts:
                    continue
                witnesses.append(Witness(hit.point, bool(hit.proper), (pi, si), (0, j)))
    witnesses.sort(key=lambda w: (not w.transversal, w.u_location, w.s_location))
    best = witnesses[0] if witnesses else None
    return HomoclinicResult(witness=best, u_depth=sm.u_steps, s_depth=sm.s_steps,
                            pairs_tested=pairs)
