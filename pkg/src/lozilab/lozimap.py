"""The piecewise-affine plane map (x, y) -> (1 + y - a|x|, b x).

Forward and inverse evaluation with exact branch decisions, the derived
fixed-point and two-cycle data, and periodic-orbit enumeration over sign
itineraries.  With rational parameters every derived constant lives in the
quadratic field attached to the parameter pair, so all of this is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BudgetExceededError, InconsistencyError
from .geom import Point
from .numeric import (
    FloatScalar,
    Scalar,
    float_sqrt,
    parse_rational,
    quad,
    scalar_bits,
    scalar_cmp,
    scalar_sign,
    scalar_to_json,
)


class Params:
    """Validated parameter pair (a, b) with cached derived constants.

    standard flag: 0 < b < 1 and a + b > 1 (both fixed points are saddles);
    two_cycle flag: 1 - b < a < 1 + b (an attracting period-two orbit exists).
    In exact mode the field radicand is a^2 + 4b.
    """

    __slots__ = ("a", "b", "exact", "delta", "sqrt_delta", "standard",
                 "has_two_cycle", "bit_budget", "_cache")

    def __init__(self, a: Scalar, b: Scalar, bit_budget: Optional[int] = None):
        self.a = a
        self.b = b
        self.exact = isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction))
        if self.exact:
            self.a = Fraction(a)
            self.b = Fraction(b)
        if scalar_sign(self.b, strict=True) == 0:
            raise ValueError("b must be nonzero")
        self.delta = self.a * self.a + 4 * self.b
        self.standard = (scalar_sign(self.b, strict=True) > 0
                         and scalar_cmp(self.b, Fraction(1), strict=True) < 0
                         and scalar_cmp(self.a + self.b, Fraction(1), strict=True) > 0)
        self.has_two_cycle = (scalar_cmp(1 - self.b, self.a, strict=True) < 0
                              and scalar_cmp(self.a, 1 + self.b, strict=True) < 0)
        if scalar_sign(self.delta, strict=True) > 0:
            if self.exact:
                self.sqrt_delta = quad(0, 1, self.delta)
            else:
                self.sqrt_delta = float_sqrt(FloatScalar.of(self.delta))
        else:
            self.sqrt_delta = None
        self.bit_budget = bit_budget
        self._cache: dict = {}
        if self.standard:
            lu, ls = self.eigenvalues()
            if not (scalar_cmp(lu, Fraction(-1)) < 0 and scalar_sign(ls) > 0
                    and scalar_cmp(ls, Fraction(1)) < 0):
                raise InconsistencyError("eigenvalues violate the saddle bounds")

    @classmethod
    def from_strings(cls, a: str, b: str, bit_budget: Optional[int] = None) -> "Params":
        return cls(parse_rational(a), parse_rational(b), bit_budget=bit_budget)

    @classmethod
    def float_mode(cls, a: float, b: float) -> "Params":
        return cls(FloatScalar.of(a), FloatScalar.of(b))

    def __repr__(self):
        return f"Params(a={self.a}, b={self.b}, exact={self.exact})"

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else FloatScalar(0.0, 0.0)

    def check_budget(self, p: Point) -> None:
        if self.bit_budget is not None:
            if max(scalar_bits(p.x), scalar_bits(p.y)) > self.bit_budget:
                raise BudgetExceededError(
                    f"coordinate bit length exceeded budget {self.bit_budget}")

    def fixed_point_q1(self) -> Point:
        """The saddle fixed point in the closed first quadrant."""
        if "fq1" not in self._cache:
            den = 1 + self.a - self.b
            if scalar_sign(den, strict=True) == 0:
                raise ValueError("degenerate denominator 1 + a - b")
            self._cache["fq1"] = Point(1 / den, self.b / den)
        return self._cache["fq1"]

    def fixed_point_q3(self) -> Point:
        """The other fixed point, in the third quadrant in standard mode."""
        if "fq3" not in self._cache:
            den = 1 - self.a - self.b
            if scalar_sign(den, strict=True) == 0:
                raise ValueError("degenerate denominator 1 - a - b")
            self._cache["fq3"] = Point(1 / den, self.b / den)
        return self._cache["fq3"]

    def eigenvalues(self) -> tuple[Scalar, Scalar]:
        """Unstable and stable eigenvalues at the first-quadrant saddle."""
        if self.sqrt_delta is None:
            raise ValueError("negative discriminant: eigenvalues are complex")
        if "eig" not in self._cache:
            lu = (-self.a - self.sqrt_delta) / 2
            ls = (-self.a + self.sqrt_delta) / 2
            self._cache["eig"] = (lu, ls)
        return self._cache["eig"]

    def first_crossing(self) -> Point:
        """First meeting point of the rightward unstable branch with the
        positive horizontal axis."""
        if "fc" not in self._cache:
            if self.sqrt_delta is None:
                raise ValueError("negative discriminant")
            den = 2 + self.a - self.sqrt_delta
            self._cache["fc"] = Point(2 / den, self.zero())
        return self._cache["fc"]

    def two_cycle(self) -> tuple[Point, Point]:
        """The period-two orbit: first point in quadrant 4, second in 2."""
        if not self.has_two_cycle:
            raise ValueError("parameters outside the two-cycle range 1-b < a < 1+b")
        if "cyc" not in self._cache:
            den = self.a * self.a + (1 - self.b) * (1 - self.b)
            p = Point((1 + self.a - self.b) / den, self.b * (1 - self.a - self.b) / den)
            pp = Point((1 - self.a - self.b) / den, self.b * (1 + self.a - self.b) / den)
            self._cache["cyc"] = (p, pp)
        return self._cache["cyc"]

    def to_json(self) -> dict:
        return {"a": scalar_to_json(self.a), "b": scalar_to_json(self.b),
                "exact": self.exact}


def fixed_points(params: Params) -> tuple[Point, Point]:
    return params.fixed_point_q1(), params.fixed_point_q3()


@dataclass(frozen=True)
class EigenData:
    lam_u: Scalar
    lam_s: Scalar
    dir_u: tuple[Scalar, Scalar]
    dir_s: tuple[Scalar, Scalar]


def eigen_data(params: Params) -> EigenData:
    """Eigenvalues and eigenvectors (lam, b) at the first-quadrant saddle."""
    lu, ls = params.eigenvalues()
    return EigenData(lu, ls, (lu, params.b), (ls, params.b))


def period_two_orbit(params: Params) -> tuple[Point, Point]:
    return params.two_cycle()


def first_axis_crossing(params: Params) -> Point:
    return params.first_crossing()


def _forward(params: Params, p: Point) -> Point:
    s = scalar_sign(p.x, strict=not params.exact)
    ax = params.a * p.x if s >= 0 else -(params.a * p.x)
    return Point(1 + p.y - ax, params.b * p.x)


def _backward(params: Params, p: Point) -> Point:
    x_prev = p.y / params.b
    s = scalar_sign(x_prev, strict=not params.exact)
    ax = params.a * x_prev if s >= 0 else -(params.a * x_prev)
    return Point(x_prev, p.x - 1 + ax)


def apply(params: Params, p: Point, k: int = 1) -> Point:
    """k-fold application of the map (negative k runs the inverse)."""
    step = _forward if k >= 0 else _backward
    for _ in range(abs(k)):
        p = step(params, p)
        params.check_budget(p)
    return p


class Stability(Enum):
    ATTRACTING_NODE = "attracting-node"
    ATTRACTING_FOCUS = "attracting-focus"
    SADDLE = "saddle"
    REPELLING = "repelling"
    DEGENERATE = "degenerate"


Matrix = tuple[tuple[Scalar, Scalar], tuple[Scalar, Scalar]]


def step_jacobian(params: Params, branch_sign: int) -> Matrix:
    return ((-params.a * branch_sign, Fraction(1)), (params.b, Fraction(0)))


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    return ((m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
            (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]))


def mat_vec(m: Matrix, v: tuple[Scalar, Scalar]) -> tuple[Scalar, Scalar]:
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def cycle_jacobian(params: Params, signs: Sequence[int], start: int = 0) -> Matrix:
    """Jacobian product along one period, starting at orbit index `start`."""
    m: Matrix = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    n = len(signs)
    for i in range(n):
        m = mat_mul(step_jacobian(params, signs[(start + i) % n]), m)
    return m


def _classify_multipliers(params: Params, m: Matrix) -> tuple[Stability, Scalar, Scalar, tuple]:
    """Stability class, exact trace/determinant, and float multiplier pair."""
    tr = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    disc = tr * tr - 4 * det
    sd = scalar_sign(disc)
    if sd < 0:
        # complex pair, |mu|^2 = det
        c = scalar_cmp(det, Fraction(1))
        stability = (Stability.ATTRACTING_FOCUS if c < 0
                     else Stability.DEGENERATE if c == 0 else Stability.REPELLING)
        re = float(FloatScalar.of(tr).value) / 2
        im = math.sqrt(abs(float(FloatScalar.of(disc).value))) / 2
        return stability, tr, det, ((re, im), (re, -im))
    if sd == 0:
        f = float(FloatScalar.of(tr).value) / 2
        return Stability.DEGENERATE, tr, det, ((f, 0.0), (f, 0.0))
    root = quad(0, 1, disc) if params.exact else float_sqrt(FloatScalar.of(disc))
    mu1 = (tr + root) / 2
    mu2 = (tr - root) / 2
    mods = []
    for mu in (mu1, mu2):
        am = mu if scalar_sign(mu) >= 0 else -mu
        mods.append(scalar_cmp(am, Fraction(1)))
    if any(c == 0 for c in mods):
        stability = Stability.DEGENERATE
    elif all(c < 0 for c in mods):
        stability = Stability.ATTRACTING_NODE
    elif all(c > 0 for c in mods):
        stability = Stability.REPELLING
    else:
        stability = Stability.SADDLE
    floats = tuple((float(FloatScalar.of(mu).value), 0.0) for mu in (mu1, mu2))
    return stability, tr, det, floats


@dataclass(frozen=True)
class OrbitRecord:
    """A periodic orbit with its sign itinerary and stability data.

    The itinerary letter is R when the point has x >= 0 and L otherwise;
    records are canonicalized to the lexicographically least rotation.  The
    exact trace and determinant pin the multipliers as roots of
    t^2 - trace*t + det; the float pair is for reports.
    """

    period: int
    itinerary: str
    points: tuple[Point, ...]
    trace: Scalar
    det: Scalar
    multipliers_float: tuple
    stability: Stability
    degenerate: bool

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "itinerary": self.itinerary,
            "points": [{"x": scalar_to_json(p.x), "y": scalar_to_json(p.y)}
                       for p in self.points],
            "trace": scalar_to_json(self.trace),
            "det": scalar_to_json(self.det),
            "multipliers": [list(m) for m in self.multipliers_float],
            "stability": self.stability.value,
            "degenerate": self.degenerate,
        }


def _least_rotation(word: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    best = word
    shift = 0
    for k in range(1, len(word)):
        rot = word[k:] + word[:k]
        if rot < best:
            best = rot
            shift = k
    return shift, best


def _solve_cyclic(params: Params, signs: Sequence[int]) -> Optional[list[Scalar]]:
    """Solve x_{i+1} = 1 + b x_{i-1} - a s_i x_i for the itinerary's x-coordinates."""
    n = len(signs)
    one = Fraction(1) if params.exact else FloatScalar(1.0)
    rows = [[params.zero() for _ in range(n + 1)] for _ in range(n)]
    for i in range(n):
        rows[i][(i - 1) % n] = rows[i][(i - 1) % n] - params.b
        rows[i][i] = rows[i][i] + params.a * signs[i]
        rows[i][(i + 1) % n] = rows[i][(i + 1) % n] + 1
        rows[i][n] = one
    # Gaussian elimination, exact in rational mode
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if scalar_sign(rows[r][col]) != 0:
                pivot = r
                break
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(n):
            if r != col and scalar_sign(rows[r][col]) != 0:
                f = rows[r][col]
                rows[r] = [rv - f * cv for rv, cv in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


def _canonical_words(n: int) -> list[tuple[int, ...]]:
    """Least-rotation representatives of all length-n sign words (R=+1, L=-1)."""
    out = []
    for mask in range(2 ** n):
        word = tuple(1 if (mask >> i) & 1 == 0 else -1 for i in range(n))
        if _least_rotation(word)[1] == word:
            out.append(word)
    return out


def _word_str(word: Sequence[int]) -> str:
    return "".join("R" if s > 0 else "L" for s in word)


def periodic_orbits(params: Params, n: int) -> list[OrbitRecord]:
    """All orbits of prime period n, one record per cycle.

    Each sign word fixes an affine composition whose periodic point solves a
    cyclic linear system; solutions are kept when the x-signs reproduce the
    word (a zero coordinate matches either letter and flags the record
    degenerate).
    """
    if n < 1:
        raise ValueError("period must be positive")
    records: list[OrbitRecord] = []
    seen: set = set()
    for word in _canonical_words(n):
        xs = _solve_cyclic(params, word)
        if xs is None:
            continue  # singular system: this word has no isolated orbit
        degenerate = False
        ok = True
        for s, x in zip(word, xs):
            sx = scalar_sign(x)
            if sx == 0:
                degenerate = True
            elif sx != s:
                ok = False
                break
        if not ok:
            continue
        # y_i = b * x_{i-1}
        pts = [Point(xs[i], params.b * xs[(i - 1) % n]) for i in range(n)]
        # reject solutions whose prime period divides n properly
        prime = True
        for m in range(1, n):
            if n % m == 0 and all(pts[i] == pts[i % m] for i in range(n)):
                prime = False
                break
        if not prime:
            continue
        key = frozenset((p.x, p.y) for p in pts)
        if key in seen:
            continue
        seen.add(key)
        stability, tr, det, mus_f = _classify_multipliers(params, cycle_jacobian(params, word))
        if degenerate:
            stability = Stability.DEGENERATE
        records.append(OrbitRecord(
            period=n, itinerary=_word_str(word), points=tuple(pts),
            trace=tr, det=det, multipliers_float=mus_f,
            stability=stability, degenerate=degenerate))
    records.sort(key=lambda r: r.itinerary)
    return records


@dataclass(frozen=True)
class SaddleFrame:
    """Per-point invariant directions of a periodic saddle."""

    orbit: OrbitRecord
    mu_u: Scalar
    mu_s: Scalar
    dirs_u: tuple[tuple[Scalar, Scalar], ...]
    dirs_s: tuple[tuple[Scalar, Scalar], ...]


def orbit_manifold_seed(params: Params, orbit: OrbitRecord) -> SaddleFrame:
    """Exact stable/unstable directions at every point of a periodic saddle.

    Directions live in the quadratic extension generated by the cycle
    Jacobian's trace discriminant and are propagated around the cycle by the
    single-step Jacobians.
    """
    if orbit.stability is not Stability.SADDLE:
        raise ValueError("orbit is not a saddle")
    signs = tuple(1 if c == "R" else -1 for c in orbit.itinerary)
    if any(scalar_sign(p.x) == 0 for p in orbit.points):
        raise ValueError("orbit point on the fold line: directions undefined")
    m = cycle_jacobian(params, signs, start=0)
    tr = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    disc = tr * tr - 4 * det
    if scalar_sign(disc) <= 0:
        raise InconsistencyError("saddle with non-real multipliers")
    root = quad(0, 1, disc) if params.exact else float_sqrt(FloatScalar.of(disc))
    mu1 = (tr + root) / 2
    mu2 = (tr - root) / 2
    au = mu1 if scalar_sign(mu1) >= 0 else -mu1
    mu_u, mu_s = (mu1, mu2) if scalar_cmp(au, Fraction(1)) > 0 else (mu2, mu1)

    def eigvec(mu: Scalar) -> tuple[Scalar, Scalar]:
        if scalar_sign(m[0][1]) != 0:
            return (m[0][1], mu - m[0][0])
        if scalar_sign(m[1][0]) != 0:
            return (mu - m[1][1], m[1][0])
        return (Fraction(1), Fraction(0)) if scalar_sign(m[0][0] - mu) == 0 else (Fraction(0), Fraction(1))

    vu = [eigvec(mu_u)]
    vs = [eigvec(mu_s)]
    n = len(signs)
    for i in range(n - 1):
        j = step_jacobian(params, signs[i])
        vu.append(mat_vec(j, vu[-1]))
        vs.append(mat_vec(j, vs[-1]))
    return SaddleFrame(orbit=orbit, mu_u=mu_u, mu_s=mu_s,
                       dirs_u=tuple(vu), dirs_s=tuple(vs))
