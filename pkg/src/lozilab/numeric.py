"""Exact scalar tower: rationals, quadratic extensions Q(sqrt(d)), checked floats.

Every geometric predicate in this package reduces to a sign query on one of
these scalar kinds.  Rational and quadratic scalars are exact; the float kind
carries a propagated error bound and refuses to decide signs it cannot
justify.  All values are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
import operator
from fractions import Fraction
from typing import Union

import mpmath


class MixedRadicandError(TypeError):
    """Arithmetic between quadratic scalars over different radicands."""


class UncertainSignError(ArithmeticError):
    """A float-mode sign query fell inside its own error bound."""


class BitBudgetError(RuntimeError):
    """An exact computation exceeded the configured bit-length budget."""


Rational = Fraction

_ULP_SLOP = 2  # outward-rounding steps applied after each float interval op


def parse_rational(text: str) -> Fraction:
    """Parse a decimal or 'num/den' string exactly (no binary round trip)."""
    return Fraction(str(text).strip())


def _next_down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _next_up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _widen(lo: float, hi: float) -> tuple[float, float]:
    for _ in range(_ULP_SLOP):
        lo = _next_down(lo)
        hi = _next_up(hi)
    return lo, hi


def _iv_add(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    return _widen(a[0] + b[0], a[1] + b[1])


def _iv_mul(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return _widen(min(products), max(products))


def _fraction_interval(x: Fraction) -> tuple[float, float]:
    v = float(x)
    if math.isinf(v):
        return (v, v)
    return (_next_down(v), _next_up(v))


def _sqrt_interval(d: int) -> tuple[float, float]:
    v = math.sqrt(d)
    return _widen(v, v)


def is_square(x: Fraction) -> bool:
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def rational_sqrt(x: Fraction) -> Fraction:
    if not is_square(x):
        raise ValueError(f"{x} is not a rational square")
    return Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator))


def quad(p, q, delta) -> "Scalar":
    """Build p + q*sqrt(delta), normalizing to a plain Fraction when possible.

    delta may be any nonnegative rational; it is canonicalized to the integer
    num*den (rescaling q), and perfect squares fold into the rational part.
    """
    p = Fraction(p)
    q = Fraction(q)
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError("negative radicand")
    if q == 0 or delta == 0:
        return p
    if is_square(delta):
        return p + q * rational_sqrt(delta)
    d_int = delta.numerator * delta.denominator
    q = q / delta.denominator
    return Quad(p, q, d_int)


class Quad:
    """p + q*sqrt(d) with rational p, q and a fixed non-square integer d > 0.

    Instances always have q != 0; rational values are represented as plain
    Fractions.  Mixing different d in one expression raises
    MixedRadicandError, matching the one-radicand-per-run contract.
    """

    __slots__ = ("p", "q", "d", "_lo", "_hi")

    def __init__(self, p: Fraction, q: Fraction, d: int):
        self.p = p
        self.q = q
        self.d = d
        lo, hi = _iv_add(_fraction_interval(p), _iv_mul(_fraction_interval(q), _sqrt_interval(d)))
        self._lo = lo
        self._hi = hi

    def __repr__(self) -> str:
        return f"Quad({self.p!r}, {self.q!r}, {self.d})"

    def __str__(self) -> str:
        return f"{self.p} + {self.q}*sqrt({self.d})"

    def _coerce(self, other) -> "Quad | None":
        if isinstance(other, Quad):
            if other.d != self.d:
                raise MixedRadicandError(f"radicands differ: {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(Fraction(other), Fraction(0), self.d)
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, Quad):
            if other.d != self.d:
                raise MixedRadicandError(f"radicands differ: {self.d} vs {other.d}")
            return self.p == other.p and self.q == other.q
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __neg__(self) -> "Quad":
        return Quad(-self.p, -self.q, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q = self.q + o.q
        if q == 0:
            return self.p + o.p
        return Quad(self.p + o.p, q, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p * o.p + self.q * o.q * self.d
        q = self.p * o.q + self.q * o.p
        if q == 0:
            return p
        return Quad(p, q, self.d)

    __rmul__ = __mul__

    def _inverse(self) -> "Quad":
        norm = self.p * self.p - self.q * self.q * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero quadratic scalar")
        return Quad(self.p / norm, -self.q / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.q == 0:
            if o.p == 0:
                raise ZeroDivisionError("division by zero")
            q = self.q / o.p
            if q == 0:
                return self.p / o.p
            return Quad(self.p / o.p, q, self.d)
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self._inverse() ** (-n)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while n:
            if n & 1:
                result = base * result
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        """Exact sign via the float interval filter, falling back to integers."""
        if self._lo > 0.0:
            return 1
        if self._hi < 0.0:
            return -1
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sp >= 0 and sq > 0:
            return 1
        if sp <= 0 and sq < 0:
            return -1
        # opposite signs: compare p^2 against q^2 d, side of the larger wins
        diff = self.p * self.p - self.q * self.q * self.d
        s = (diff > 0) - (diff < 0)
        return s if sp > 0 else -s

    def conjugate(self) -> "Quad":
        return Quad(self.p, -self.q, self.d)

    def interval(self) -> tuple[float, float]:
        return (self._lo, self._hi)

    def __float__(self) -> float:
        return 0.5 * (self._lo + self._hi)

    def _diff_sign(self, other) -> "int | None":
        o = self._coerce(other)
        if o is None:
            return None
        diff = self - o
        if isinstance(diff, Quad):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        s = self._diff_sign(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._diff_sign(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._diff_sign(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._diff_sign(other)
        return NotImplemented if s is None else s >= 0


class FloatScalar:
    """A float with a propagated absolute error bound.

    Sign queries inside the bound are flagged uncertain rather than resolved.
    The value may be a Python float or an mpmath.mpf for higher precision.
    """

    __slots__ = ("value", "err")

    def __init__(self, value, err: float = 0.0):
        self.value = value
        self.err = abs(err)

    def __repr__(self) -> str:
        return f"FloatScalar({self.value!r}, err={self.err!r})"

    @staticmethod
    def of(x) -> "FloatScalar":
        if isinstance(x, FloatScalar):
            return x
        if isinstance(x, (int, float)):
            # a literal float input is taken as exactly that binary value
            return FloatScalar(float(x), 0.0)
        if isinstance(x, Fraction):
            v = float(x)
            return FloatScalar(v, math.ulp(abs(v)))
        if isinstance(x, Quad):
            lo, hi = x.interval()
            mid = 0.5 * (lo + hi)
            return FloatScalar(mid, 0.5 * (hi - lo) + math.ulp(abs(mid)))
        raise TypeError(f"cannot coerce {type(x).__name__} to FloatScalar")

    def _binary(self, other, fn):
        try:
            o = FloatScalar.of(other)
        except TypeError:
            return NotImplemented
        return fn(self, o)

    def __add__(self, other):
        return self._binary(other, lambda a, b: FloatScalar(
            a.value + b.value, a.err + b.err + math.ulp(abs(float(a.value + b.value)))))

    __radd__ = __add__

    def __neg__(self):
        return FloatScalar(-self.value, self.err)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: FloatScalar(
            a.value - b.value, a.err + b.err + math.ulp(abs(float(a.value - b.value)))))

    def __rsub__(self, other):
        neg = -self
        return neg + other

    def __mul__(self, other):
        def mul(a, b):
            v = a.value * b.value
            err = (abs(float(a.value)) * b.err + abs(float(b.value)) * a.err
                   + a.err * b.err + math.ulp(abs(float(v))))
            return FloatScalar(v, err)
        return self._binary(other, mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        def div(a, b):
            if abs(float(b.value)) <= b.err:
                raise UncertainSignError("division by a possibly-zero float scalar")
            v = a.value / b.value
            denom = abs(float(b.value)) - b.err
            err = (a.err + abs(float(v)) * b.err) / denom + math.ulp(abs(float(v)))
            return FloatScalar(v, err)
        return self._binary(other, div)

    def __rtruediv__(self, other):
        try:
            o = FloatScalar.of(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __abs__(self):
        return FloatScalar(abs(self.value), self.err)

    def __float__(self) -> float:
        return float(self.value)

    def __eq__(self, other):
        if isinstance(other, FloatScalar):
            return self.value == other.value and self.err == other.err
        return NotImplemented

    def __hash__(self):
        return hash((float(self.value), self.err))

    def sign(self) -> int:
        if abs(float(self.value)) <= self.err:
            return 0
        return 1 if float(self.value) > 0 else -1

    def sign_certain(self) -> bool:
        return abs(float(self.value)) > self.err or (self.value == 0 and self.err == 0)


Scalar = Union[int, Fraction, Quad, FloatScalar]


def scalar_sign(x: Scalar, strict: bool = False) -> int:
    """Three-way sign of a scalar.

    Exact kinds always decide.  For floats, 0 means the value sits within its
    error bound; with strict=True that uncertainty raises instead of leaking
    into a branch decision.
    """
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, Quad):
        return x.sign()
    if isinstance(x, FloatScalar):
        if strict and not x.sign_certain():
            raise UncertainSignError(f"sign of {x!r} is uncertain")
        return x.sign()
    raise TypeError(f"not a scalar: {type(x).__name__}")


def sign_certain(x: Scalar) -> bool:
    if isinstance(x, FloatScalar):
        return x.sign_certain()
    return True


def float_interval(x: Scalar) -> tuple[float, float]:
    if isinstance(x, int):
        return (float(x), float(x))
    if isinstance(x, Fraction):
        return _fraction_interval(x)
    if isinstance(x, Quad):
        return x.interval()
    if isinstance(x, FloatScalar):
        v = float(x.value)
        return (v - x.err, v + x.err)
    raise TypeError(f"not a scalar: {type(x).__name__}")


def scalar_cmp(a: Scalar, b: Scalar, strict: bool = False) -> int:
    """Compare scalars; float intervals filter before any exact subtraction."""
    alo, ahi = float_interval(a)
    blo, bhi = float_interval(b)
    if ahi < blo:
        return -1
    if alo > bhi:
        return 1
    return scalar_sign(a - b, strict=strict)


def scalar_arith(x: Scalar, y: Scalar, op: str) -> Scalar:
    try:
        fn = {"add": operator.add, "sub": operator.sub,
              "mul": operator.mul, "div": operator.truediv}[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    return fn(x, y)


def scalar_bits(x: Scalar) -> int:
    if isinstance(x, int):
        return x.bit_length()
    if isinstance(x, Fraction):
        return max(x.numerator.bit_length(), x.denominator.bit_length())
    if isinstance(x, Quad):
        return max(scalar_bits(x.p), scalar_bits(x.q))
    return 53


def scalar_to_float(x: Scalar, precision_bits: int = 53) -> FloatScalar:
    """Round a scalar to the requested binary precision (>= 53 bits)."""
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    if isinstance(x, FloatScalar):
        return x
    if isinstance(x, int):
        x = Fraction(x)
    if precision_bits == 53 and isinstance(x, Fraction):
        v = float(x)
        return FloatScalar(v, math.ulp(abs(v)))
    with mpmath.workprec(precision_bits + 40):
        if isinstance(x, Fraction):
            val = mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
        else:
            val = (mpmath.mpf(x.p.numerator) / mpmath.mpf(x.p.denominator)
                   + mpmath.mpf(x.q.numerator) / mpmath.mpf(x.q.denominator)
                   * mpmath.sqrt(mpmath.mpf(x.d)))
    with mpmath.workprec(precision_bits):
        val = +val
    if precision_bits == 53:
        v = float(val)
        return FloatScalar(v, math.ulp(abs(v)))
    err = abs(val) * mpmath.mpf(2) ** (1 - precision_bits)
    return FloatScalar(val, float(err))


def float_sqrt(x: FloatScalar) -> FloatScalar:
    """Square root of a float scalar; requires the value certainly positive."""
    v = float(x.value)
    if v - x.err <= 0:
        raise UncertainSignError("sqrt of a possibly-nonpositive float scalar")
    r = math.sqrt(v)
    err = x.err / (2 * math.sqrt(v - x.err)) + 2 * math.ulp(r)
    return FloatScalar(r, err)


def scalar_to_json(x: Scalar) -> dict:
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return {"p": str(x), "q": "0", "delta": "0"}
    if isinstance(x, Quad):
        return {"p": str(x.p), "q": str(x.q), "delta": str(x.d)}
    if isinstance(x, FloatScalar):
        return {"value": repr(float(x.value)), "err": repr(float(x.err))}
    raise TypeError(f"not a scalar: {type(x).__name__}")


def scalar_from_json(obj: dict) -> Scalar:
    if "value" in obj:
        return FloatScalar(float(obj["value"]), float(obj["err"]))
    return quad(Fraction(obj["p"]), Fraction(obj["q"]), Fraction(obj["delta"]) if obj["delta"] != "0" else 0)
