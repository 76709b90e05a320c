import math
import random
from fractions import Fraction as F

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from lozilab.numeric import (
    FloatScalar,
    MixedRadicandError,
    Quad,
    UncertainSignError,
    float_interval,
    parse_rational,
    quad,
    scalar_arith,
    scalar_cmp,
    scalar_from_json,
    scalar_sign,
    scalar_to_float,
    scalar_to_json,
)

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=50)


def sympy_value(x):
    """Independent symbolic form of a scalar, for oracle comparisons."""
    if isinstance(x, Quad):
        return sympy.Rational(x.p) + sympy.Rational(x.q) * sympy.sqrt(x.d)
    return sympy.Rational(x)


def test_rational_add():
    assert scalar_arith(F(1, 2), F(1, 3), "add") == F(5, 6)


def test_conjugate_product():
    assert quad(1, 1, 3) * quad(1, -1, 3) == -2


def test_eigenvalue_product_matches_symbolic_expansion():
    # (-1-sqrt(3))/2 * (-1+sqrt(3))/2 at (a,b)=(1,1/2): oracle is sympy expansion
    lu = quad(F(-1, 2), F(-1, 2), 3)
    ls = quad(F(-1, 2), F(1, 2), 3)
    expected = sympy.expand(sympy_value(lu) * sympy_value(ls))
    assert expected == sympy.Rational(-1, 2)
    assert lu * ls == F(-1, 2)
    assert lu + ls == F(-1)


def test_sign_trivial_cases():
    assert scalar_sign(F(0)) == 0
    assert scalar_sign(quad(2, -1, 3)) == 1
    assert scalar_sign(quad(-2, 1, 3)) == -1


def test_sign_against_high_precision_floats():
    rng = random.Random(20260810)
    for _ in range(1000):
        p = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        q = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        delta = F(rng.randint(1, 10**6), rng.randint(1, 10**4))
        x = quad(p, q, delta)
        with mpmath.workprec(256):
            ref = (mpmath.mpf(p.numerator) / p.denominator
                   + mpmath.mpf(q.numerator) / q.denominator
                   * mpmath.sqrt(mpmath.mpf(delta.numerator) / delta.denominator))
            ref_sign = int(mpmath.sign(ref))
        assert scalar_sign(x) == ref_sign


def test_to_float_rational():
    got = scalar_to_float(F(10, 11), 53)
    assert got.value == 10 / 11
    assert got.err <= math.ulp(10 / 11)


def test_to_float_sqrt_delta_high_precision():
    # delta for (a,b)=(53/50, 24/25); oracle is mpmath's arbitrary-precision sqrt
    delta = F(53, 50) ** 2 + 4 * F(24, 25)
    assert delta == F(12409, 2500)
    x = quad(0, 1, delta)
    got = scalar_to_float(x, 256)
    with mpmath.workprec(300):
        ref = mpmath.sqrt(mpmath.mpf(12409)) / 50
    assert abs(got.value - ref) <= abs(ref) * mpmath.mpf(2) ** -250
    assert float(got.value) == pytest.approx(2.2279138223908035)


def test_to_float_passthrough():
    x = FloatScalar(1.5, 1e-12)
    assert scalar_to_float(x, 128) is x


def quads(delta):
    return st.builds(lambda p, q: quad(p, q, delta), rationals, rationals)


@settings(max_examples=200)
@given(st.one_of(rationals, quads(7)), st.one_of(rationals, quads(7)),
       st.one_of(rationals, quads(7)))
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x + (-y) == x - y
    if scalar_sign(y) != 0:
        assert (x / y) * y == x


@settings(max_examples=200)
@given(st.one_of(rationals, quads(5)), st.one_of(rationals, quads(5)))
def test_sign_multiplicative(x, y):
    assert scalar_sign(x * y) == scalar_sign(x) * scalar_sign(y)


def test_normalization_to_rational():
    assert quad(F(1, 2), 3, 0) == F(1, 2)
    assert not isinstance(quad(1, 1, F(9, 4)), Quad)
    assert quad(1, 1, F(9, 4)) == F(5, 2)
    assert isinstance(quad(0, F(1, 3), 2), Quad)
    # q cancelling in arithmetic collapses back to Fraction
    s = quad(1, 2, 5) + quad(2, -2, 5)
    assert s == F(3)


def test_radicand_canonicalization():
    # sqrt(12409/2500) == sqrt(12409*2500)/2500
    x = quad(0, 1, F(12409, 2500))
    y = quad(0, F(1, 2500), 12409 * 2500)
    assert x == y


def test_mixed_radicand_rejected():
    with pytest.raises(MixedRadicandError):
        quad(0, 1, 2) + quad(0, 1, 3)
    with pytest.raises(MixedRadicandError):
        quad(0, 1, 2) == quad(0, 1, 3)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        scalar_arith(quad(1, 1, 2), F(0), "div")


def test_sign_consistent_with_256bit_float():
    rng = random.Random(7)
    for _ in range(200):
        x = quad(F(rng.randint(-50, 50), rng.randint(1, 9)),
                 F(rng.randint(-50, 50), rng.randint(1, 9)), 7)
        f = scalar_to_float(x, 256)
        if abs(f.value) > f.err:
            assert scalar_sign(x) == (1 if f.value > 0 else -1)


def test_float_scalar_uncertain_sign():
    x = FloatScalar(1e-18, 1e-12)
    assert x.sign() == 0
    assert not x.sign_certain()
    with pytest.raises(UncertainSignError):
        scalar_sign(x, strict=True)
    y = FloatScalar(1.0, 1e-12) - FloatScalar(1.0, 1e-12)
    assert y.sign() == 0


def test_float_error_propagation_monotone():
    x = FloatScalar(1.25, 1e-10)
    y = FloatScalar(-0.75, 2e-10)
    assert (x + y).err >= max(x.err, y.err)
    assert (x * y).err >= 0
    with pytest.raises(UncertainSignError):
        x / FloatScalar(0.0, 1.0)


def test_interval_encloses_value():
    x = quad(F(1, 3), F(-2, 7), 11)
    lo, hi = float_interval(x)
    with mpmath.workprec(128):
        ref = mpmath.mpf(1) / 3 - mpmath.mpf(2) / 7 * mpmath.sqrt(11)
    assert lo <= ref <= hi


def test_scalar_cmp():
    assert scalar_cmp(quad(0, 1, 2), F(3, 2)) == -1
    assert scalar_cmp(quad(1, 1, 2), quad(1, 1, 2)) == 0
    assert scalar_cmp(F(5, 3), F(3, 2)) == 1
    assert scalar_cmp(quad(0, 1, 2), quad(0, 2, 2)) == -1


def test_parse_rational():
    assert parse_rational("1.06") == F(53, 50)
    assert parse_rational("0.5") == F(1, 2)
    assert parse_rational("24/25") == F(24, 25)
    assert parse_rational("-3") == F(-3)


def test_json_round_trip():
    for x in [F(53, 50), quad(F(1, 2), F(-3, 7), 13), FloatScalar(1.5, 1e-9)]:
        again = scalar_from_json(scalar_to_json(x))
        assert again == x
