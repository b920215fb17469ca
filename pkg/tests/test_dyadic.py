from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootclust.dyadic import (Ball, ComplexDyadic, DivisorStraddlesZero, Dyadic, ball_horner, div_ball,
                              reciprocal, round_to)

mantissas = st.integers(min_value=-(1 << 256), max_value=1 << 256)
exponents = st.integers(min_value=-300, max_value=300)
dyadics = st.builds(Dyadic, mantissas, exponents)
small = st.builds(Dyadic, st.integers(-(1 << 40), 1 << 40), st.integers(-40, 10))


def test_canonical_form():
    assert Dyadic(12, 0).mantissa == 3 and Dyadic(12, 0).exponent == 2
    assert Dyadic(0, 17) == Dyadic(0, 0)
    assert Dyadic(0, 17).exponent == 0
    assert Dyadic(-8, -3) == Dyadic(-1, 0)


@given(dyadics)
def test_canonical_mantissa_is_odd(d):
    assert d.mantissa % 2 == 1 or (d.mantissa == 0 and d.exponent == 0)


@given(dyadics, dyadics)
def test_exact_ring_operations(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb


@given(dyadics)
def test_string_round_trip(d):
    s = str(d)
    assert Dyadic.parse(s) == d


def test_parse_forms():
    assert Dyadic.parse("2^-20") == Dyadic(1, -20)
    assert Dyadic.parse("-3*2^5") == Dyadic(-96)
    assert Dyadic.parse("0.75") == Dyadic(3, -2)
    assert Dyadic.parse("12") == Dyadic(12)
    third = Dyadic.parse("0.3333333333333333", precision=30)
    assert abs(third.to_fraction() - Fraction(3333333333333333, 10 ** 16)) <= Fraction(1, 1 << 31)
    with pytest.raises(ValueError):
        Dyadic.parse("abc")


def test_round_to_examples():
    assert round_to(Dyadic(0), 10) == Dyadic(0)
    y = round_to(Dyadic(3, -2), 1)
    assert abs(y.to_fraction() - Fraction(3, 4)) <= Fraction(1, 2)
    assert y in (Dyadic(1, -1), Dyadic(1))
    third = Ball(ComplexDyadic(Dyadic.approx(Fraction(1, 3), 64)), Dyadic(1, -64))
    y = round_to(third, 10)
    assert abs(y.to_fraction() - Fraction(1, 3)) <= Fraction(1, 1 << 10)


def _min_mantissa_bits_brute(x: Fraction, L: int) -> int:
    """Smallest mantissa bit length of any dyadic within 2^-L of x (brute force)."""
    tol = Fraction(1, 1 << L)
    if abs(x) <= tol:
        return 0
    for bits in range(1, 80):
        # candidates m * 2^e with |m| < 2^bits; scan exponents near x's scale
        for e in range(-L - 2, 64):
            step = Fraction(2) ** e
            m = round(x / step)
            for mm in (m - 1, m, m + 1):
                if mm and abs(mm).bit_length() <= bits and abs(mm * step - x) <= tol:
                    return bits
    raise AssertionError("no candidate found")


@settings(max_examples=200)
@given(small, st.integers(1, 40))
def test_round_to_bound_and_minimality(x, L):
    y = round_to(x, L)
    assert abs(y.to_fraction() - x.to_fraction()) <= Fraction(1, 1 << L)
    assert y.bit_length() == _min_mantissa_bits_brute(x.to_fraction(), L)


@given(st.builds(Dyadic, st.integers(1, 1 << 200), exponents), st.integers(8, 200))
def test_reciprocal_error_bound(d, bits):
    y, err = reciprocal(d, bits)
    assert abs(1 / d.to_fraction() - y.to_fraction()) <= err.to_fraction()
    assert err.to_fraction() * d.to_fraction() <= Fraction(1, 1 << (bits - 2))


def test_ball_horner_examples():
    b = ball_horner([-2, 0, 1], Dyadic(3, -1))
    assert b.center == ComplexDyadic(Dyadic(1, -2)) and b.radius == Dyadic(0)
    assert ball_horner([1], Dyadic(5)).center == ComplexDyadic(1)
    b = ball_horner([Ball(ComplexDyadic(1), Dyadic(1, -20)), 1], 1)
    assert b.contains(2)
    assert b.radius >= Dyadic(1, -20)


def test_div_ball_examples():
    q = div_ball(1, -2)
    assert q.contains(Fraction(-1, 2))
    q = div_ball(1, Ball(ComplexDyadic(1), Dyadic(1, -1)))
    for v in (Fraction(2, 3), Fraction(1), Fraction(2)):
        assert q.contains(v)
    with pytest.raises(DivisorStraddlesZero):
        div_ball(1, Ball(ComplexDyadic(Dyadic.approx(Fraction(1, 10), 30)), Dyadic.approx(Fraction(1, 5), 30)))


def _gauss(draw_re, draw_im):
    return st.builds(lambda a, b: ComplexDyadic(a, b), draw_re, draw_im)


points = _gauss(small, small)
radii = st.builds(Dyadic, st.integers(0, 1 << 20), st.integers(-50, -10))


def _sample_in(ball: Ball, t: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    # a point of the ball at fraction (tx, ty) of the inscribed square
    cr, ci = ball.center.to_fractions()
    r = ball.radius.to_fraction() * Fraction(7, 10)
    return cr + r * t[0], ci + r * t[1]


def _cmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


fracs = st.fractions(min_value=-1, max_value=1, max_denominator=64)


@settings(max_examples=300)
@given(points, radii, points, radii, points, radii, fracs, fracs, fracs, fracs, fracs, fracs)
def test_ball_containment_composed(c1, r1, c2, r2, c3, r3, t1, t2, t3, t4, t5, t6):
    a, b, c = Ball(c1, r1), Ball(c2, r2), Ball(c3, r3)
    xa, xb, xc = _sample_in(a, (t1, t2)), _sample_in(b, (t3, t4)), _sample_in(c, (t5, t6))
    expr = (a * b + c) * (a - c)
    exact = _cmul((_cmul(xa, xb)[0] + xc[0], _cmul(xa, xb)[1] + xc[1]), (xa[0] - xc[0], xa[1] - xc[1]))
    assert expr.contains(exact)
    if b.excludes_zero() and b.center.abs_lower().to_fraction() > 2 * b.radius.to_fraction():
        q = div_ball(a, b)
        den = xb[0] ** 2 + xb[1] ** 2
        exact_q = _cmul(xa, (xb[0] / den, -xb[1] / den))
        assert q.contains(exact_q)


@given(st.lists(st.tuples(points, radii), min_size=1, max_size=6), points, radii, fracs, fracs)
def test_ball_horner_containment(coeffs, z, rz, tx, ty):
    balls = [Ball(c, r) for c, r in coeffs]
    zb = Ball(z, rz)
    exact_z = _sample_in(zb, (tx, ty))
    acc = (Fraction(0), Fraction(0))
    for bl in reversed(balls):
        acc = _cmul(acc, exact_z)
        cr, ci = bl.center.to_fractions()
        acc = (acc[0] + cr, acc[1] + ci)
    assert ball_horner(balls, zb).contains(acc)
