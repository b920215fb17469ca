"""Exact dyadic numbers and complex balls.

A :class:`Dyadic` is ``mantissa * 2**exponent`` with an arbitrary size
integer mantissa.  Addition, subtraction and multiplication are exact.
A :class:`Ball` is a complex dyadic center with a dyadic radius; every
operation on balls returns a ball containing all results obtainable from
exact values inside the operands.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Dyadic",
    "ComplexDyadic",
    "Ball",
    "DivisorStraddlesZero",
    "round_to",
    "ball_horner",
    "div_ball",
    "reciprocal",
]

RADIUS_BITS = 16


class DivisorStraddlesZero(ArithmeticError):
    """The divisor ball contains zero; retry with a tighter ball."""


def _ceil_shift_right(m: int, k: int) -> int:
    """ceil(m / 2**k) for m >= 0, k >= 0."""
    return -((-m) >> k)


class Dyadic:
    """An exact binary floating point number ``mantissa * 2**exponent``.

    Values are canonical: the mantissa is odd, or the value is zero with
    exponent 0.  Instances are immutable and hashable.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        mantissa = int(mantissa)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                mantissa >>= tz
                exponent += tz
        self.mantissa = mantissa
        self.exponent = exponent

    # construction -------------------------------------------------------

    @classmethod
    def coerce(cls, x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, float):
            num, den = x.as_integer_ratio()
            return cls(num, -(den.bit_length() - 1))
        if isinstance(x, (Fraction, Rational)):
            x = Fraction(x)
            den = x.denominator
            if den & (den - 1):
                raise ValueError(f"{x} is not a dyadic rational")
            return cls(x.numerator, -(den.bit_length() - 1))
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Dyadic")

    @classmethod
    def approx(cls, x, L: int) -> "Dyadic":
        """Nearest multiple of ``2**-L`` to the rational ``x``."""
        x = Fraction(x)
        if L >= 0:
            scaled = x * (1 << L)
        else:
            scaled = x / (1 << -L)
        return cls(round(scaled), -L)

    @classmethod
    def parse(cls, s: str, precision: int = 64) -> "Dyadic":
        """Parse ``"m*2^e"``, ``"2^e"``, an integer or a decimal string.

        Decimal strings that are not dyadic are rounded to the nearest
        multiple of ``2**-precision``.
        """
        s = s.strip()
        m = _DYADIC_RE.fullmatch(s)
        if m:
            mant = int(m.group(1)) if m.group(1) is not None else (-1 if m.group(2) == "-" else 1)
            return cls(mant, int(m.group(3)))
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a dyadic or decimal number: {s!r}") from exc
        den = value.denominator
        if den & (den - 1) == 0:
            return cls.coerce(value)
        return cls.approx(value, precision)

    # conversion ---------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return math.ldexp(float(self.mantissa), self.exponent) if self.mantissa.bit_length() < 1000 \
            else float(self.to_fraction())

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def bit_length(self) -> int:
        return self.mantissa.bit_length()

    def magnitude_log2(self) -> int:
        """Smallest ``k`` with ``|self| < 2**k`` (undefined for zero)."""
        return self.mantissa.bit_length() + self.exponent

    def scaled_int(self, e: int) -> int:
        """The integer ``self / 2**e``; requires ``e <= self.exponent``."""
        if self.mantissa == 0:
            return 0
        return self.mantissa << (self.exponent - e)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _dy(other)
        if other is NotImplemented:
            return other
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e = min(self.exponent, other.exponent)
        return Dyadic((self.mantissa << (self.exponent - e)) + (other.mantissa << (other.exponent - e)), e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self):
        return self

    def __abs__(self):
        return self if self.mantissa >= 0 else -self

    def __sub__(self, other):
        other = _dy(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _dy(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _dy(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def ldexp(self, k: int) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent + k) if self.mantissa else self

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def round_up(self, bits: int = RADIUS_BITS) -> "Dyadic":
        """Smallest dyadic >= self with at most ``bits`` mantissa bits (self >= 0)."""
        extra = self.mantissa.bit_length() - bits
        if extra <= 0:
            return self
        return Dyadic(_ceil_shift_right(self.mantissa, extra), self.exponent + extra)

    def round_down(self, bits: int = RADIUS_BITS) -> "Dyadic":
        extra = self.mantissa.bit_length() - bits
        if extra <= 0:
            return self
        return Dyadic(self.mantissa >> extra, self.exponent + extra)

    # comparison ---------------------------------------------------------

    def _cmp(self, other) -> int:
        d = self - other
        return d.sign()

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    def __lt__(self, other):
        other = _dy(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) < 0

    def __le__(self, other):
        other = _dy(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) <= 0

    def __gt__(self, other):
        other = _dy(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) > 0

    def __ge__(self, other):
        other = _dy(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) >= 0

    def __bool__(self):
        return self.mantissa != 0


_DYADIC_RE = re.compile(r"(?:([+-]?\d+)\s*\*\s*|([+-])?)2\s*\^\s*\(?\s*([+-]?\d+)\s*\)?")


def _dy(x):
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x, 0)
    return NotImplemented


ZERO = Dyadic(0)
ONE = Dyadic(1)


class ComplexDyadic:
    """A complex number with dyadic real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=ZERO, im=ZERO):
        self.re = Dyadic.coerce(re)
        self.im = Dyadic.coerce(im)

    @classmethod
    def coerce(cls, x) -> "ComplexDyadic":
        if isinstance(x, ComplexDyadic):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag)
        if isinstance(x, tuple):
            return cls(*x)
        return cls(x, 0)

    def to_fractions(self) -> tuple[Fraction, Fraction]:
        return self.re.to_fraction(), self.im.to_fraction()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ComplexDyadic({self.re!s}, {self.im!s})"

    def __eq__(self, other):
        if not isinstance(other, ComplexDyadic):
            try:
                other = ComplexDyadic.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = ComplexDyadic.coerce(other)
        return ComplexDyadic(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexDyadic.coerce(other)
        return ComplexDyadic(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexDyadic.coerce(other) - self

    def __neg__(self):
        return ComplexDyadic(-self.re, -self.im)

    def __mul__(self, other):
        other = ComplexDyadic.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexDyadic(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conj(self):
        return ComplexDyadic(self.re, -self.im)

    def ldexp(self, k: int):
        return ComplexDyadic(self.re.ldexp(k), self.im.ldexp(k))

    def norm2(self) -> Dyadic:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def abs_upper(self, bits: int = 32) -> Dyadic:
        return sqrt_upper(self.norm2(), bits)

    def abs_lower(self, bits: int = 32) -> Dyadic:
        return sqrt_lower(self.norm2(), bits)


def _sqrt_parts(x: Dyadic, bits: int):
    m, e = x.mantissa, x.exponent
    if m < 0:
        raise ValueError("square root of a negative number")
    # make the exponent even and give the mantissa 2*bits of room
    t = max(0, 2 * bits - m.bit_length())
    if (e - t) % 2:
        t += 1
    return m << t, (e - t) // 2


def sqrt_upper(x: Dyadic, bits: int = 32) -> Dyadic:
    if not x:
        return ZERO
    m, half = _sqrt_parts(x, bits)
    s = math.isqrt(m)
    if s * s != m:
        s += 1
    return Dyadic(s, half)


def sqrt_lower(x: Dyadic, bits: int = 32) -> Dyadic:
    if not x:
        return ZERO
    m, half = _sqrt_parts(x, bits)
    return Dyadic(math.isqrt(m), half)


def round_to(x, L: int) -> Dyadic:
    """Return the dyadic with the shortest mantissa within ``2**-L`` of ``x``.

    ``x`` may be a :class:`Dyadic` or a real :class:`Ball`; for a ball the
    result is within ``2**-L`` of every real value the ball contains.
    """
    if L < 1:
        raise ValueError("L must be positive")
    if isinstance(x, Ball):
        c, r = x.center.re, x.radius
        if x.center.im:
            raise ValueError("round_to expects a real ball")
    else:
        c, r = Dyadic.coerce(x), ZERO
    tol = Dyadic(1, -L) - r
    if tol.sign() < 0:
        raise ValueError("ball radius exceeds the requested tolerance")
    lo, hi = c - tol, c + tol
    if lo.sign() <= 0 <= hi.sign():
        return ZERO
    # pick the coarsest grid 2**k holding a point of [lo, hi]
    e = min(lo.exponent, hi.exponent)
    a, b = lo.scaled_int(e), hi.scaled_int(e)
    k = (b - a).bit_length() + 1
    while k > 0:
        q = -((-a) >> k)  # ceil(a / 2**k)
        if q << k <= b:
            return Dyadic(q, e + k)
        k -= 1
    return Dyadic(a, e)


def reciprocal(d: Dyadic, bits: int) -> tuple[Dyadic, Dyadic]:
    """Approximate ``1/d`` for ``d > 0`` by Newton-Raphson.

    Returns ``(y, err)`` with ``|1/d - y| <= err``; the relative error of
    ``y`` is about ``2**-bits``.
    """
    if d.sign() <= 0:
        raise ValueError("reciprocal needs a positive argument")
    m, e = d.mantissa, d.exponent
    mb = m.bit_length()
    # seed with 52 bits of 2**mb / m, then double the bits per iteration
    y = Dyadic((1 << (mb + 52)) // m, -52 - mb - e)
    prec = 52
    two = Dyadic(2)
    while prec < bits + 8:
        prec = min(2 * prec, bits + 8)
        y = (y * (two - d * y)).round_down(prec + 4)
    resid = abs(ONE - d * y)
    if resid >= Dyadic(1, -1):
        raise ArithmeticError("reciprocal iteration diverged")
    # |1/d - y| = resid/d = resid * y / (1 - (1 - d*y)) <= 2 * resid * y
    err = (resid * y).ldexp(1).round_up()
    return y, err


def div_upper(a: Dyadic, b: Dyadic) -> Dyadic:
    """An upper bound for ``a/b`` with ``a >= 0`` and ``b > 0``."""
    if not a:
        return ZERO
    y, err = reciprocal(b, RADIUS_BITS + 8)
    return (a * (y + err)).round_up()


class Ball:
    """A closed complex disc ``{center + t : |t| <= radius}``.

    Radii are kept as short dyadics rounded upward.
    """

    __slots__ = ("center", "radius")

    def __init__(self, center, radius=ZERO):
        self.center = ComplexDyadic.coerce(center)
        radius = Dyadic.coerce(radius)
        if radius.sign() < 0:
            raise ValueError("negative radius")
        self.radius = radius.round_up()

    @classmethod
    def exact(cls, x) -> "Ball":
        return cls(x, ZERO)

    def __repr__(self):
        return f"Ball({self.center!r}, {self.radius!s})"

    def mag_upper(self) -> Dyadic:
        return (self.center.abs_upper() + self.radius).round_up(RADIUS_BITS + 16)

    def mag_lower(self) -> Dyadic:
        lo = self.center.abs_lower() - self.radius
        return lo if lo.sign() > 0 else ZERO

    def contains(self, value) -> bool:
        """Exact membership test for a complex rational ``(re, im)`` or number."""
        if isinstance(value, tuple):
            vr, vi = Fraction(value[0]), Fraction(value[1])
        elif isinstance(value, complex):
            vr, vi = Fraction(value.real), Fraction(value.imag)
        elif isinstance(value, ComplexDyadic):
            vr, vi = value.to_fractions()
        else:
            vr, vi = Fraction(Dyadic.coerce(value).to_fraction() if isinstance(value, Dyadic) else value), Fraction(0)
        cr, ci = self.center.to_fractions()
        r = self.radius.to_fraction()
        return (vr - cr) ** 2 + (vi - ci) ** 2 <= r * r

    def excludes_zero(self) -> bool:
        return self.center.norm2() > self.radius * self.radius

    def __add__(self, other):
        other = _ball(other)
        return Ball(self.center + other.center, self.radius + other.radius)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ball(other)
        return Ball(self.center - other.center, self.radius + other.radius)

    def __rsub__(self, other):
        return _ball(other) - self

    def __neg__(self):
        return Ball(-self.center, self.radius)

    def __mul__(self, other):
        other = _ball(other)
        c = self.center * other.center
        if not self.radius and not other.radius:
            return Ball(c, ZERO)
        r = (self.center.abs_upper() * other.radius
             + self.radius * other.center.abs_upper()
             + self.radius * other.radius)
        return Ball(c, r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div_ball(self, _ball(other))


def _ball(x) -> Ball:
    return x if isinstance(x, Ball) else Ball.exact(x)


def ball_horner(coeffs, z) -> Ball:
    """Evaluate ``sum(coeffs[i] * z**i)`` in ball arithmetic."""
    coeffs = [_ball(c) for c in coeffs]
    if not coeffs:
        raise ValueError("empty coefficient sequence")
    z = _ball(z)
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    return acc


def div_ball(a, b, bits: int = 64) -> Ball:
    """Ball enclosing ``a/b`` for all exact values in ``a`` and ``b``.

    Raises :class:`DivisorStraddlesZero` when ``b`` may contain 0.
    """
    a, b = _ball(a), _ball(b)
    if not b.excludes_zero():
        raise DivisorStraddlesZero(f"divisor ball {b!r} contains 0")
    c, rho = b.center, b.radius
    n2 = c.norm2()
    y, _ = reciprocal(n2, bits)
    q = c.conj() * ComplexDyadic(y)
    q = ComplexDyadic(q.re.round_down(bits + 8), q.im.round_down(bits + 8))
    # |1/c - q| = |1 - c*q| / |c|, with the residual computed exactly
    resid_q = ComplexDyadic(1) - c * q
    q_err = div_upper(resid_q.abs_upper(), c.abs_lower()) if not resid_q.is_zero() else ZERO
    if rho:
        c_lo = c.abs_lower()
        gap = c_lo - rho
        if gap.sign() <= 0:
            raise DivisorStraddlesZero(f"divisor ball {b!r} too close to 0")
        spread = div_upper(rho, (c_lo * gap).round_down(RADIUS_BITS + 16))
    else:
        spread = ZERO
    inv = Ball(q, q_err + spread)
    return a * inv
