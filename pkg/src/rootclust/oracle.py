"""Oracle polynomials and the transforms the counting tests run on.

Coefficients are :class:`OracularNumber` objects: they answer a precision
request ``L`` with a complex dyadic within ``2**-L`` of the exact value.
:func:`localize` turns ``F`` and a disc ``(m, r)`` into the ball polynomial
``F(m + r z)``; :func:`graeffe_step` squares its roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

from .dyadic import Ball, ComplexDyadic, Dyadic

__all__ = [
    "OracularNumber",
    "OraclePolynomial",
    "LocalPolynomial",
    "ZeroLeadingCoefficient",
    "PrecisionExhausted",
    "from_exact",
    "from_roots",
    "normalize_leading",
    "localize",
    "graeffe_step",
    "graeffe_iterate",
    "graeffe_count",
    "gaussian_rational",
]

GaussianRational = tuple[Fraction, Fraction]


class ZeroLeadingCoefficient(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    """A soft test could not decide below the precision ceiling.

    Retriable: a larger ceiling may succeed.
    """

    def __init__(self, message: str, *, bits: int | None = None, context: dict | None = None):
        super().__init__(message)
        self.bits = bits
        self.context = dict(context or {})


def gaussian_rational(x) -> GaussianRational:
    """Coerce ``x`` into an exact complex rational ``(re, im)``."""
    if isinstance(x, tuple) and len(x) == 2:
        return _real_rational(x[0]), _real_rational(x[1])
    if isinstance(x, ComplexDyadic):
        return x.to_fractions()
    if isinstance(x, complex):
        return Fraction(x.real), Fraction(x.imag)
    return _real_rational(x), Fraction(0)


def _real_rational(x) -> Fraction:
    if isinstance(x, Dyadic):
        return x.to_fraction()
    if isinstance(x, (int, float, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


class OracularNumber:
    """A complex number known through an approximation oracle.

    ``oracle(L)`` must return a :class:`ComplexDyadic` within ``2**-L`` of
    the represented value, and must be a pure function of ``L``.
    """

    __slots__ = ("oracle", "tau")

    def __init__(self, oracle: Callable[[int], ComplexDyadic], tau: int = 0):
        self.oracle = oracle
        self.tau = tau

    def __call__(self, L: int) -> ComplexDyadic:
        return self.oracle(L)

    @classmethod
    def exact(cls, x) -> "OracularNumber":
        re, im = gaussian_rational(x)
        size = max(abs(re), abs(im))
        tau = max(0, math.ceil(math.log2(size + 1))) + 1 if size else 0

        def oracle(L: int) -> ComplexDyadic:
            # error per part <= 2**-(L+2), so |error| < 2**-L
            return ComplexDyadic(Dyadic.approx(re, L + 1), Dyadic.approx(im, L + 1))

        return cls(oracle, tau)

    def scaled(self, s: int) -> "OracularNumber":
        """The oracular number ``2**s * self``."""
        base = self.oracle

        def oracle(L: int) -> ComplexDyadic:
            return base(max(1, L + s)).ldexp(s)

        return OracularNumber(oracle, max(0, self.tau + s))


@dataclass(frozen=True, eq=False)
class OraclePolynomial:
    """``F(z) = sum(coefficients[i] * z**i)`` with oracular coefficients.

    ``tau_f`` bounds ``log2 ||F||_inf``.  ``scale_log2`` records the power of
    two applied by :func:`normalize_leading`.
    """

    coefficients: tuple[OracularNumber, ...]
    tau_f: int
    lcf_scaled: bool = False
    scale_log2: int = 0
    # exact roots for validation, when built by from_roots; the solver never reads them
    _roots: tuple | None = field(default=None, repr=False)
    _exact: tuple | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def approximations(self, L: int) -> list[ComplexDyadic]:
        return [c(L) for c in self.coefficients]

    def gaussian_approx(self, L: int) -> tuple[list[int], list[int], int, int]:
        """Integer approximations ``(re, im, exp, unit)`` at precision ``L``.

        Coefficient ``i`` is ``(re[i] + 1j*im[i]) * 2**exp`` with error at
        most ``unit * 2**exp`` (``unit = 2**(-L - exp)``).
        """
        L = -(-L // 16) * 16
        hit = self._cache.get(L)
        if hit is not None:
            return hit
        approx = self.approximations(L)
        exps = [-L]
        for a in approx:
            if a.re:
                exps.append(a.re.exponent)
            if a.im:
                exps.append(a.im.exponent)
        e = min(exps)
        re = [a.re.scaled_int(e) for a in approx]
        im = [a.im.scaled_int(e) for a in approx]
        result = (re, im, e, 1 << (-L - e))
        if len(self._cache) > 64:
            self._cache.clear()
        self._cache[L] = result
        return result

    def evaluate(self, z, L: int = 128) -> Ball:
        """Ball enclosing ``F(z)`` for a dyadic point ``z``."""
        p = localize(self, ComplexDyadic.coerce(z), Dyadic(1), L)
        return p.ball(0)


def _tau_from(coefficients: Sequence[OracularNumber]) -> int:
    bound = Fraction(0)
    for c in coefficients:
        a = c(4)
        bound = max(bound, abs(a.re.to_fraction()) + abs(a.im.to_fraction()))
    bound += Fraction(1, 16)
    t = 0
    while Fraction(2) ** t < bound:
        t += 1
    return t


def from_exact(coeffs) -> OraclePolynomial:
    """Oracle polynomial from exact coefficients, lowest degree first."""
    exact = tuple(gaussian_rational(c) for c in coeffs)
    if len(exact) < 2 or exact[-1] == (0, 0):
        raise ZeroLeadingCoefficient("leading coefficient is zero (or degree < 1)")
    nums = tuple(OracularNumber.exact(c) for c in exact)
    return OraclePolynomial(nums, _tau_from(nums), _exact=exact)


def _cmul(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def expand_roots(roots, lcf=1) -> list[GaussianRational]:
    """Exact coefficients of ``lcf * prod((z - z_j)**n_j)``, low to high."""
    poly: list[GaussianRational] = [gaussian_rational(lcf)]
    for z, mult in roots:
        zr, zi = gaussian_rational(z)
        for _ in range(int(mult)):
            nxt = [(Fraction(0), Fraction(0))] * (len(poly) + 1)
            for i, c in enumerate(poly):
                # multiply by (z - root)
                hr, hi = nxt[i + 1]
                nxt[i + 1] = (hr + c[0], hi + c[1])
                pr, pi = _cmul(c, (zr, zi))
                lr, li = nxt[i]
                nxt[i] = (lr - pr, li - pi)
            poly = nxt
    return poly


def from_roots(roots, lcf=1) -> OraclePolynomial:
    """Oracle polynomial ``lcf * prod((z - z_j)**n_j)`` from ``[(z_j, n_j), ...]``."""
    roots = tuple((gaussian_rational(z), int(m)) for z, m in roots)
    if sum(m for _, m in roots) < 1 or any(m < 1 for _, m in roots):
        raise ValueError("need positive multiplicities summing to at least 1")
    lcf_q = gaussian_rational(lcf)
    if lcf_q == (0, 0):
        raise ZeroLeadingCoefficient("lcf must be nonzero")
    exact = tuple(expand_roots(roots, lcf_q))
    nums = tuple(OracularNumber.exact(c) for c in exact)
    return OraclePolynomial(nums, _tau_from(nums), _roots=roots, _exact=exact)


def known_roots(F: OraclePolynomial):
    """Exact roots retained by :func:`from_roots` (``None`` otherwise)."""
    return F._roots


def normalize_leading(F: OraclePolynomial) -> OraclePolynomial:
    """Scale ``F`` by a power of two so that ``1/4 < |lcf| < 1``.

    The exponent chosen is the largest ``s`` with ``2**s * lo <= 1/2`` where
    ``lo`` is a certified lower bound for ``|lcf|`` tight to a factor < 2.
    """
    lead = F.coefficients[-1]
    L = 8
    while True:
        a = lead(L)
        mag2 = a.norm2().to_fraction()
        err = Fraction(1, 1 << L)
        # |a| bounds via squared magnitude; lower bound must exclude 0
        if mag2 > 4 * err * err:
            lo = _sqrt_lower_q(mag2) - err
            hi = _sqrt_upper_q(mag2) + err
            if lo > 0 and hi < 2 * lo:
                break
        L *= 2
    s = 0
    while lo * Fraction(2) ** s > Fraction(1, 2):
        s -= 1
    while lo * Fraction(2) ** (s + 1) <= Fraction(1, 2):
        s += 1
    if s == 0 and F.lcf_scaled:
        return F
    nums = tuple(c.scaled(s) for c in F.coefficients)
    exact = None
    if F._exact is not None:
        k = Fraction(2) ** s
        exact = tuple((re * k, im * k) for re, im in F._exact)
    return OraclePolynomial(nums, _tau_from(nums), True, F.scale_log2 + s, _roots=F._roots, _exact=exact)


def _sqrt_lower_q(q: Fraction) -> Fraction:
    scale = 1 << 64
    return Fraction(math.isqrt(q.numerator * scale * scale // q.denominator), scale)


def _sqrt_upper_q(q: Fraction) -> Fraction:
    scale = 1 << 64
    return Fraction(math.isqrt(-(-q.numerator * scale * scale // q.denominator)) + 1, scale)


def graeffe_count(n: int) -> int:
    """Number of Graeffe iterations used by the counting test for degree ``n``."""
    return math.ceil(math.log2(1 + math.log2(n))) + 4 if n > 1 else 4


@dataclass(frozen=True)
class LocalPolynomial:
    """Ball polynomial with coefficients on a common binary scale.

    Coefficient ``i`` is the ball with center ``(re[i] + 1j*im[i]) * 2**exp``
    and radius ``rad[i] * 2**exp``.  ``center``/``radius`` record the disc
    the polynomial was localized to; ``prec`` is the working precision.
    """

    re: tuple[int, ...]
    im: tuple[int, ...]
    rad: tuple[int, ...]
    exp: int
    center: ComplexDyadic
    radius: Dyadic
    prec: int

    @property
    def degree(self) -> int:
        return len(self.re) - 1

    def ball(self, i: int) -> Ball:
        return Ball(ComplexDyadic(Dyadic(self.re[i], self.exp), Dyadic(self.im[i], self.exp)),
                    Dyadic(self.rad[i], self.exp))

    def balls(self) -> list[Ball]:
        return [self.ball(i) for i in range(len(self.re))]

    @classmethod
    def from_balls(cls, balls: Sequence, center=0, radius=1, prec: int = 0) -> "LocalPolynomial":
        balls = [b if isinstance(b, Ball) else Ball.exact(b) for b in balls]
        exps = [0]
        for b in balls:
            for d in (b.center.re, b.center.im, b.radius):
                if d:
                    exps.append(d.exponent)
        e = min(exps)
        return cls(tuple(b.center.re.scaled_int(e) for b in balls),
                   tuple(b.center.im.scaled_int(e) for b in balls),
                   tuple(b.radius.scaled_int(e) for b in balls),
                   e, ComplexDyadic.coerce(center), Dyadic.coerce(radius), prec)

    def max_bits(self) -> int:
        return max(max(abs(a), abs(b)).bit_length() for a, b in zip(self.re, self.im))

    def rel_error_bits(self) -> int:
        """``log2(max radius / max coefficient)`` rounded up (large if no signal)."""
        top = self.max_bits()
        if top == 0:
            return 1 << 30
        return max(self.rad).bit_length() - top + 1

    def rounded(self, bits: int) -> "LocalPolynomial":
        """Round centers to ``bits`` significant bits relative to the largest."""
        shift = self.max_bits() - bits
        if shift <= 0:
            return self
        half = 1 << (shift - 1)
        re = tuple((a + half) >> shift for a in self.re)
        im = tuple((b + half) >> shift for b in self.im)
        # round-to-nearest moves each part by <= 1/2 unit, so |error| < 1 unit
        rad = tuple((-((-r) >> shift)) + 1 for r in self.rad)
        return LocalPolynomial(re, im, rad, self.exp + shift, self.center, self.radius, bits)


def _taylor_shift(re: list[int], im: list[int], mr: int, mi: int) -> None:
    """In-place ``p(z) -> p(z + m)`` for the Gaussian integer ``m``."""
    n = len(re) - 1
    if mi == 0:
        for i in range(n):
            for j in range(n - 1, i - 1, -1):
                re[j] += mr * re[j + 1]
                im[j] += mr * im[j + 1]
        return
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            ar, ai = re[j + 1], im[j + 1]
            re[j] += mr * ar - mi * ai
            im[j] += mr * ai + mi * ar


def _real_shift(c: list[int], m: int) -> None:
    n = len(c) - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            c[j] += m * c[j + 1]


def localize(F: OraclePolynomial, m, r, L: int) -> LocalPolynomial:
    """Ball coefficients of ``F(m + r z)`` from ``L``-bit coefficient approximations.

    The shift is carried out exactly in integer arithmetic, so the only
    error comes from the oracle, propagated through the shift.
    """
    m = ComplexDyadic.coerce(m)
    r = Dyadic.coerce(r)
    if r.sign() <= 0:
        raise ValueError("radius must be positive")
    re0, im0, eA, unit = F.gaussian_approx(L)
    n = len(re0) - 1
    exps = [r.exponent]
    if m.re:
        exps.append(m.re.exponent)
    if m.im:
        exps.append(m.im.exponent)
    e = min(exps)
    mr, mi, R = m.re.scaled_int(e), m.im.scaled_int(e), r.scaled_int(e)
    base = min(0, e * n)
    shifts = [e * i - base for i in range(n + 1)]
    re = [a << s for a, s in zip(re0, shifts)]
    im = [b << s for b, s in zip(im0, shifts)]
    rad = [unit << s for s in shifts]
    if mr or mi:
        _taylor_shift(re, im, mr, mi)
        if mi == 0:
            mabs = abs(mr)
        elif mr == 0:
            mabs = abs(mi)
        else:
            mabs = math.isqrt(mr * mr + mi * mi) + 1
        _real_shift(rad, mabs)
    if R != 1:
        p = 1
        for j in range(1, n + 1):
            p *= R
            re[j] *= p
            im[j] *= p
            rad[j] *= p
    return LocalPolynomial(tuple(re), tuple(im), tuple(rad), eA + base, m, r, L)


def _mag_up(a: int, b: int) -> int:
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    return math.isqrt(a * a + b * b) + 1


def graeffe_step(p: LocalPolynomial, prec: int | None = None) -> LocalPolynomial:
    """One root-squaring step ``p*(z) = (-1)**n (pe(z)**2 - z po(z)**2)``.

    Products are exact; with ``prec`` the result is rounded to ``prec``
    significant bits relative to its largest coefficient.
    """
    re, im, rad = p.re, p.im, p.rad
    n = len(re) - 1
    mag = [_mag_up(a, b) for a, b in zip(re, im)]
    tot = [u + r for u, r in zip(mag, rad)]
    out_re, out_im, out_rad = [], [], []
    flip = n & 1
    for j in range(n + 1):
        sr = si = er = 0
        lo = max(0, 2 * j - n)
        for s in range(lo, j):
            t = 2 * j - s
            ar, ai, br, bi = re[s], im[s], re[t], im[t]
            pr, pi = ar * br - ai * bi, ar * bi + ai * br
            if s & 1:
                sr -= pr
                si -= pi
            else:
                sr += pr
                si += pi
            er += tot[s] * tot[t] - mag[s] * mag[t]
        sr <<= 1
        si <<= 1
        er <<= 1
        ar, ai = re[j], im[j]
        pr, pi = ar * ar - ai * ai, 2 * ar * ai
        if j & 1:
            sr -= pr
            si -= pi
        else:
            sr += pr
            si += pi
        er += tot[j] * tot[j] - mag[j] * mag[j]
        if flip:
            sr, si = -sr, -si
        out_re.append(sr)
        out_im.append(si)
        out_rad.append(er)
    q = LocalPolynomial(tuple(out_re), tuple(out_im), tuple(out_rad), 2 * p.exp, p.center, p.radius, p.prec)
    return q.rounded(prec) if prec else q


def graeffe_iterate(p: LocalPolynomial, N: int, prec: int | None = None,
                    tol_bits: int | None = None, ceiling: int = 1 << 20) -> LocalPolynomial:
    """``N`` Graeffe steps; roots of the result are the ``2**N``-th powers.

    With ``tol_bits`` the rounding precision is doubled until the final
    relative radius is at most ``2**-tol_bits``; :class:`PrecisionExhausted`
    is raised if that needs more than ``ceiling`` bits or the input balls
    are too wide.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    bits = prec or max(64, p.prec)
    while True:
        q = p
        for _ in range(N):
            q = graeffe_step(q, bits)
        if tol_bits is None or q.rel_error_bits() <= -tol_bits:
            return q
        if bits >= ceiling or p.rel_error_bits() > -tol_bits:
            raise PrecisionExhausted(f"graeffe_iterate: tolerance 2^-{tol_bits} not reached", bits=bits)
        bits *= 2
