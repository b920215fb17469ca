"""Soft predicates: SoftCompare, the Pellet test and its Graeffe form.

Every "true" answer here is rigorous: magnitudes come from ball
enclosures, the dominant term is bounded from below and the rest of the
sum from above.  Undecided comparisons are retried at doubled precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .dyadic import ComplexDyadic, Dyadic
from .oracle import (LocalPolynomial, OraclePolynomial, PrecisionExhausted, graeffe_count,
                     graeffe_step, localize)

__all__ = [
    "SoftSign",
    "TestCounters",
    "soft_compare",
    "soft_pellet",
    "graeffe_pellet_k",
    "graeffe_pellet_star",
    "exclusion_test",
    "DEFAULT_CEILING",
]

DEFAULT_CEILING = 1 << 20
START_BITS = 64

SoftSign = int  # one of -1, 0, +1; None while undecided

Quantity = Union[int, Fraction, Dyadic, Callable[[int], Dyadic]]


@dataclass
class TestCounters:
    tests_run: int = 0
    max_precision_bits: int = 0

    def note(self, bits: int) -> None:
        if bits > self.max_precision_bits:
            self.max_precision_bits = bits


def _soft_sign(lo_l, hi_l, lo_r, hi_r):
    """Decide SoftCompare from enclosures ``zl in [lo_l, hi_l]``, ``zr in [lo_r, hi_r]``.

    Returns +1/-1 only when the sign of ``zl - zr`` is certified, 0 only
    when ``2/3 zl < zr < 3/2 zl`` is certified, and ``None`` otherwise.
    """
    if lo_l > hi_r:
        return 1
    if hi_l < lo_r:
        return -1
    if 2 * hi_r < 3 * lo_l and 3 * lo_r > 2 * hi_l:
        return 0
    return None


def soft_compare(zl: Quantity, zr: Quantity, ceiling: int = DEFAULT_CEILING) -> SoftSign:
    """SoftCompare of two nonnegative reals given by oracles.

    Each argument is an exact nonnegative number or a callable ``L ->
    Dyadic`` returning an approximation within ``2**-L``.  Returns 0 only
    if ``2/3 zl < zr < 3/2 zl``; otherwise ``sign(zl - zr)``.
    """
    fl, fr = _as_oracle(zl), _as_oracle(zr)
    L = 4
    while L <= ceiling:
        a, b = fl(L).to_fraction(), fr(L).to_fraction()
        err = Fraction(1, 1 << L)
        verdict = _soft_sign(max(a - err, Fraction(0)), a + err, max(b - err, Fraction(0)), b + err)
        if verdict is not None:
            return verdict
        L *= 2
    raise PrecisionExhausted("soft_compare undecided", bits=L // 2)


def _as_oracle(x: Quantity) -> Callable[[int], Dyadic]:
    if callable(x):
        return x
    q = x.to_fraction() if isinstance(x, Dyadic) else Fraction(x)
    if q < 0:
        raise ValueError("soft_compare operands must be nonnegative")
    return lambda L: Dyadic.approx(q, L + 1)


def _magnitudes(p: LocalPolynomial) -> tuple[list[int], list[int]]:
    lo, hi = [], []
    for a, b, r in zip(p.re, p.im, p.rad):
        if a == 0 or b == 0:
            s = abs(a) + abs(b)
            lo.append(max(0, s - r))
            hi.append(s + r)
        else:
            s = math.isqrt(a * a + b * b)
            lo.append(max(0, s - r))
            hi.append(s + 1 + r)
    return lo, hi


def _pellet_verdicts(p: LocalPolynomial, ks) -> dict:
    """Soft Pellet verdicts on the unit disc for each ``k`` in ``ks``."""
    lo, hi = _magnitudes(p)
    tlo, thi = sum(lo), sum(hi)
    return {k: _soft_sign(lo[k], hi[k], tlo - lo[k], thi - hi[k]) for k in ks}


def soft_pellet(p: LocalPolynomial, k: int) -> bool:
    """Soft Pellet test ``T~_k`` on the unit disc for a localized polynomial.

    ``True`` certifies exactly ``k`` roots of ``p`` in the closed unit disc.
    Raises :class:`PrecisionExhausted` if the balls are too wide to decide.
    """
    if not 0 <= k <= p.degree:
        raise ValueError("k out of range")
    v = _pellet_verdicts(p, [k])[k]
    if v is None:
        raise PrecisionExhausted("soft_pellet: ball coefficients too wide", bits=p.prec)
    return v > 0


def _local_poly(F: OraclePolynomial, center: ComplexDyadic, radius: Dyadic, bits: int) -> LocalPolynomial:
    """``F(center + radius z)`` with relative error about ``2**-bits``."""
    n = F.degree
    cmag = max(center.re.magnitude_log2() if center.re else 0,
               center.im.magnitude_log2() if center.im else 0, 0)
    L = bits + n * (cmag + 1) + F.tau_f + 8
    for _ in range(8):
        p = localize(F, center, radius, L)
        deficit = max(p.rad).bit_length() - (p.max_bits() - bits)
        if deficit <= 0:
            break
        L += deficit + 8
    return p.rounded(bits)


def _graeffe_verdicts(F, center, radius, bits, N, ks):
    p = _local_poly(F, center, radius, bits)
    for _ in range(N):
        p = graeffe_step(p, bits)
    return _pellet_verdicts(p, ks)


def _disc_parts(disc):
    center, radius = disc
    return ComplexDyadic.coerce(center), Dyadic.coerce(radius)


def graeffe_pellet_star(F: OraclePolynomial, disc, k_max: int | None = None,
                        ceiling: int = DEFAULT_CEILING, counters: TestCounters | None = None) -> int:
    """Combined Graeffe-Pellet test: the ``k <= k_max`` certified for ``disc``, or -1.

    ``disc`` is a ``(center, radius)`` pair or any object with those
    attributes.  A result ``k >= 0`` certifies exactly ``k`` roots in the
    closed disc.
    """
    center, radius = _disc_parts(_unpack(disc))
    n = F.degree
    k_max = n if k_max is None else min(k_max, n)
    ks = range(k_max + 1)
    N = graeffe_count(n)
    bits = START_BITS
    if counters is not None:
        counters.tests_run += 1
    while True:
        if counters is not None:
            counters.note(bits)
        verdicts = _graeffe_verdicts(F, center, radius, bits, N, ks)
        undecided = False
        for k in ks:
            v = verdicts[k]
            if v == 1:
                return k
            if v is None:
                undecided = True
        if not undecided:
            return -1
        bits *= 2
        if bits > ceiling:
            raise PrecisionExhausted("graeffe_pellet_star undecided", bits=bits // 2,
                                     context={"test": "T*", "center": str(center), "radius": str(radius)})


def graeffe_pellet_k(F: OraclePolynomial, disc, k: int, ceiling: int = DEFAULT_CEILING,
                     counters: TestCounters | None = None) -> bool:
    """Graeffe-Pellet test ``T~G_k``; ``True`` certifies exactly ``k`` roots in ``disc``."""
    center, radius = _disc_parts(_unpack(disc))
    n = F.degree
    if not 0 <= k <= n:
        raise ValueError("k out of range")
    N = graeffe_count(n)
    bits = START_BITS
    if counters is not None:
        counters.tests_run += 1
    while True:
        if counters is not None:
            counters.note(bits)
        v = _graeffe_verdicts(F, center, radius, bits, N, [k])[k]
        if v is not None:
            return v > 0
        bits *= 2
        if bits > ceiling:
            raise PrecisionExhausted(f"graeffe_pellet_k undecided (k={k})", bits=bits // 2,
                                     context={"test": f"T{k}", "center": str(center), "radius": str(radius)})


def exclusion_test(F: OraclePolynomial, box, ceiling: int = DEFAULT_CEILING,
                   counters: TestCounters | None = None) -> bool:
    """Exclusion test on ``Delta(m, 3w/4)`` for a box of center ``m``, width ``w``.

    Returns ``True`` when the box is excluded (then it holds no root) and
    ``False`` when it is included (then ``2B`` holds a root).
    """
    center, width = (box.center, box.width) if hasattr(box, "width") else box
    radius = Dyadic.coerce(width) * Dyadic(3, -2)
    return graeffe_pellet_k(F, (center, radius), 0, ceiling, counters)


def _unpack(disc):
    if hasattr(disc, "center") and hasattr(disc, "radius"):
        return disc.center, disc.radius
    return disc
