from fractions import Fraction

from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def exact_count(roots, center, radius) -> int:
    """Roots (with multiplicity) in the closed disc, in exact rationals."""
    cr, ci = (Fraction(center[0]), Fraction(center[1])) if isinstance(center, tuple) else center.to_fractions()
    r = radius.to_fraction() if hasattr(radius, "to_fraction") else Fraction(radius)
    total = 0
    for (zr, zi), m in roots:
        if (zr - cr) ** 2 + (zi - ci) ** 2 <= r * r:
            total += m
    return total


def exact_count_box(roots, center, width) -> int:
    cr, ci = (Fraction(center[0]), Fraction(center[1])) if isinstance(center, tuple) else center.to_fractions()
    h = (width.to_fraction() if hasattr(width, "to_fraction") else Fraction(width)) / 2
    return sum(m for (zr, zi), m in roots if abs(zr - cr) <= h and abs(zi - ci) <= h)
