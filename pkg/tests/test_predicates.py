import math
from fractions import Fraction

import pytest
from conftest import exact_count, exact_count_box
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rootclust.dyadic import ComplexDyadic, Dyadic
from rootclust.oracle import from_exact, from_roots, known_roots, localize
from rootclust.predicates import (exclusion_test, graeffe_pellet_k, graeffe_pellet_star, soft_compare,
                                  soft_pellet)

Q = Fraction


def test_soft_compare_examples():
    assert soft_compare(1, 2) == -1
    assert soft_compare(1, 1) == 0
    assert soft_compare(4, 1) == 1
    assert soft_compare(1, Q(14, 10)) in (0, -1)


@given(st.fractions(min_value=0, max_value=10 ** 6, max_denominator=10 ** 6),
       st.fractions(min_value=0, max_value=10 ** 6, max_denominator=10 ** 6))
def test_soft_compare_trichotomy(a, b):
    assume(a + b > 0)
    v = soft_compare(a, b)
    if v == 0:
        assert Q(2, 3) * a < b < Q(3, 2) * a
    else:
        assert v == (1 if a > b else -1)


def test_soft_compare_accepts_oracles():
    third = lambda L: Dyadic.approx(Q(1, 3), L + 1)  # noqa: E731
    assert soft_compare(third, Q(1, 10)) == 1


def test_soft_pellet_examples():
    r = Dyadic.approx(Q(1, 5), 80)
    p = localize(from_exact([-2, 0, 1]), Dyadic(3, -1), r, 120)
    assert soft_pellet(p, 1)
    assert soft_pellet(localize(from_exact([-10, 1]), 0, 1, 64), 0)
    assert not soft_pellet(localize(from_roots([(1, 2)]), 1, 1, 64), 0)


def test_graeffe_pellet_examples():
    F = from_roots([(1, 2)])
    assert graeffe_pellet_k(F, (1, Q(1, 4)), 2)
    G = from_exact([-2, 0, 1])
    assert graeffe_pellet_k(G, (10 ** 6, Q(3, 4)), 0)
    assert not graeffe_pellet_k(G, (Q(3, 2), Q(3, 4)), 0)


def test_graeffe_pellet_star_examples():
    F = from_roots([(1, 2), (-1, 1)])
    assert graeffe_pellet_star(F, (1, Q(1, 8)), 3) == 2
    assert graeffe_pellet_star(from_exact([0, 1]), (10, Q(1, 2))) == 0
    k = graeffe_pellet_star(from_exact([-2, 0, 1]), (0, Dyadic.approx(Q(142, 100), 40)))
    assert k in (-1, 2)


def test_exclusion_examples():
    G = from_exact([-2, 0, 1])
    assert exclusion_test(G, (1000, 1))
    assert not exclusion_test(G, (Q(3, 2), 1))
    for w in (Q(1, 1024), 1, 50):
        assert not exclusion_test(from_exact([0, 1]), (0, w))


coord = st.fractions(min_value=-2, max_value=2, max_denominator=40)
root_lists = st.lists(st.tuples(st.tuples(coord, coord), st.integers(1, 3)), min_size=1, max_size=4)


def _instance(roots):
    merged = {}
    for z, m in roots:
        merged[z] = merged.get(z, 0) + m
    roots = list(merged.items())
    assume(sum(m for _, m in roots) <= 8)
    return from_roots(roots), known_roots(from_roots(roots))


dyadic_coord = st.builds(lambda m: Dyadic(m, -5), st.integers(-96, 96))
dyadic_radius = st.builds(lambda m, e: Dyadic(m, -e), st.integers(1, 63), st.integers(0, 12))


@settings(max_examples=150)
@given(root_lists, dyadic_coord, dyadic_coord, dyadic_radius)
def test_star_soundness_and_failure_annulus(roots, cx, cy, r):
    F, exact = _instance(roots)
    c = ComplexDyadic(cx, cy)
    k = graeffe_pellet_star(F, (c, r))
    if k >= 0:
        assert exact_count(exact, c, r) == k
    else:
        rq = r.to_fraction()
        cr, ci = c.to_fractions()
        d2 = [((zr - cr) ** 2 + (zi - ci) ** 2, m) for (zr, zi), m in exact]
        # radii 4/3 r and (2 sqrt 2 / 3) r, compared through their exact squares
        outer = sum(m for d, m in d2 if d <= Q(16, 9) * rq * rq)
        inner = sum(m for d, m in d2 if d <= Q(8, 9) * rq * rq)
        assert outer > inner


@settings(max_examples=150)
@given(root_lists, dyadic_coord, dyadic_coord, dyadic_radius)
def test_exclusion_dichotomy(roots, cx, cy, w):
    F, exact = _instance(roots)
    c = ComplexDyadic(cx, cy)
    if exclusion_test(F, (c, w)):
        assert exact_count_box(exact, c, w) == 0
        assert exact_count(exact, c, w.to_fraction() * Q(3, 4)) == 0
    else:
        assert exact_count_box(exact, c, 2 * w.to_fraction()) >= 1
        assert exact_count(exact, c, w) >= 1


def _guarantee_instance(draw_k, n_other, seed):
    """Roots with ``k`` clustered tightly at c and the rest far away; returns (F, c, r, k)."""
    import random

    rng = random.Random(seed)
    n = draw_k + n_other
    c = (Q(rng.randint(-50, 50), 37), Q(rng.randint(-50, 50), 41))
    rho = Q(1, 1 << 24)
    roots = []
    for _ in range(draw_k):
        roots.append(((c[0] + rho * Q(rng.randint(-60, 60), 100), c[1] + rho * Q(rng.randint(-60, 60), 100)), 1))
    r = Q(11, 1) * n * rho * 2  # well above 10.5 n rho
    far = 18 * n ** 3 * r * 2
    for _ in range(n_other):
        ang = rng.random() * 2 * math.pi
        d = far * (1 + rng.random())
        roots.append(((c[0] + Q(d * math.cos(ang)), c[1] + Q(d * math.sin(ang))), 1))
    return roots, c, r, n


@settings(max_examples=30)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_completeness_on_guarantee_region(k, others, seed):
    assume(k + others >= 1)
    roots, c, r, n = _guarantee_instance(k, others, seed)
    F = from_roots(roots)
    center = ComplexDyadic(Dyadic.approx(c[0], 40), Dyadic.approx(c[1], 40))
    rad = Dyadic.approx(r, 40)
    ex = known_roots(F)
    assert exact_count(ex, center, rad.to_fraction() / (Q(21, 2) * n)) == k
    assert exact_count(ex, center, rad.to_fraction() * 18 * n ** 3) == k
    assert graeffe_pellet_k(F, (center, rad), k)


def test_k_out_of_range():
    with pytest.raises(ValueError):
        graeffe_pellet_k(from_exact([0, 1]), (0, 1), 2)
