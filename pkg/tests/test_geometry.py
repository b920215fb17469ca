from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from rootclust.dyadic import ComplexDyadic, Dyadic
from rootclust.geometry import (Box, Component, Disc, RootGrid, classify, component_metrics,
                                connected_components, separation_gate, split)

GRID = RootGrid(ComplexDyadic(0), Dyadic(4))  # root box [-5/2, 5/2]^2


def test_root_box_is_five_quarters():
    assert GRID.width == Dyadic(5)
    assert GRID.box_corners(Box(0, 0, 0)) == (Fraction(-5, 2), Fraction(-5, 2), Fraction(5, 2), Fraction(5, 2))


def test_split_tiles_parent():
    parent = Box(0, 0, 0)
    kids = split(parent)
    assert [(b.ix, b.iy) for b in kids] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert all(b.depth == 1 for b in kids)
    corners = sorted(GRID.box_corners(b) for b in kids)
    h = Fraction(5, 2)
    assert corners == sorted([(-h, -h, 0, 0), (0, -h, h, 0), (-h, 0, 0, h), (0, 0, h, h)])
    assert GRID.box_width(1) == GRID.box_width(0) * Dyadic(1, -1)


@given(st.integers(0, 30), st.integers(0, 1000), st.integers(0, 1000))
def test_split_grid_law(d, x, y):
    b = Box(d, x % (1 << d), y % (1 << d))
    for c in split(b):
        assert c.ix in (2 * b.ix, 2 * b.ix + 1) and c.iy in (2 * b.iy, 2 * b.iy + 1)
        x0, y0, x1, y1 = GRID.box_corners(c)
        p0, q0, p1, q1 = GRID.box_corners(b)
        assert p0 <= x0 < x1 <= p1 and q0 <= y0 < y1 <= q1


def test_connected_components_examples():
    assert len(connected_components([Box(3, 0, 0), Box(3, 1, 0)])) == 1
    assert len(connected_components([Box(3, 0, 0), Box(3, 2, 0)])) == 2
    assert len(connected_components([Box(3, 0, 0), Box(3, 1, 1)])) == 1


@given(st.sets(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=60))
def test_connected_components_partition(cells):
    boxes = [Box(4, x, y) for x, y in cells]
    groups = connected_components(boxes)
    flat = [b for g in groups for b in g]
    assert sorted(flat) == sorted(boxes)
    index = {b: i for i, g in enumerate(groups) for b in g}
    for a in boxes:
        for b in boxes:
            if abs(a.ix - b.ix) <= 1 and abs(a.iy - b.iy) <= 1:
                assert index[a] == index[b]


def test_component_metrics_examples():
    C = Component(GRID, 3, {(4, 4)})
    assert C.W == C.w and C.R == C.w * Dyadic(3, -2)
    assert C.box_center == GRID.box_center(Box(3, 4, 4))
    C2 = Component(GRID, 3, {(4, 4), (5, 4)})
    assert C2.W == 2 * C2.w and C2.R == C2.w * Dyadic(3, -1)
    L = Component(GRID, 3, {(4, 4), (5, 4), (4, 5)})
    assert L.metrics.side == 2


def test_component_box_clamped_into_root():
    m = component_metrics({(0, 3), (0, 4), (0, 5)}, 3)
    assert m.side == 3
    assert m.bx == 0  # the centred square would stick out on the left
    m = component_metrics({(7, 0), (7, 1), (7, 2)}, 3)
    assert m.bx + 2 * m.side == 2 * 8


@given(st.sets(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=20))
def test_component_box_contains_support(cells):
    m = component_metrics(cells, 4)
    for x, y in cells:
        assert m.bx <= 2 * x and 2 * x + 2 <= m.bx + 2 * m.side
        assert m.by <= 2 * y and 2 * y + 2 <= m.by + 2 * m.side
    assert 0 <= m.bx and m.bx + 2 * m.side <= 32


def test_separation_gate_examples():
    C = Component(GRID, 6, {(30, 30)})
    assert separation_gate(C, [C])
    far = Component(GRID, 6, {(43, 43)})  # about 13 box widths away, 4 Delta_C has radius 3
    assert separation_gate(C, [C, far])
    block = Component(GRID, 6, {(10, 10), (11, 10), (10, 11), (11, 11)})
    # 4 Delta has radius 3 W = 6 cells = 12 half-cells around (22, 22); box 17 starts at 34 half-cells
    touching = Component(GRID, 6, {(17, 10)})
    assert not separation_gate(block, [touching])
    apart = Component(GRID, 6, {(18, 10)})
    assert separation_gate(block, [apart])


def test_separation_gate_mixed_depths():
    C = Component(GRID, 4, {(8, 8)})
    # C center: 17 half-cells at depth 4 = 68 at depth 6; radius 3 W = 24 half-cells, reaching 92
    fine = Component(GRID, 6, {(47, 34)})  # starts at 94
    assert separation_gate(C, [fine])
    near = Component(GRID, 6, {(46, 34)})  # starts at 92: touches
    assert not separation_gate(C, [near])


def test_classify_examples():
    assert classify(Component(GRID, 3, {(4, 4)})) == "confined"
    ring = Component(GRID, 5, {(1, 10)})
    assert ring.confined and ring.adventitious
    assert classify(ring) == "adventitious"
    assert classify(Component(GRID, 3, {(0, 4), (1, 4)})) == "non-confined"


def test_disc_scaling_and_containment():
    D = Disc(ComplexDyadic(1, 1), Dyadic(1, -1))
    E = D.scaled(4)
    assert E.center == D.center and E.radius == Dyadic(2)
    assert D.contains((Fraction(3, 2), Fraction(1)))
    assert not D.contains((Fraction(3, 2), Fraction(11, 10)))


def test_extended_component():
    C = Component(GRID, 3, {(4, 4)})
    x0, y0, x1, y1 = GRID.box_corners(Box(3, 4, 4))
    w = x1 - x0
    assert C.support_contains((x0, y0))
    assert not C.support_contains((x0 - w / 4, y0))
    assert C.extended_contains((x0 - w / 4, y0))
    assert not C.extended_contains((x0 - w, y0))
