"""Boxes, discs and components on the dyadic grid of the root box.

Every box is addressed by ``(depth, ix, iy)`` inside the root box
``(5/4) B0``: at depth ``d`` the root is cut into ``2**d x 2**d`` cells.
Adjacency, hashing and the separation test are exact integer
computations on these indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .dyadic import ComplexDyadic, Dyadic

__all__ = [
    "Disc",
    "Box",
    "RootGrid",
    "Component",
    "UnionFind",
    "split",
    "connected_components",
    "component_metrics",
    "separation_gate",
    "classify",
    "disc_meets_rect",
]


@dataclass(frozen=True)
class Disc:
    center: ComplexDyadic
    radius: Dyadic

    def __post_init__(self):
        object.__setattr__(self, "center", ComplexDyadic.coerce(self.center))
        object.__setattr__(self, "radius", Dyadic.coerce(self.radius))
        if self.radius.sign() <= 0:
            raise ValueError("disc radius must be positive")

    def scaled(self, k) -> "Disc":
        return Disc(self.center, self.radius * Dyadic.coerce(k))

    def contains(self, z) -> bool:
        zr, zi = (Fraction(z[0]), Fraction(z[1])) if isinstance(z, tuple) else ComplexDyadic.coerce(z).to_fractions()
        cr, ci = self.center.to_fractions()
        r = self.radius.to_fraction()
        return (zr - cr) ** 2 + (zi - ci) ** 2 <= r * r


class Box(NamedTuple):
    depth: int
    ix: int
    iy: int


def split(box: Box) -> list[Box]:
    """The four children of ``box`` (depth + 1), in row-major order."""
    d, x, y = box.depth + 1, 2 * box.ix, 2 * box.iy
    return [Box(d, x, y), Box(d, x + 1, y), Box(d, x, y + 1), Box(d, x + 1, y + 1)]


@dataclass(frozen=True)
class RootGrid:
    """The root box ``(5/4) B0`` for a query box ``B0`` of given center and width."""

    center: ComplexDyadic
    query_width: Dyadic

    def __post_init__(self):
        object.__setattr__(self, "center", ComplexDyadic.coerce(self.center))
        object.__setattr__(self, "query_width", Dyadic.coerce(self.query_width))
        if self.query_width.sign() <= 0:
            raise ValueError("query box width must be positive")
        object.__setattr__(self, "width", self.query_width * Dyadic(5, -2))

    def box_width(self, depth: int) -> Dyadic:
        return self.width.ldexp(-depth)

    def point(self, u: int, v: int, depth: int) -> ComplexDyadic:
        """Absolute position of half-cell coordinates ``(u, v)`` at ``depth``."""
        step = self.width.ldexp(-depth - 1)
        half = self.width.ldexp(-1)
        return ComplexDyadic(self.center.re - half + step * u, self.center.im - half + step * v)

    def box_center(self, box: Box) -> ComplexDyadic:
        return self.point(2 * box.ix + 1, 2 * box.iy + 1, box.depth)

    def box_geometry(self, box: Box) -> tuple[ComplexDyadic, Dyadic]:
        return self.box_center(box), self.box_width(box.depth)

    def box_corners(self, box: Box) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """``(x0, y0, x1, y1)`` of ``box`` as exact rationals."""
        lo = self.point(2 * box.ix, 2 * box.iy, box.depth).to_fractions()
        w = self.box_width(box.depth).to_fraction()
        return lo[0], lo[1], lo[0] + w, lo[1] + w

    def to_units(self, z, depth: int) -> tuple[Fraction, Fraction]:
        """Absolute point to (fractional) half-cell coordinates at ``depth``."""
        zr, zi = (Fraction(z[0]), Fraction(z[1])) if isinstance(z, tuple) else ComplexDyadic.coerce(z).to_fractions()
        step = self.width.to_fraction() / (1 << (depth + 1))
        cr, ci = self.center.to_fractions()
        half = self.width.to_fraction() / 2
        return (zr - cr + half) / step, (zi - ci + half) / step

    def in_query_box(self, box: Box) -> bool:
        """Closed ``box`` meets the closed query box ``B0``."""
        n = 1 << box.depth
        return (10 * (box.ix + 1) >= n and 10 * box.ix <= 9 * n
                and 10 * (box.iy + 1) >= n and 10 * box.iy <= 9 * n)

    def touches_boundary(self, box: Box) -> bool:
        last = (1 << box.depth) - 1
        return box.ix == 0 or box.iy == 0 or box.ix == last or box.iy == last


class UnionFind:
    """Union-find over hashable keys with path halving."""

    def __init__(self):
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return [sorted(g) for _, g in sorted(out.items())]


_NEIGHBOURS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def connected_components(boxes: Iterable[Box]) -> list[list[Box]]:
    """Partition same-depth boxes into groups connected by edge or corner contact."""
    boxes = list(boxes)
    if not boxes:
        return []
    depth = boxes[0].depth
    if any(b.depth != depth for b in boxes):
        raise ValueError("boxes must share a depth")
    uf = UnionFind()
    cells = set()
    for b in sorted(boxes):
        cell = (b.ix, b.iy)
        uf.add(cell)
        for dx, dy in _NEIGHBOURS:
            nb = (b.ix + dx, b.iy + dy)
            if nb in cells:
                uf.union(cell, nb)
        cells.add(cell)
    return [[Box(depth, x, y) for x, y in g] for g in uf.groups()]


class Metrics(NamedTuple):
    """Component metrics in half-cell units at the component's depth."""

    side: int  # W_C / w_C
    bx: int  # lower-left corner of B_C
    by: int
    rect: tuple[int, int, int, int]  # bounding rectangle of the support, in cells


def component_metrics(cells: Iterable[tuple[int, int]], depth: int) -> Metrics:
    """Smallest enclosing square ``B_C``, centred on the bounding rectangle, clamped into the root."""
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    side = max(x1 - x0 + 1, y1 - y0 + 1)
    top = (2 << depth) - 2 * side
    bx = min(max(x0 + x1 + 1 - side, 0), top)
    by = min(max(y0 + y1 + 1 - side, 0), top)
    return Metrics(side, bx, by, (x0, y0, x1, y1))


_next_id = [0]


@dataclass(eq=False)
class Component:
    """A connected set of same-depth boxes plus the solver's bookkeeping.

    ``log_speed`` is ``log2`` of the Newton speed ``N_C`` (so ``N_C = 2**log_speed``).
    """

    grid: RootGrid
    depth: int
    cells: frozenset
    log_speed: int = 2
    k: int | None = None
    parent: int | None = None
    tree_depth: int = 0
    phase: str = "preprocessing"
    node_id: int = field(default=-1)
    metrics: Metrics = field(init=False, repr=False)

    def __post_init__(self):
        if not self.cells:
            raise ValueError("empty component")
        self.cells = frozenset(self.cells)
        self.metrics = component_metrics(self.cells, self.depth)
        if self.node_id < 0:
            _next_id[0] += 1
            self.node_id = _next_id[0]

    @classmethod
    def from_boxes(cls, grid: RootGrid, boxes: Iterable[Box], **kw) -> "Component":
        boxes = list(boxes)
        return cls(grid, boxes[0].depth, frozenset((b.ix, b.iy) for b in boxes), **kw)

    @property
    def boxes(self) -> list[Box]:
        return [Box(self.depth, x, y) for x, y in sorted(self.cells)]

    @property
    def speed(self) -> int:
        return 1 << self.log_speed

    @property
    def w(self) -> Dyadic:
        return self.grid.box_width(self.depth)

    @property
    def W(self) -> Dyadic:
        return self.w * self.metrics.side

    @property
    def R(self) -> Dyadic:
        return self.W * Dyadic(3, -2)

    @property
    def width_key(self) -> Fraction:
        """``W_C / w(root)`` as an exact rational (ordering key)."""
        return Fraction(self.metrics.side, 1 << self.depth)

    @property
    def box_center(self) -> ComplexDyadic:
        m = self.metrics
        return self.grid.point(m.bx + m.side, m.by + m.side, self.depth)

    @property
    def disc(self) -> Disc:
        """``Delta_C = Delta(B_C)``."""
        return Disc(self.box_center, self.R)

    @property
    def compact(self) -> bool:
        return self.metrics.side <= 3

    @property
    def confined(self) -> bool:
        return not any(self.grid.touches_boundary(b) for b in self.boxes)

    @property
    def adventitious(self) -> bool:
        return not any(self.grid.in_query_box(b) for b in self.boxes)

    def __len__(self):
        return len(self.cells)

    def extended_contains(self, z) -> bool:
        """Whether ``z`` lies in ``C+``, the union of the doubled constituent boxes."""
        u, v = self.grid.to_units(z, self.depth)
        for x, y in self.cells:
            if 2 * x - 1 <= u <= 2 * x + 3 and 2 * y - 1 <= v <= 2 * y + 3:
                return True
        return False

    def support_contains(self, z) -> bool:
        u, v = self.grid.to_units(z, self.depth)
        return any(2 * x <= u <= 2 * x + 2 and 2 * y <= v <= 2 * y + 2 for x, y in self.cells)


def classify(C: Component) -> str:
    """``"adventitious"``, ``"confined"`` or ``"non-confined"``.

    Adventitious takes precedence: such components are discarded whatever
    their relation to the root boundary.
    """
    if C.adventitious:
        return "adventitious"
    return "confined" if C.confined else "non-confined"


def disc_meets_rect(cx, cy, r, x0, y0, x1, y1) -> bool:
    """Closed disc vs closed axis-aligned rectangle, exact for ints or Fractions."""
    dx = x0 - cx if cx < x0 else (cx - x1 if cx > x1 else 0)
    dy = y0 - cy if cy < y0 else (cy - y1 if cy > y1 else 0)
    return dx * dx + dy * dy <= r * r


def separation_gate(C: Component, others: Iterable[Component]) -> bool:
    """True iff ``4 Delta_C`` meets no constituent box of any other component."""
    m = C.metrics
    for D in others:
        if D is C:
            continue
        depth = max(C.depth, D.depth)
        sc, sd = depth - C.depth, depth - D.depth
        # half-cell units at the common depth
        cx, cy = (m.bx + m.side) << sc, (m.by + m.side) << sc
        r = (6 * m.side) << sc
        x0, y0, x1, y1 = D.metrics.rect
        if not disc_meets_rect(cx, cy, r, (2 * x0) << sd, (2 * y0) << sd,
                               (2 * x1 + 2) << sd, (2 * y1 + 2) << sd):
            continue
        for x, y in D.cells:
            if disc_meets_rect(cx, cy, r, (2 * x) << sd, (2 * y) << sd, (2 * x + 2) << sd, (2 * y + 2) << sd):
                return False
    return True
