"""The root clustering loop: preprocessing, Newton-bisection, output.

Components flow through four queues.  ``Q0`` holds components still in
preprocessing, ``Q1`` is a max-queue on the component width ``W_C``,
``Qout`` collects certified clusters and ``Qdis`` keeps discarded
(adventitious) components around for the separation gate.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .dyadic import ComplexDyadic, DivisorStraddlesZero, Dyadic, div_ball, round_to
from .geometry import (Box, Component, Disc, RootGrid, connected_components, disc_meets_rect,
                       separation_gate, split)
from .oracle import OraclePolynomial, PrecisionExhausted, localize, normalize_leading
from .predicates import (DEFAULT_CEILING, TestCounters, _soft_sign, exclusion_test,
                         graeffe_pellet_k, graeffe_pellet_star)

__all__ = ["Cluster", "RunStats", "SolverState", "SolveResult", "solve", "normalize_instance",
           "preprocess", "main_loop", "newton_step", "bisect_step", "effective_eps"]

log = logging.getLogger(__name__)

# Newton children with more boxes than this count as a failed step
MAX_NEWTON_BOXES = 9
NEWTON_MAX_BITS = 4096


@dataclass(frozen=True)
class Cluster:
    disc: Disc
    multiplicity: int
    # width of the constituent boxes of the output component, for diagnostics
    leaf_width: Dyadic | None = field(default=None, compare=False)

    @property
    def center(self) -> ComplexDyadic:
        return self.disc.center

    @property
    def radius(self) -> Dyadic:
        return self.disc.radius


@dataclass
class RunStats:
    boxes_created: int = 0
    components_processed: int = 0
    newton_success: int = 0
    newton_fail: int = 0
    newton_oversize: int = 0
    tests_run: int = 0
    max_precision_bits: int = 0
    max_tree_depth: int = 0
    preprocessing_boxes: int = 0
    main_boxes: int = 0
    star_exhausted: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stats_version"] = 1
        return d


@dataclass
class SolverState:
    F: OraclePolynomial
    grid: RootGrid
    eps_eff: Dyadic
    newton: bool = True
    ceiling: int = DEFAULT_CEILING
    record: bool = False
    Q0: deque = field(default_factory=deque)
    Q1: list = field(default_factory=list)
    Qout: list = field(default_factory=list)
    Qdis: list = field(default_factory=list)
    stats: RunStats = field(default_factory=RunStats)
    counters: TestCounters = field(default_factory=TestCounters)
    # (phase, w_C) of every preprocessing component, and retained boxes when recording
    preprocessing_widths: list = field(default_factory=list)
    events: list = field(default_factory=list)
    _tick: itertools.count = field(default_factory=itertools.count)

    def push(self, C: Component) -> None:
        heapq.heappush(self.Q1, (-C.width_key, next(self._tick), C))

    def pop(self) -> Component:
        return heapq.heappop(self.Q1)[2]

    def live(self):
        for _, _, C in self.Q1:
            yield C
        yield from self.Qdis

    def note_component(self, C: Component) -> None:
        if C.tree_depth > self.stats.max_tree_depth:
            self.stats.max_tree_depth = C.tree_depth
        if self.record:
            self.events.append((C.phase, C.depth, tuple(sorted(C.cells))))


@dataclass
class SolveResult:
    clusters: list
    stats: RunStats
    eps_eff: Dyadic
    grid: RootGrid
    state: SolverState


def effective_eps(eps, n: int, query_width) -> Dyadic:
    """``min(eps, 1, w(B0)/(96 n))`` rounded down to a power of two."""
    eps = Dyadic.coerce(eps).to_fraction()
    if eps <= 0:
        raise ValueError("eps must be positive")
    bound = min(eps, Fraction(1), Dyadic.coerce(query_width).to_fraction() / (96 * n))
    k = bound.numerator.bit_length() - bound.denominator.bit_length()
    if Fraction(2) ** k > bound:
        k -= 1
    elif Fraction(2) ** (k + 1) <= bound:
        k += 1
    return Dyadic(1, k)


def normalize_instance(F: OraclePolynomial, center, width, eps):
    """Return ``(F', root grid, eps_eff)`` for a query box ``B(center, width)``."""
    width = Dyadic.coerce(width)
    if width.sign() <= 0:
        raise ValueError("query box width must be positive")
    Fn = normalize_leading(F)
    grid = RootGrid(ComplexDyadic.coerce(center), width)
    return Fn, grid, effective_eps(eps, Fn.degree, width)


def _exclude(state: SolverState, box: Box) -> bool:
    geom = state.grid.box_geometry(box)
    try:
        return exclusion_test(state.F, geom, state.ceiling, state.counters)
    except PrecisionExhausted:
        log.debug("exclusion test exhausted %d bits, retrying with a larger ceiling", state.ceiling)
    try:
        return exclusion_test(state.F, geom, 4 * state.ceiling, state.counters)
    except PrecisionExhausted as exc:
        exc.context.update(box=str(box), center=str(geom[0]), width=str(geom[1]))
        raise


def bisect_step(state: SolverState, C: Component, phase: str = "main") -> list[Component]:
    """Split every box of ``C``, drop excluded children, regroup the rest.

    Returns the child components.  Adventitious ones are put in ``Qdis``,
    the others in ``Q0`` (preprocessing) or ``Q1`` (main loop).
    """
    kept = []
    for box in C.boxes:
        for child in split(box):
            if not _exclude(state, child):
                kept.append(child)
    made = 4 * len(C)
    state.stats.boxes_created += made
    if phase == "preprocessing":
        state.stats.preprocessing_boxes += made
    else:
        state.stats.main_boxes += made
    groups = connected_components(kept)
    log_speed = 2 if len(groups) == 1 else max(2, C.log_speed // 2)
    children = []
    for g in groups:
        D = Component.from_boxes(state.grid, g, log_speed=log_speed, k=C.k, parent=C.node_id,
                                 tree_depth=C.tree_depth + 1, phase=phase)
        state.note_component(D)
        if D.adventitious:
            state.Qdis.append(D)
        elif phase == "preprocessing":
            state.Q0.append(D)
        else:
            state.push(D)
        children.append(D)
    return children


def preprocess(state: SolverState) -> None:
    """Drain ``Q0`` until every surviving component is confined and small."""
    half = state.grid.query_width.ldexp(-1)
    while state.Q0:
        C = state.Q0.popleft()
        state.stats.components_processed += 1
        state.preprocessing_widths.append(C.w)
        if C.confined and C.W <= half:
            C.phase = "main"
            state.note_component(C)
            state.push(C)
        else:
            bisect_step(state, C, "preprocessing")


def _newton_correction(state: SolverState, x: ComplexDyadic, R: Dyadic, k: int, tol: Dyadic):
    """Ball for ``k F(x)/F'(x)`` with radius at most ``tol``, or ``None``.

    ``None`` also when ``4R|F'(x)| > |F(x)|`` cannot be certified, i.e. when
    ``x`` is too close to a critical point for a useful step.
    """
    four_r = R.ldexp(2).to_fraction()
    kd = ComplexDyadic(Dyadic(k))
    L = 64 + state.F.tau_f
    checked = False
    while L <= NEWTON_MAX_BITS:
        p = localize(state.F, x, Dyadic(1), L)
        f0, f1 = p.ball(0), p.ball(1)
        if not checked:
            lo0, hi0 = f0.mag_lower().to_fraction(), f0.mag_upper().to_fraction()
            lo1, hi1 = f1.mag_lower().to_fraction(), f1.mag_upper().to_fraction()
            v = _soft_sign(four_r * lo1, four_r * hi1, lo0, hi0)
            if v is not None and v <= 0:
                return None
            checked = v is not None
        if checked:
            try:
                q = div_ball(f0, f1, L)
            except DivisorStraddlesZero:
                q = None
            if q is not None and q.radius * Dyadic(k) <= tol:
                return q * kd
        L *= 2
    return None


def _boxes_in_disc(C: Component, depth: int, disc: Disc) -> list[Box]:
    """Boxes of ``C`` refined to ``depth`` that meet the closed ``disc``."""
    grid = C.grid
    shift = depth - C.depth
    # cell units at the new depth; the grid's half-cell units are twice that
    u, v = grid.to_units(disc.center, depth)
    cx, cy = u / 2, v / 2
    r = disc.radius.to_fraction() / grid.box_width(depth).to_fraction()
    if r > 3:
        # far too many cells of the new grid; reported as an oversize step
        return [None] * (MAX_NEWTON_BOXES + 1)
    lo_x, hi_x = math.floor(cx - r) - 1, math.ceil(cx + r) + 1
    lo_y, hi_y = math.floor(cy - r) - 1, math.ceil(cy + r) + 1
    out = []
    for ix in range(lo_x, hi_x + 1):
        for iy in range(lo_y, hi_y + 1):
            if (ix >> shift, iy >> shift) not in C.cells:
                continue
            if disc_meets_rect(cx, cy, r, ix, iy, ix + 1, iy + 1):
                out.append(Box(depth, ix, iy))
                if len(out) > MAX_NEWTON_BOXES:
                    return out
    return out


def _disc_inside(inner: Disc, outer: Disc) -> bool:
    ar, ai = inner.center.to_fractions()
    br, bi = outer.center.to_fractions()
    gap = outer.radius.to_fraction() - inner.radius.to_fraction()
    return gap >= 0 and (ar - br) ** 2 + (ai - bi) ** 2 <= gap * gap


def newton_step(state: SolverState, C: Component) -> Component | None:
    """Order-``k_C`` Newton step; the refined component on success, else ``None``."""
    k, N = C.k, C.speed
    w, R = C.w, C.R
    center = C.box_center
    off = C.W.ldexp(-1) + w.ldexp(-1)
    candidates = [ComplexDyadic(center.re + off, center.im), ComplexDyadic(center.re, center.im + off),
                  ComplexDyadic(center.re - off, center.im), ComplexDyadic(center.re, center.im - off)]
    r_new = max(state.eps_eff, w.ldexp(-3 - C.log_speed))
    depth = C.depth + 1 + C.log_speed
    tol = r_new.ldexp(-4)
    for x in candidates:
        step = _newton_correction(state, x, R, k, tol)
        if step is not None:
            break
    else:
        return None
    xq = x - step.center
    L = max(1, 4 - r_new.magnitude_log2())
    xr = ComplexDyadic(round_to(xq.re, L), round_to(xq.im, L))
    disc = Disc(xr, r_new)
    if not _disc_inside(disc, C.disc):
        return None
    boxes = _boxes_in_disc(C, depth, disc)
    if not boxes or len(boxes) > MAX_NEWTON_BOXES:
        if boxes:
            state.stats.newton_oversize += 1
        return None
    if len(boxes) > 4:
        log.info("Newton child with %d boxes (N=%d)", len(boxes), N)
        state.stats.newton_oversize += 1
    if len(connected_components(boxes)) != 1:
        return None
    try:
        ok = graeffe_pellet_k(state.F, disc, k, state.ceiling, state.counters)
    except PrecisionExhausted:
        return None
    if not ok:
        return None
    state.stats.boxes_created += len(boxes)
    state.stats.main_boxes += len(boxes)
    D = Component.from_boxes(state.grid, boxes, log_speed=2 * C.log_speed, k=k, parent=C.node_id,
                             tree_depth=C.tree_depth + 1, phase="main")
    state.note_component(D)
    return D


def main_loop(state: SolverState) -> None:
    eps = state.eps_eff
    while state.Q1:
        C = state.pop()
        state.stats.components_processed += 1
        if not separation_gate(C, state.live()):
            bisect_step(state, C)
            continue
        try:
            k = graeffe_pellet_star(state.F, C.disc, C.k, state.ceiling, state.counters)
        except PrecisionExhausted:
            state.stats.star_exhausted += 1
            k = -1
        if k <= 0:
            bisect_step(state, C)
            continue
        C.k = k
        if C.W >= eps:
            D = newton_step(state, C) if state.newton else None
            if D is not None:
                state.stats.newton_success += 1
                state.push(D)
            else:
                if state.newton:
                    state.stats.newton_fail += 1
                bisect_step(state, C)
        elif C.compact:
            state.Qout.append(C)
        else:
            bisect_step(state, C)


def solve(F: OraclePolynomial, box, eps, newton: bool = True, ceiling: int = DEFAULT_CEILING,
          record: bool = False) -> SolveResult:
    """Certified ``eps``-clusters of the roots of ``F`` in the query box.

    ``box`` is ``(center, width)``.  Returns pairwise disjoint discs of
    radius at most ``eps`` with exact multiplicities, covering every root
    in the box and only roots of the doubled box.
    """
    t0 = time.perf_counter()
    center, width = box
    Fn, grid, eps_eff = normalize_instance(F, center, width, eps)
    state = SolverState(Fn, grid, eps_eff, newton, ceiling, record)
    root = Component(grid, 0, frozenset({(0, 0)}), phase="preprocessing")
    state.note_component(root)
    state.stats.boxes_created = 1
    state.stats.preprocessing_boxes = 1
    state.Q0.append(root)
    preprocess(state)
    main_loop(state)
    clusters = [Cluster(C.disc, C.k, C.w) for C in state.Qout]
    state.stats.tests_run = state.counters.tests_run
    state.stats.max_precision_bits = state.counters.max_precision_bits
    state.stats.wall_time = time.perf_counter() - t0
    return SolveResult(clusters, state.stats, eps_eff, grid, state)
