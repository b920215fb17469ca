"""Ground-truth instances and an exact checker for solver output.

Everything here uses exact rational arithmetic on the stored roots.  No
code is shared with the numerical side of the package, so a bug there
cannot hide itself from these checks.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "InstanceSpec",
    "VerificationReport",
    "BoundaryAmbiguity",
    "PROFILES",
    "count_roots_in_disc",
    "verify_solution",
    "gen_corpus",
    "depth_benchmark",
    "BenchRow",
    "write_csv",
    "width_floor_violations",
    "durand_kerner",
]

PROFILES = ("well-separated", "clustered-pairs", "strong-cluster", "boundary-stress", "adventitious")

Point = tuple[Fraction, Fraction]


class BoundaryAmbiguity(ValueError):
    """A root lies exactly on the circle of a strictly counted disc."""


def _q(x) -> Fraction:
    if hasattr(x, "to_fraction"):
        return x.to_fraction()
    return Fraction(x)


def _point(z) -> Point:
    if hasattr(z, "to_fractions"):
        return z.to_fractions()
    if isinstance(z, complex):
        return Fraction(z.real), Fraction(z.imag)
    if isinstance(z, (tuple, list)):
        return _q(z[0]), _q(z[1])
    return _q(z), Fraction(0)


@dataclass
class InstanceSpec:
    roots: list  # [((re, im), multiplicity), ...] with Fraction parts
    lcf: Fraction = Fraction(1)
    box_center: Point = (Fraction(0), Fraction(0))
    box_width: Fraction = Fraction(4)
    eps: Fraction = Fraction(1, 1 << 10)
    seed: int = 0
    profile: str = "custom"
    # (center, radius) discs that hold a strong cluster; only set by the strong-cluster profile
    witnesses: list = field(default_factory=list)

    def __post_init__(self):
        self.roots = [(_point(z), int(m)) for z, m in self.roots]
        self.box_center = _point(self.box_center)
        self.box_width = _q(self.box_width)
        self.eps = _q(self.eps)
        self.lcf = _q(self.lcf)
        self.witnesses = [(_point(c), _q(r)) for c, r in self.witnesses]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def polynomial(self):
        from .oracle import from_roots

        return from_roots(self.roots, self.lcf)

    @property
    def box(self):
        return self.box_center, self.box_width

    def to_json(self) -> dict:
        def s(q: Fraction) -> str:
            return f"{q.numerator}/{q.denominator}"

        return {
            "roots": [{"re": s(z[0]), "im": s(z[1]), "mult": m} for z, m in self.roots],
            "lcf": s(self.lcf),
            "box": {"re": s(self.box_center[0]), "im": s(self.box_center[1]), "width": s(self.box_width)},
            "eps": s(self.eps),
            "seed": self.seed,
            "profile": self.profile,
            "witnesses": [{"re": s(c[0]), "im": s(c[1]), "radius": s(r)} for c, r in self.witnesses],
        }

    @classmethod
    def from_json(cls, d: dict) -> "InstanceSpec":
        F = Fraction
        return cls(
            roots=[((F(r["re"]), F(r["im"])), r["mult"]) for r in d["roots"]],
            lcf=F(d.get("lcf", "1")),
            box_center=(F(d["box"]["re"]), F(d["box"]["im"])),
            box_width=F(d["box"]["width"]),
            eps=F(d["eps"]),
            seed=d.get("seed", 0),
            profile=d.get("profile", "custom"),
            witnesses=[((F(w["re"]), F(w["im"])), F(w["radius"])) for w in d.get("witnesses", [])],
        )


def _dist2(a: Point, b: Point) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def _disc_parts(disc) -> tuple[Point, Fraction]:
    if hasattr(disc, "center") and hasattr(disc, "radius"):
        return _point(disc.center), _q(disc.radius)
    c, r = disc
    return _point(c), _q(r)


def count_roots_in_disc(spec: InstanceSpec, disc, strict: bool = False) -> int:
    """Number of roots with multiplicity in the closed disc."""
    c, r = _disc_parts(disc)
    r2 = r * r
    total = 0
    for z, m in spec.roots:
        d2 = _dist2(z, c)
        if d2 == r2 and strict:
            raise BoundaryAmbiguity(f"root {z} lies on the circle of radius {r} about {c}")
        if d2 <= r2:
            total += m
    return total


def _in_box(z: Point, center: Point, width: Fraction) -> bool:
    h = width / 2
    return abs(z[0] - center[0]) <= h and abs(z[1] - center[1]) <= h


@dataclass
class VerificationReport:
    ok: bool
    violations: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "metrics": self.metrics}


def _cluster_parts(cl) -> tuple[Point, Fraction, int]:
    if hasattr(cl, "disc"):
        c, r = _disc_parts(cl.disc)
        return c, r, int(cl.multiplicity)
    c, r, m = cl
    return _point(c), _q(r), int(m)


def verify_solution(spec: InstanceSpec, clusters: Iterable) -> VerificationReport:
    """Check a clustering answer against the exact roots of ``spec``."""
    parts = [_cluster_parts(c) for c in clusters]
    bad: list[dict] = []
    for i, (c, r, m) in enumerate(parts):
        if r > spec.eps:
            bad.append({"rule": "radius", "detail": f"cluster {i}: radius {r} > eps {spec.eps}"})
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            (ci, ri, _), (cj, rj, _) = parts[i], parts[j]
            if _dist2(ci, cj) <= (ri + rj) ** 2:
                bad.append({"rule": "disjointness", "detail": f"clusters {i} and {j} intersect"})
    for i, (c, r, m) in enumerate(parts):
        inner = count_roots_in_disc(spec, (c, r))
        outer = count_roots_in_disc(spec, (c, 3 * r))
        if not inner == m == outer:
            bad.append({"rule": "isolator",
                        "detail": f"cluster {i}: #D={inner}, multiplicity={m}, #3D={outer}"})
    covered = [any(_dist2(z, c) <= r * r for c, r, _ in parts) for z, _ in spec.roots]
    for (z, m), cov in zip(spec.roots, covered):
        if not cov and _in_box(z, spec.box_center, spec.box_width):
            bad.append({"rule": "coverage", "detail": f"root {z} (mult {m}) in B0 is not covered"})
    for (z, m), cov in zip(spec.roots, covered):
        if cov and not _in_box(z, spec.box_center, 2 * spec.box_width):
            bad.append({"rule": "doubled-box", "detail": f"covered root {z} lies outside 2B0"})
    metrics = {
        "clusters": len(parts),
        "radii": [str(r) for _, r, _ in parts],
        "multiplicities": [m for _, _, m in parts],
    }
    return VerificationReport(not bad, bad, metrics)


def width_floor_violations(spec: InstanceSpec, result) -> list[dict]:
    """Empirical width floors for preprocessing components and output leaves.

    ``k`` is the number of roots in the doubled query box.
    """
    k = count_roots_in_box(spec, 2 * spec.box_width)
    if k == 0:
        return []
    out = []
    floor_pre = spec.box_width / (48 * k)
    for w in result.state.preprocessing_widths:
        if _q(w) < floor_pre:
            out.append({"rule": "preprocessing-floor", "detail": f"preprocessing width {w} < {floor_pre}"})
    floor_leaf = _q(result.eps_eff) / 2 * Fraction(1, 114 * k) ** k
    for cl in result.clusters:
        if _q(cl.leaf_width) <= floor_leaf:
            out.append({"rule": "leaf-floor", "detail": f"leaf width {cl.leaf_width} <= {floor_leaf}"})
    return out


def count_roots_in_box(spec: InstanceSpec, width: Fraction) -> int:
    return sum(m for z, m in spec.roots if _in_box(z, spec.box_center, width))


# --- corpus generation ---------------------------------------------------

def _rand_fraction(rng: random.Random, lo: float, hi: float, den: int | None = None) -> Fraction:
    den = den or rng.randint(7, 997)
    return Fraction(rng.randint(math.ceil(lo * den), math.floor(hi * den)), den)


def _rand_point(rng: random.Random, half: float) -> Point:
    return _rand_fraction(rng, -half, half), _rand_fraction(rng, -half, half)


def _split_degree(rng: random.Random, total: int, max_mult: int) -> list[int]:
    mults = []
    while total > 0:
        m = rng.randint(1, min(max_mult, total))
        mults.append(m)
        total -= m
    return mults


def _spread_points(rng: random.Random, count: int, half: float, min_dist: Fraction,
                   avoid: Sequence[Point] = ()) -> list[Point]:
    pts: list[Point] = []
    d2 = min_dist * min_dist
    for _ in range(20000):
        if len(pts) == count:
            break
        p = _rand_point(rng, half)
        if all(_dist2(p, q) >= d2 for q in list(pts) + list(avoid)):
            pts.append(p)
    if len(pts) < count:
        raise RuntimeError("could not place roots; lower the degree")
    return pts


_UNIT_DIRECTIONS = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(3, 5), Fraction(4, 5)),
                    (Fraction(-4, 5), Fraction(3, 5)), (Fraction(5, 13), Fraction(-12, 13)),
                    (Fraction(-8, 17), Fraction(-15, 17))]


def _well_separated(rng, degree, max_mult):
    mults = _split_degree(rng, degree, max_mult)
    pts = _spread_points(rng, len(mults), 3.0, Fraction(1))
    return list(zip(pts, mults)), Fraction(8), []


def _clustered_pairs(rng, degree, max_mult):
    mults = _split_degree(rng, degree, max_mult)
    pairs = (len(mults) + 1) // 2
    centers = _spread_points(rng, pairs, 1.5, Fraction(1, 2))
    roots = []
    for i, m in enumerate(mults):
        c = centers[i // 2]
        if i % 2 == 0:
            roots.append((c, m))
        else:
            delta = Fraction(1, 1 << rng.randint(10, 80))
            u = rng.choice(_UNIT_DIRECTIONS)
            roots.append(((c[0] + delta * u[0], c[1] + delta * u[1]), m))
    return roots, Fraction(4), []


def _strong_cluster(rng, degree, max_mult, eps):
    group_size = rng.randint(2, min(degree, 6))
    rest = degree - group_size
    r = eps / 16
    c = _rand_point(rng, 1.2)
    group = []
    for _ in range(group_size):
        # inside Delta(c, r/2) on a dyadic-free lattice
        t = _rand_fraction(rng, -0.35, 0.35), _rand_fraction(rng, -0.35, 0.35)
        group.append(((c[0] + r * t[0], c[1] + r * t[1]), 1))
    roots = _dedupe(group)
    mults = _split_degree(rng, rest, max_mult)
    others = _spread_points(rng, len(mults), 1.6, Fraction(1, 2), avoid=[c])
    roots += list(zip(others, mults))
    return roots, Fraction(4), [(c, r)]


def _boundary_stress(rng, degree, max_mult):
    mults = _split_degree(rng, degree, max_mult)
    width = Fraction(4)
    h = width / 2
    roots = []
    for m in mults:
        kind = rng.randrange(3)
        gap = Fraction(rng.choice([1, -1]), 1 << rng.randint(3, 40)) * Fraction(rng.randint(1, 9), 10)
        along = _rand_fraction(rng, -1.9, 1.9)
        if kind == 0:  # near a vertical edge
            z = (rng.choice([-1, 1]) * (h + gap), along)
        elif kind == 1:  # near a horizontal edge
            z = (along, rng.choice([-1, 1]) * (h + gap))
        else:  # in 2B0 \ B0
            z = (rng.choice([-1, 1]) * _rand_fraction(rng, 2.1, 3.9), _rand_fraction(rng, -3.9, 3.9))
        roots.append((z, m))
    return _dedupe(roots), width, []


def _adventitious(rng, degree, max_mult):
    mults = _split_degree(rng, degree, max_mult)
    roots = []
    for m in mults:
        far = rng.random() < 0.4
        lo, hi = (4.5, 30.0) if far else (2.05, 3.95)
        x = rng.choice([-1, 1]) * _rand_fraction(rng, lo, hi)
        y = _rand_fraction(rng, -hi, hi)
        roots.append(((x, y) if rng.random() < 0.5 else (y, x), m))
    return _dedupe(roots), Fraction(4), []


def _dedupe(roots):
    merged: dict = {}
    for z, m in roots:
        merged[z] = merged.get(z, 0) + m
    return list(merged.items())


def gen_corpus(seed: int, profile: str, count: int = 50, max_degree: int = 12, max_mult: int = 4,
               eps_choices: Sequence[Fraction] = (Fraction(1, 1 << 10), Fraction(1, 1 << 40))) -> list[InstanceSpec]:
    """``count`` ground-truth instances of one profile; deterministic in ``seed``."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    rng = random.Random(f"{profile}:{seed}")
    out = []
    for i in range(count):
        degree = rng.randint(2 if profile == "strong-cluster" else 1, max_degree)
        eps = Fraction(eps_choices[i % len(eps_choices)])
        if profile == "well-separated":
            roots, width, wit = _well_separated(rng, degree, max_mult)
        elif profile == "clustered-pairs":
            roots, width, wit = _clustered_pairs(rng, degree, max_mult)
        elif profile == "strong-cluster":
            roots, width, wit = _strong_cluster(rng, degree, max_mult, eps)
        elif profile == "boundary-stress":
            roots, width, wit = _boundary_stress(rng, degree, max_mult)
        else:
            roots, width, wit = _adventitious(rng, degree, max_mult)
        lcf = Fraction(rng.choice([1, 1, 3, -5, 7]), rng.choice([1, 2, 3]))
        out.append(InstanceSpec(roots, lcf, (0, 0), width, eps, seed * 100003 + i, profile, wit))
    return out


# --- benchmarks ----------------------------------------------------------

@dataclass
class BenchRow:
    eps: Fraction
    newton: bool
    max_depth: int
    boxes: int
    max_precision_bits: int
    wall_time: float


def depth_benchmark(spec: InstanceSpec, eps_list: Sequence, newton: bool = True) -> list[BenchRow]:
    """Solve ``spec`` at each ``eps`` and record tree depth, box count and precision."""
    from .solver import solve

    F = spec.polynomial()
    rows = []
    for eps in eps_list:
        res = solve(F, spec.box, eps, newton=newton)
        s = res.stats
        rows.append(BenchRow(_q(eps), newton, s.max_tree_depth, s.boxes_created,
                             s.max_precision_bits, s.wall_time))
    return rows


def write_csv(rows: Sequence[BenchRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps_log2", "newton", "max_depth", "boxes", "max_precision_bits", "wall_time"])
        for r in rows:
            w.writerow([math.log2(r.eps), int(r.newton), r.max_depth, r.boxes,
                        r.max_precision_bits, f"{r.wall_time:.4f}"])


def write_corpus(specs: Sequence[InstanceSpec], path) -> None:
    with open(path, "w") as fh:
        json.dump([s.to_json() for s in specs], fh, indent=1)


# --- floating point cross-check -------------------------------------------

def durand_kerner(coeffs: Sequence[complex], iters: int = 500, tol: float = 1e-14) -> list[complex]:
    """All roots of ``sum(coeffs[i] z**i)`` by Weierstrass iteration, in floats.

    A sanity tool only: it has no certificate and fails on clusters.
    """
    c = [complex(x) for x in coeffs]
    n = len(c) - 1
    lead = c[-1]
    c = [x / lead for x in c]
    bound = 1 + max(abs(x) for x in c[:-1])
    z = [bound * cmath.exp(2j * math.pi * (k + 0.25) / n) for k in range(n)]

    def p(x):
        acc = 0j
        for a in reversed(c):
            acc = acc * x + a
        return acc

    for _ in range(iters):
        moved = 0.0
        for i in range(n):
            den = 1 + 0j
            for j in range(n):
                if i != j:
                    den *= z[i] - z[j]
            if den == 0:
                den = 1e-300
            step = p(z[i]) / den
            z[i] -= step
            moved = max(moved, abs(step))
        if moved < tol:
            break
    return z
