import json
from fractions import Fraction

import pytest

from rootclust.dyadic import ComplexDyadic, Dyadic
from rootclust.geometry import Disc
from rootclust.solver import Cluster, solve
from rootclust.validation import (PROFILES, BoundaryAmbiguity, InstanceSpec, count_roots_in_disc,
                                  depth_benchmark, durand_kerner, gen_corpus, verify_solution, write_csv)

Q = Fraction
PAIR = InstanceSpec([(1, 3), (-1, 1)], 1, (0, 0), 4, Q(1, 1024))


def test_count_examples():
    spec = InstanceSpec([(1, 3)])
    assert count_roots_in_disc(spec, ((1, 0), Q(1, 10))) == 3
    assert count_roots_in_disc(PAIR, ((0, 0), Q(1, 2))) == 0
    near = InstanceSpec([(1, 3), (1 + Q(1, 1 << 20), 2)])
    assert count_roots_in_disc(near, ((1, 0), Q(1, 1 << 19))) == 5


def test_boundary_ambiguity():
    assert count_roots_in_disc(PAIR, ((0, 0), 1)) == 4
    with pytest.raises(BoundaryAmbiguity):
        count_roots_in_disc(PAIR, ((0, 0), 1), strict=True)


def _cl(x, r, m):
    return Cluster(Disc(ComplexDyadic(Dyadic.coerce(x)), Dyadic.coerce(r)), m)


def test_verify_examples():
    good = [_cl(1, Q(1, 1024), 3), _cl(-1, Q(1, 1024), 1)]
    assert verify_solution(PAIR, good).ok
    overlap = [_cl(1, 2, 3), _cl(-1, Q(1, 1024), 1)]
    rules = {v["rule"] for v in verify_solution(PAIR, overlap).violations}
    assert "disjointness" in rules
    dropped = [_cl(1, Q(1, 1024), 3)]
    rules = [v["rule"] for v in verify_solution(PAIR, dropped).violations]
    assert rules == ["coverage"]


def test_verify_flags_radius_isolator_and_doubled_box():
    spec = InstanceSpec([(1, 3), (-1, 1), (5, 1)], 1, (0, 0), 4, Q(1, 1024))
    rep = verify_solution(spec, [_cl(1, Q(1, 2), 3), _cl(-1, Q(1, 1024), 1), _cl(5, Q(1, 1024), 1)])
    rules = [v["rule"] for v in rep.violations]
    assert rules == ["radius", "doubled-box"]
    rep = verify_solution(spec, [_cl(Q(1, 2), Q(1, 1024), 3)])
    assert "isolator" in {v["rule"] for v in rep.violations}


def test_corpus_deterministic():
    for p in PROFILES:
        a = [s.to_json() for s in gen_corpus(3, p, 6)]
        b = [s.to_json() for s in gen_corpus(3, p, 6)]
        assert a == b
    assert gen_corpus(3, "well-separated", 3)[0].to_json() != gen_corpus(4, "well-separated", 3)[0].to_json()


def test_well_separated_distances():
    for spec in gen_corpus(1, "well-separated", 20):
        pts = [z for z, _ in spec.roots]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d2 = (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
                assert d2 >= 1


def test_profile_shapes():
    for spec in gen_corpus(2, "strong-cluster", 20):
        (c, r), = spec.witnesses
        assert r <= spec.eps / 12
        k = count_roots_in_disc(spec, (c, r))
        assert k >= 2 and k == count_roots_in_disc(spec, (c, 114 * r))
    h = 2
    for spec in gen_corpus(2, "adventitious", 20):
        assert all(max(abs(z[0]), abs(z[1])) > h for z, _ in spec.roots)
    for spec in gen_corpus(2, "clustered-pairs", 20):
        assert spec.degree <= 12 and all(m <= 4 for _, m in spec.roots)
    for spec in gen_corpus(2, "boundary-stress", 20):
        assert any(h / 2 < max(abs(z[0]), abs(z[1])) < 2 * h for z, _ in spec.roots)


def test_self_test_on_forced_answers():
    # well-separated roots with eps far below the gaps: the exact answer is forced
    for spec in gen_corpus(5, "well-separated", 10):
        spec.eps = Q(1, 1 << 12)
        exact = [(z, Q(1, 1 << 13), m) for z, m in spec.roots]
        assert verify_solution(InstanceSpec(spec.roots, 1, spec.box_center, 1000, spec.eps), exact).ok


def test_json_round_trip():
    for spec in gen_corpus(9, "strong-cluster", 3):
        again = InstanceSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert again.to_json() == spec.to_json()


def test_depth_benchmark_and_csv(tmp_path):
    spec = InstanceSpec([((Q(1, 3), Q(1, 5)), 2), (-1, 1)], 1, (0, 0), 4)
    rows = depth_benchmark(spec, [Q(1, 1 << 16), Q(1, 1 << 32)], newton=False)
    assert [r.eps for r in rows] == [Q(1, 1 << 16), Q(1, 1 << 32)]
    assert rows[1].max_depth > rows[0].max_depth
    path = tmp_path / "bench.csv"
    write_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("eps_log2,newton,max_depth")
    assert len(lines) == 3


def test_durand_kerner_sanity():
    spec = InstanceSpec([((Q(1, 2), Q(1, 3)), 1), ((-1, Q(1, 5)), 1), ((Q(3, 2), -1), 1)])
    F = spec.polynomial()
    coeffs = [complex(float(a), float(b)) for a, b in F._exact]
    approx = durand_kerner(coeffs)
    res = solve(F, spec.box, Q(1, 1 << 20))
    assert len(res.clusters) == 3
    for c in res.clusters:
        z = complex(c.center)
        assert min(abs(z - a) for a in approx) < float(c.radius) + 1e-9
