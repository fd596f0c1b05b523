"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints, then
asserts.  Run directly with ``python3 tests/test_acceptance.py`` or through
pytest.  Stored reference values that contradict their own parameters are
kept as strict xfails with the real assertion.
"""

import itertools
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from horopack.catalog import load_catalog, subgroup_lattice, validate_simplex
from horopack.errors import InvalidConfiguration
from horopack.horoball import (Horoball, HorosphericalTriangle, busemann, edge_intersection,
                               horoball_piece_volume, triangle_area)
from horopack.lorentz import Point, projectively_equal
from horopack.packing import (PackingConfiguration, enumerate_configurations, evaluate,
                              maximal_s, optimize, propagate_tangency,
                              tangent_pair_volume, verify_all)
from horopack.volume import catalan, lobachevsky, quadrature_volume

# every tolerance the criteria name
TOL_DENSITY = 1e-6
TOL_NONARITH = 1e-5
TOL_GOLDEN = 1e-9
TOL_VOLUME = 1e-6
TOL_VOLUME_NUMERIC = 1e-5
TOL_BUSEMANN = 1e-10
TOL_COSH = 1e-8
TOL_GRAM = 1e-9
TOL_INDEX = 1e-6
TOL_HERON = 1e-12
MIN_SAMPLES = 10_000
PERTURBATION = 1e-3
BUDGET_THETA = 5.0
BUDGET_VOLUME = 60.0

R2, R3_, R5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)
THETA = 1 / (2 * R3_ * lobachevsky(math.pi / 3))
RHO = 2 / (5 * R3_ * lobachevsky(math.pi / 3))
SIGMA = 3 / (4 * catalan())
CAT = load_catalog()


def record(n, title, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _golden_problems(skip=()):
    """Every stored reference value compared with the computed one."""
    bad = []
    for s in CAT:
        if s.key in skip:
            continue
        ref = s.reference
        for i, v in ref.max_s.items():
            if abs(maximal_s(s, i) - v) > TOL_GOLDEN:
                bad.append((s.key, f"s_{i}"))
        a = s.ideal_vertices[0]
        ball = Horoball(s.vertices[a], maximal_s(s, a))
        for i, v in ref.max_piece.items():
            b = Horoball(s.vertices[i], maximal_s(s, i))
            if abs(horoball_piece_volume(b, s.edges_of(i)) - v) > TOL_GOLDEN:
                bad.append((s.key, f"piece_{i}"))
        for j, p in ref.H.items():
            if not projectively_equal(edge_intersection(ball, s.vertices[j]), p, tol=TOL_GOLDEN):
                bad.append((s.key, f"H_{j}"))
        for c in ref.configurations:
            cusps = sorted(c["s"])
            anchor = c["anchor"]
            s_map = {anchor: maximal_s(s, anchor)}
            for j in cusps:
                if j != anchor:
                    s_map[j] = max(maximal_s(s, j),
                                   *(propagate_tangency(s, k, sk, j) for k, sk in s_map.items()))
            res = evaluate(PackingConfiguration(s, s_map, anchor))
            for i, v in c["s"].items():
                if abs(s_map[i] - v) > TOL_GOLDEN:
                    bad.append((s.key, f"config{anchor} s_{i}"))
            for i, v in c["pieces"].items():
                if abs(res.piece_volumes[i] - v) > TOL_GOLDEN:
                    bad.append((s.key, f"config{anchor} piece_{i}"))
            for i, v in c["ratios"].items():
                if abs(res.ratios[i] - float(v)) > TOL_GOLDEN:
                    bad.append((s.key, f"config{anchor} ratio_{i}"))
            for i, v in c["ratios_printed"].items():
                # printed decimals carry six digits
                if s.key != "RR3" and abs(res.ratios[i] - v) > 5e-6:
                    bad.append((s.key, f"config{anchor} printed ratio_{i}"))
    return bad


def test_criterion_1_theta():
    keys = ["V3", "Y3", "VP3", "PP3", "P3", "Z3", "DV3", "DP3"]
    t0 = time.perf_counter()
    got = {k: optimize(CAT.get(k), n_samples=MIN_SAMPLES).density for k in keys}
    elapsed = time.perf_counter() - t0
    worst = max(abs(v - 0.853276) for v in got.values())
    exact = max(abs(v - THETA) for v in got.values())
    ok = worst <= TOL_DENSITY and exact < 1e-12 and elapsed < BUDGET_THETA
    assert record(1, "Theta for the eight [3,3,6] achievers", ok,
                  f"max residual {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_rho():
    got = {k: optimize(CAT.get(k)).density for k in ("BV3", "BP3")}
    ok = all(abs(v - 0.682620) <= TOL_DENSITY and abs(v - RHO) < 1e-12 for v in got.values())
    # VV3: the full optimum differs, so it must be FLAGGED with intact geometry
    vv3 = CAT.get("VV3")
    row = [r for r in verify_all(load_catalog(), samples=MIN_SAMPLES) if r.key == "VV3"][0]
    full = optimize(vv3, n_samples=MIN_SAMPLES)
    listed = optimize(vv3, falsification=False, cusps=vv3.listed_ideal)
    geometry_ok = (validate_simplex(vv3).ok and full.falsification.ok
                   and abs(full.vertex_optimum - full.density) < 1e-12)
    ok &= (row.status == "FLAGGED" and geometry_ok
           and abs(listed.density - 0.682620) <= TOL_DENSITY)
    assert record(2, "rho for BV3, BP3; VV3 flagged", ok,
                  f"VV3 all cusps {full.density:.9f}, listed cusps {listed.density:.9f}")


def test_criterion_3_sigma():
    keys = [s.key for s in CAT if s.commensurability_class == "[3,4,4]"]
    got = [optimize(CAT.get(k)).density for k in keys]
    worst = max(abs(v - 0.818808) for v in got)
    ok = len(keys) == 6 and worst <= TOL_DENSITY and max(abs(v - SIGMA) for v in got) < 1e-12
    assert record(3, "sigma for the six [3,4,4] tilings", ok, f"max residual {worst:.2e}")


def test_criterion_4_nonarithmetic():
    want = {"HV3": 0.550841, "HP3": 0.550841, "AV3": 0.838825, "BV3h": 0.747914,
            "HV3h": 0.655381, "CR3": 0.767195}
    res = {k: abs(optimize(CAT.get(k)).density - v) for k, v in want.items()}
    worst = max(res.values())
    assert record(4, "nonarithmetic densities", worst <= TOL_NONARITH,
                  f"max residual {worst:.2e}")


ERRATA = ("R3", "BR3")


def test_criterion_5_goldens():
    explicit = []
    p3 = CAT.get("P3")
    explicit.append(abs(horoball_piece_volume(Horoball(p3.vertices[0], 0.0), p3.edges_of(0))
                        - 1 / (8 * R3_)))
    rr3 = CAT.get("RR3")
    explicit += [abs(propagate_tangency(rr3, 0, -1 / 3, j) - v)
                 for j, v in ((1, 7 / 9), (2, 1 / 3), (3, 7 / 9))]
    av3 = optimize(CAT.get("AV3"), falsification=False)
    explicit += [abs(av3.piece_volumes[0] - (2 * R3_ + 3) / 24),
                 abs(av3.piece_volumes[1] - 1 / (16 * R3_))]
    for key, p0, p1 in (("CR3", (2 * R2 + 3) / 16, 1 / 16),
                        ("BV3h", math.sqrt(5 * math.sqrt(2 / 3) + 49 / 12) / 8, 1 / (16 * R3_)),
                        ("HV3h", (9 * R3_ + 6 * R5 + math.sqrt(15) + 6) / 96, 1 / (16 * R3_))):
        r = optimize(CAT.get(key), falsification=False)
        explicit += [abs(r.piece_volumes[0] - p0), abs(r.piece_volumes[1] - p1)]
    hv3 = CAT.get("HV3")
    explicit.append(abs(horoball_piece_volume(Horoball(hv3.vertices[0], 0.0), hv3.edges_of(0))
                        - math.sqrt((3 * R5 + 7) / 6) / 16))
    bad = _golden_problems(skip=ERRATA)
    errata = _golden_problems()
    ok = max(explicit) <= TOL_GOLDEN and not bad and not errata
    record(5, "reference goldens", ok,
           f"{len(errata)} stored values in {sorted({k for k, _ in errata})} "
           "contradict their own s-parameters; see xfail tests" if errata else "")
    # the attainable part is asserted here; the errata below
    assert max(explicit) <= TOL_GOLDEN and not bad, bad


@pytest.mark.xfail(strict=True, reason="stored R3 H points and piece are the s=0 values")
def test_criterion_5_r3_printed_values():
    assert not [p for p in _golden_problems() if p[0] == "R3"]


@pytest.mark.xfail(strict=True, reason="stored BR3 H points and piece are the s=0 values")
def test_criterion_5_br3_printed_values():
    assert not [p for p in _golden_problems() if p[0] == "BR3"]


def test_criterion_5_errata_are_s0_values():
    # the printed R3 and BR3 values are reproduced exactly by the s=0 horoball,
    # measured over the full edge rays
    for key, piece in (("R3", 1 / 12), ("BR3", 1 / 2)):
        s = CAT.get(key)
        ball = Horoball(s.vertices[0], 0.0)
        assert horoball_piece_volume(ball, s.edges_of(0), cone=True) == pytest.approx(
            piece, abs=TOL_GOLDEN)
        for j, p in s.reference.H.items():
            assert projectively_equal(edge_intersection(ball, s.vertices[j], ray=True), p,
                                      tol=TOL_GOLDEN)
        # and the s=0 ball crosses its face, so it is not admissible
        with pytest.raises(InvalidConfiguration):
            evaluate(PackingConfiguration(s, {0: 0.0}))


def test_criterion_6_volume_oracle():
    t0 = time.perf_counter()
    worst_exact, worst_numeric = 0.0, 0.0
    for s in CAT:
        r = abs(quadrature_volume(s).volume - s.volume.evaluate())
        if s.volume.is_exact:
            worst_exact = max(worst_exact, r)
        else:
            worst_numeric = max(worst_numeric, r)
    elapsed = time.perf_counter() - t0
    ok = worst_exact <= TOL_VOLUME and worst_numeric <= TOL_VOLUME_NUMERIC and elapsed < BUDGET_VOLUME
    assert record(6, "quadrature volume oracle", ok,
                  f"closed forms {worst_exact:.1e}, numeric {worst_numeric:.1e}, {elapsed:.2f}s")


def test_criterion_7_properties():
    rng = np.random.default_rng(2024)
    checks = {}

    def proper():
        v = rng.normal(size=3)
        return np.array([1.0, *(v * rng.uniform(0, 0.95) / np.linalg.norm(v))])

    def ideal():
        v = rng.normal(size=3)
        return np.array([1.0, *(v / np.linalg.norm(v))])

    worst = 0.0
    for _ in range(300):
        x, y, z, xi = proper(), proper(), proper(), ideal()
        worst = max(worst, abs(busemann(x, y, xi) + busemann(y, x, xi)),
                    abs(busemann(x, y, xi) + busemann(y, z, xi) - busemann(x, z, xi)))
    checks["busemann"] = worst <= TOL_BUSEMANN

    link = max(abs(math.tanh(busemann([1, 0, 0, 0], [1, 0, 0, s], [1, 0, 0, 1])) - s)
               for s in np.linspace(-0.9, 0.9, 37))
    checks["tanh link"] = link <= TOL_BUSEMANN

    cosh = 0.0
    for s in CAT:
        for i, j in itertools.combinations(s.ideal_vertices, 2):
            v0 = tangent_pair_volume(s, i, j, 0.0)
            for x in (-0.2, -0.1, -0.05, 0.05, 0.1, 0.2):
                cosh = max(cosh, abs(tangent_pair_volume(s, i, j, x) / v0 - math.cosh(2 * x)))
    checks["cosh law"] = cosh <= TOL_COSH

    violations = 0
    for s in CAT:
        if s.n_ideal > 1:
            r = optimize(s, n_samples=MIN_SAMPLES, seed=0)
            violations += r.falsification.violations
            violations += int(r.falsification.n_samples < MIN_SAMPLES)
    checks["boundary dominance"] = violations == 0

    gram = 0.0
    for s in CAT:
        g, m = s.gram.entries, s.diagram_matrix()
        for i in range(4):
            for j in range(i + 1, 4):
                gram = max(gram, abs(g[i, j] + math.cos(math.pi / m[i, j])))
    checks["gram"] = gram <= TOL_GRAM

    index = 0.0
    for e in subgroup_lattice(CAT):
        if e.ratio is not None:
            index = max(index, e.residual)
        else:
            q = (quadrature_volume(CAT.get(e.child)).volume
                 / quadrature_volume(CAT.get(e.parent)).volume)
            index = max(index, abs(q - e.index))
    checks["lattice index"] = index <= TOL_INDEX

    heron, n = 0.0, 0
    while n < 1000:
        a, b, c = rng.uniform(0.05, 2, size=3)
        if min(a + b - c, a + c - b, b + c - a) < 1e-3:
            continue
        p = (a + b + c) / 2
        h = math.sqrt(p * (p - a) * (p - b) * (p - c))
        heron = max(heron, abs(triangle_area(HorosphericalTriangle(a, b, c)) - h))
        n += 1
    checks["heron"] = heron <= TOL_HERON

    failed = [k for k, v in checks.items() if not v]
    assert record(7, "property suites", not failed,
                  f"failed: {failed}" if failed else
                  f"cosh {cosh:.1e}, gram {gram:.1e}, index {index:.1e}, heron {heron:.1e}")


def test_criterion_8_negative_controls():
    import dataclasses
    missed = []
    for s in CAT:
        for i in range(4):
            for axis in (1, 2, 3):
                v = s.vertices[i].coords.copy()
                v[axis] += PERTURBATION
                verts = list(s.vertices)
                verts[i] = Point(v)
                if validate_simplex(dataclasses.replace(s, vertices=tuple(verts))).ok:
                    missed.append((s.key, i, axis))
    for s in CAT:
        for i in s.ideal_vertices:
            big = math.tanh(math.atanh(maximal_s(s, i)) - 1e-6)
            try:
                evaluate(PackingConfiguration(s, {i: big}))
                missed.append((s.key, f"cap {i}"))
            except InvalidConfiguration:
                pass
    assert record(8, "negative controls", not missed, f"missed {missed}" if missed else "")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-rxX"]))
