"""Optimal horoball packings of Coxeter simplex tilings.

Every ideal vertex of the fundamental simplex may carry a horoball.  A
horoball may not cross the face opposite its centre, and two horoballs may
touch but not overlap along the edge joining their centres.  In Busemann
coordinates ``b = artanh(s)`` these are linear constraints

    b_i >= c_i                      (face cap)
    b_i + b_j >= tau_ij             (edge tangency)

while each piece volume scales as ``exp(-2 b)``.  The density is therefore
convex in ``b`` and its maximum sits on a vertex of the feasible polyhedron.
``optimize`` evaluates the anchored configurations (one horoball maximal, the
others pushed to tangency) and cross-checks them against an exact vertex
enumeration and a random interior sampler.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .catalog import Catalog, CoxeterSimplex, get_simplex, load_catalog
from .errors import InvalidConfiguration, NoTangency
from .horoball import (Horoball, edge_intersection, horoball_piece_volume,
                       s_from_tangency)
from .lorentz import lorentz_inner, project_onto_plane
from .volume import quadrature_volume

TOL_FEAS = 1e-10     # slack on packing constraints (Busemann units)
N_SHARDS = 4


def _ideal_point(simplex: CoxeterSimplex, i: int) -> np.ndarray:
    x = simplex.vertices[i].coords
    return x / x[0]


def _require_ideal(simplex: CoxeterSimplex, i: int) -> None:
    if i not in simplex.ideal_vertices:
        raise NoTangency(f"vertex {i} of {simplex.key} is not ideal")


def maximal_s(simplex: CoxeterSimplex, i: int) -> float:
    """s-parameter of the largest horoball at vertex ``i`` that stays on the
    simplex side of the opposite face (tangent to it)."""
    _require_ideal(simplex, i)
    a = simplex.vertices[i]
    foot = project_onto_plane(a, simplex.faces[i])
    return s_from_tangency(a, foot)


def tangency_offset(simplex: CoxeterSimplex, i: int, j: int) -> float:
    """``tau_ij``: horoballs at ideal vertices i and j touch iff b_i + b_j = tau_ij."""
    xi, xj = _ideal_point(simplex, i), _ideal_point(simplex, j)
    return math.log(2.0 / -lorentz_inner(xi, xj))


def propagate_tangency(simplex: CoxeterSimplex, from_index: int, s_from: float,
                       to_index: int) -> float:
    """s-parameter at ``to_index`` making its horoball touch the horoball of
    parameter ``s_from`` at ``from_index`` on their common edge."""
    _require_ideal(simplex, from_index)
    _require_ideal(simplex, to_index)
    if from_index == to_index:
        raise NoTangency("a horoball cannot be tangent to itself")
    cap = maximal_s(simplex, from_index)
    if s_from < cap - 1e-12:
        raise NoTangency(
            f"horoball at vertex {from_index} crosses its opposite face "
            f"(s={s_from:.12g} below cap {cap:.12g})")
    ball = Horoball(simplex.vertices[from_index], s_from)
    touch = edge_intersection(ball, simplex.vertices[to_index])
    return s_from_tangency(simplex.vertices[to_index], touch)


@dataclass(frozen=True, eq=False)
class PackingConfiguration:
    """Horoball s-parameters at (a subset of) the ideal vertices."""

    simplex: CoxeterSimplex
    s: Mapping[int, float]
    anchor: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "s", {int(k): float(v) for k, v in sorted(self.s.items())})

    @property
    def busemann(self) -> dict:
        return {i: math.atanh(v) for i, v in self.s.items()}

    def violations(self, tol: float = TOL_FEAS) -> list:
        """Violated constraints as ``(name, amount)`` pairs, amount in Busemann units."""
        out = []
        b = self.busemann
        for i in b:
            if i not in self.simplex.ideal_vertices:
                out.append((f"vertex {i} is not ideal", math.inf))
                continue
            if not -1.0 < self.s[i] < 1.0:
                out.append((f"s_{i} outside (-1, 1)", math.inf))
                continue
            gap = math.atanh(maximal_s(self.simplex, i)) - b[i]
            if gap > tol:
                out.append((f"face cap at vertex {i}", gap))
        for i, j in itertools.combinations(sorted(b), 2):
            gap = tangency_offset(self.simplex, i, j) - b[i] - b[j]
            if gap > tol:
                out.append((f"overlap on edge {i}-{j}", gap))
        return out

    def key(self, digits: int = 9) -> tuple:
        return tuple((i, round(v, digits)) for i, v in self.s.items())


@dataclass(frozen=True, eq=False)
class PackingResult:
    configuration: PackingConfiguration
    piece_volumes: Mapping[int, float]
    ratios: Mapping[int, float]
    density: float
    volume: float
    maximizers: tuple = ()
    falsification: "FalsificationReport | None" = None
    vertex_optimum: float | None = None

    @property
    def s(self) -> dict:
        return dict(self.configuration.s)

    @property
    def anchor(self):
        return self.configuration.anchor

    def exact_ratios(self, max_denominator: int = 48, tol: float = 1e-9):
        """Ratios as fractions when each is within ``tol`` of one, else None."""
        out = {}
        for i, r in self.ratios.items():
            f = Fraction(r).limit_denominator(max_denominator)
            if abs(float(f) - r) > tol:
                return None
            out[i] = f
        return out


def _simplex_volume(simplex: CoxeterSimplex, volume: str | float) -> float:
    if isinstance(volume, (int, float)):
        return float(volume)
    if volume == "closed":
        return simplex.volume.evaluate()
    if volume == "quadrature":
        return _quadrature_cached(simplex)
    raise ValueError(f"unknown volume source {volume!r}")


_QUAD_CACHE: dict = {}


def _quadrature_cached(simplex: CoxeterSimplex) -> float:
    key = (simplex.key, tuple(tuple(v.coords) for v in simplex.vertices))
    if key not in _QUAD_CACHE:
        _QUAD_CACHE[key] = quadrature_volume(simplex).volume
    return _QUAD_CACHE[key]


def default_volume(simplex: CoxeterSimplex) -> float:
    """Closed form where one exists, otherwise the quadrature value.

    Purely numeric reference volumes carry only five or six digits, so the
    quadrature value is the better denominator for them.
    """
    if simplex.volume.is_exact:
        return simplex.volume.evaluate()
    return _quadrature_cached(simplex)


def evaluate(configuration: PackingConfiguration,
             volume: str | float | None = None) -> PackingResult:
    """Density of a configuration: total piece volume over simplex volume."""
    bad = configuration.violations()
    if bad:
        name, amount = max(bad, key=lambda t: t[1])
        raise InvalidConfiguration(
            f"{configuration.simplex.key}: {name} violated by {amount:.3g}",
            constraint=name)
    simplex = configuration.simplex
    pieces = {}
    for i, s in configuration.s.items():
        ball = Horoball(simplex.vertices[i], s)
        pieces[i] = horoball_piece_volume(ball, simplex.edges_of(i))
    vol = default_volume(simplex) if volume is None else _simplex_volume(simplex, volume)
    total = sum(pieces.values())
    ratios = {i: v / total for i, v in pieces.items()}
    return PackingResult(configuration, pieces, ratios, total / vol, vol)


def enumerate_configurations(simplex: CoxeterSimplex,
                             cusps: Sequence[int] | None = None) -> list:
    """Anchored configurations: for each ideal vertex, make its horoball
    maximal and shrink the others, in index order, just enough to respect
    every face cap and every horoball already placed."""
    ideal = list(simplex.ideal_vertices if cusps is None else cusps)
    caps = {i: maximal_s(simplex, i) for i in ideal}
    seen, out = set(), []
    for anchor in ideal:
        s = {anchor: caps[anchor]}
        for j in ideal:
            if j == anchor:
                continue
            sj = caps[j]
            for k, sk in s.items():
                sj = max(sj, propagate_tangency(simplex, k, sk, j))
            s[j] = sj
        cfg = PackingConfiguration(simplex, s, anchor)
        if cfg.key() not in seen:
            seen.add(cfg.key())
            out.append(cfg)
    return out


def tangent_pair_volume(simplex: CoxeterSimplex, i: int, j: int,
                        x: float) -> float:
    """Total piece volume of two tangent horoballs at ideal vertices i and j,
    with the tangency point moved a distance ``x`` toward j from the point
    where both pieces are equal.  Pieces are measured geometrically in the
    infinite cones over each cusp, so caps play no role."""
    tau = tangency_offset(simplex, i, j)
    ci, cj = math.atanh(maximal_s(simplex, i)), math.atanh(maximal_s(simplex, j))
    vi = horoball_piece_volume(Horoball.from_busemann(simplex.vertices[i], ci),
                               simplex.edges_of(i)) * math.exp(2 * ci)
    vj = horoball_piece_volume(Horoball.from_busemann(simplex.vertices[j], cj),
                               simplex.edges_of(j)) * math.exp(2 * cj)
    # vi e^{-2 bi} = vj e^{-2 bj} with bi + bj = tau
    bi = 0.5 * tau + 0.25 * math.log(vi / vj)
    bi, bj = bi - x, tau - bi + x
    return (horoball_piece_volume(Horoball.from_busemann(simplex.vertices[i], bi),
                                  simplex.edges_of(i), cone=True)
            + horoball_piece_volume(Horoball.from_busemann(simplex.vertices[j], bj),
                                    simplex.edges_of(j), cone=True))


# -- Busemann-space model ---------------------------------------------------

@dataclass(frozen=True)
class _Model:
    """Linear constraints and piece-volume scaling in Busemann coordinates."""

    cusps: tuple
    caps: np.ndarray          # c_i
    pairs: tuple              # (a, b) positions into cusps
    taus: np.ndarray          # tau for each pair
    base: np.ndarray          # piece volume at b = 0
    volume: float

    def density(self, b: np.ndarray) -> np.ndarray:
        b = np.atleast_2d(b)
        return (self.base * np.exp(-2.0 * b)).sum(axis=1) / self.volume

    def feasible(self, b: np.ndarray, tol: float = TOL_FEAS) -> np.ndarray:
        b = np.atleast_2d(b)
        ok = np.all(b >= self.caps - tol, axis=1)
        for (p, q), t in zip(self.pairs, self.taus):
            ok &= b[:, p] + b[:, q] >= t - tol
        return ok


def _model(simplex: CoxeterSimplex, cusps, volume: float) -> _Model:
    cusps = tuple(cusps)
    caps = np.array([math.atanh(maximal_s(simplex, i)) for i in cusps])
    pairs = tuple(itertools.combinations(range(len(cusps)), 2))
    taus = np.array([tangency_offset(simplex, cusps[p], cusps[q]) for p, q in pairs])
    base = []
    for k, i in enumerate(cusps):
        ball = Horoball(simplex.vertices[i], maximal_s(simplex, i))
        v = horoball_piece_volume(ball, simplex.edges_of(i))
        base.append(v * math.exp(2.0 * caps[k]))
    return _Model(cusps, caps, pairs, taus, np.array(base), volume)


def polyhedron_vertices(simplex: CoxeterSimplex, cusps=None,
                        volume: float | None = None) -> list:
    """All vertices of the feasible polyhedron in Busemann coordinates, as
    ``(density, s-dict)`` pairs sorted by decreasing density."""
    cusps = tuple(simplex.ideal_vertices if cusps is None else cusps)
    vol = default_volume(simplex) if volume is None else volume
    m = _model(simplex, cusps, vol)
    n = len(cusps)
    rows, rhs = [], []
    for k in range(n):
        r = np.zeros(n)
        r[k] = 1.0
        rows.append(r)
        rhs.append(m.caps[k])
    for (p, q), t in zip(m.pairs, m.taus):
        r = np.zeros(n)
        r[p] = r[q] = 1.0
        rows.append(r)
        rhs.append(t)
    rows, rhs = np.array(rows), np.array(rhs)
    found = {}
    for sub in itertools.combinations(range(len(rows)), n):
        a = rows[list(sub)]
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        b = np.linalg.solve(a, rhs[list(sub)])
        if not m.feasible(b, tol=1e-9)[0]:
            continue
        key = tuple(np.round(b, 9))
        if key not in found:
            s = {i: math.tanh(v) for i, v in zip(cusps, b)}
            found[key] = (float(m.density(b)[0]), s)
    return sorted(found.values(), key=lambda t: -t[0])


@dataclass(frozen=True)
class FalsificationReport:
    n_samples: int
    n_feasible: int
    best_density: float
    refined_density: float
    optimum: float
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _sample_shard(m: _Model, n: int, seed, span: float) -> tuple:
    rng = np.random.default_rng(seed)
    k = len(m.cusps)
    b = m.caps + span * rng.random((n, k))
    ok = m.feasible(b, tol=0.0)
    d = m.density(b[ok])
    best = float(d.max()) if d.size else -math.inf
    arg = b[ok][int(np.argmax(d))] if d.size else None
    return int(ok.sum()), best, arg, d


def falsify(simplex: CoxeterSimplex, optimum: float, n_samples: int = 10000,
            seed: int = 0, jobs: int = 1, cusps=None,
            volume: float | None = None) -> FalsificationReport:
    """Look for a feasible configuration denser than ``optimum``.

    Uniform samples in the box above the face caps (in Busemann coordinates)
    are filtered by the tangency constraints; a regular grid and a local
    ascent from the best samples complete the search.  Any point beating
    ``optimum`` by more than 1e-12 counts as a violation.
    """
    cusps = tuple(simplex.ideal_vertices if cusps is None else cusps)
    vol = default_volume(simplex) if volume is None else volume
    m = _model(simplex, cusps, vol)
    span = float(max(1.0, np.max(m.taus) - 2 * np.min(m.caps) + 1.0)) if m.pairs else 1.0
    seeds = np.random.SeedSequence(seed).spawn(N_SHARDS)
    sizes = [n_samples // N_SHARDS + (1 if r < n_samples % N_SHARDS else 0)
             for r in range(N_SHARDS)]
    args = [(m, sz, sd, span) for sz, sd in zip(sizes, seeds)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            shards = list(ex.map(lambda a: _sample_shard(*a), args))
    else:
        shards = [_sample_shard(*a) for a in args]

    feasible = sum(s[0] for s in shards)
    densities = np.concatenate([s[3] for s in shards]) if shards else np.array([])
    best = max((s[1] for s in shards), default=-math.inf)
    limit = optimum * (1.0 + 1e-12)
    violations = int(np.sum(densities > limit))

    # regular grid over the same box
    per_axis = max(2, int(round(20000 ** (1.0 / len(cusps)))))
    axes = [np.linspace(c, c + span, per_axis) for c in m.caps]
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(cusps), -1).T
    grid = grid[m.feasible(grid, tol=0.0)]
    if grid.size:
        gd = m.density(grid)
        violations += int(np.sum(gd > limit))
        best = max(best, float(gd.max()))

    refined = _refine(m, [s[2] for s in shards if s[2] is not None])
    violations += int(refined > limit)
    return FalsificationReport(n_samples, feasible, best, refined, optimum, violations)


def _refine(m: _Model, starts) -> float:
    """Coordinate descent in b from each start: lower each b_i to the
    largest active lower bound, which can only raise the density."""
    best = -math.inf
    for b in starts:
        b = np.array(b, dtype=float)
        for _ in range(50):
            before = b.copy()
            for k in range(len(b)):
                low = m.caps[k]
                for (p, q), t in zip(m.pairs, m.taus):
                    if p == k:
                        low = max(low, t - b[q])
                    elif q == k:
                        low = max(low, t - b[p])
                b[k] = low
            if np.allclose(b, before, atol=1e-15):
                break
        if m.feasible(b, tol=1e-12)[0]:
            best = max(best, float(m.density(b)[0]))
    return best


def optimize(simplex, n_samples: int = 10000, seed: int = 0, jobs: int = 1,
             falsification: bool = True, cusps=None,
             volume: str | float | None = None,
             catalog: Catalog | None = None) -> PackingResult:
    """Densest packing among the anchored configurations.

    Ties are broken toward the lowest anchor index; all maximizers are kept
    in ``maximizers``.  With ``falsification`` the result also carries the
    sampler report and the best polyhedron vertex.
    """
    simplex = get_simplex(simplex, catalog)
    configs = enumerate_configurations(simplex, cusps)
    results = [evaluate(c, volume) for c in configs]
    top = max(r.density for r in results)
    maxi = tuple(r for r in results if r.density >= top - 1e-12 * top)
    best = min(maxi, key=lambda r: r.configuration.anchor)
    report, vertex_best = None, None
    if falsification:
        vol = best.volume
        vertex_best = polyhedron_vertices(simplex, cusps, vol)[0][0]
        report = falsify(simplex, top, n_samples, seed, jobs, cusps, vol)
    return PackingResult(best.configuration, best.piece_volumes, best.ratios,
                         best.density, best.volume, maxi, report, vertex_best)


# -- full verification ------------------------------------------------------

@dataclass(frozen=True)
class VerificationRow:
    key: str
    witt: str
    commensurability_class: str
    n_ideal: int
    density: float
    paper_density: float
    residual: float
    status: str
    result: PackingResult = field(repr=False)
    listed_density: float | None = None
    note: str = ""

    @property
    def ratios(self):
        return self.result.ratios


def _row(simplex: CoxeterSimplex, tolerance: float, samples: int, seed: int,
         falsification: bool) -> VerificationRow:
    res = optimize(simplex, samples, seed, falsification=falsification)
    ref = simplex.reference.density
    residual = abs(res.density - ref)
    status, listed, note = ("OK" if residual <= tolerance else "MISMATCH"), None, ""
    if status == "MISMATCH" and simplex.listed_ideal is not None \
            and tuple(simplex.listed_ideal) != simplex.ideal_vertices:
        # the reference value uses horoballs at the listed cusps only
        sub = optimize(simplex, samples, seed, falsification=False,
                       cusps=simplex.listed_ideal)
        listed = sub.density
        if abs(listed - ref) <= tolerance:
            status = "FLAGGED"
            note = (f"all {simplex.n_ideal} cusps give {res.density:.9g}; "
                    f"cusps {list(simplex.listed_ideal)} alone give {listed:.9g}")
    if falsification and res.falsification is not None and not res.falsification.ok:
        status, note = "MISMATCH", "interior sample beats the boundary optimum"
    return VerificationRow(simplex.key, simplex.witt, simplex.commensurability_class,
                           simplex.n_ideal, res.density, ref, residual, status,
                           res, listed, note)


def verify_all(catalog: Catalog | None = None, tolerance: float = 1e-6,
               samples: int = 10000, seed: int = 0, jobs: int = 1,
               falsification: bool = True) -> list:
    """One verification row per catalog entry, in catalog order."""
    cat = catalog or load_catalog()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(lambda s: _row(s, tolerance, samples, seed,
                                              falsification), cat))
    return [_row(s, tolerance, samples, seed, falsification) for s in cat]
