"""Special functions, closed-form simplex volumes and a quadrature volume oracle.

Conventions
-----------
``lobachevsky`` is the classical Lobachevsky function

    Lambda(theta) = -int_0^theta log|2 sin t| dt = 1/2 * sum_n sin(2 n theta) / n^2,

odd and pi-periodic, with ``Lambda(pi/3) = 0.33831386880321795...`` and
``Lambda(pi/4) = G/2``.

The quadrature oracle works in the upper half-space model.  One ideal vertex
is sent to infinity, so the simplex becomes the region above a hemisphere over
a Euclidean triangle ``T``; its volume is ``int_T dz / (2 h(z)^2)`` where ``h``
is the hemisphere height.  A polar reduction about the hemisphere centre turns
this into one-dimensional integrals along the edges of ``T`` that
``scipy.integrate.quad`` evaluates to near machine precision.  Nothing in the
oracle uses the Lobachevsky function.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DegenerateTriangle, NonConvergence, UnknownDecomposition
from .lorentz import (Kind, Point, _vec, classify, lorentz_inner,
                      project_onto_plane, rotation_to_axis)

# -- Lobachevsky function ---------------------------------------------------

_N_CLAUSEN = 40
# |B_2n| / (2n (2n+1)!) written through zeta to avoid huge factorials
_CLAUSEN_COEFFS = np.array([
    2.0 * special.zeta(2 * n) / ((2.0 * math.pi) ** (2 * n) * (2 * n) * (2 * n + 1))
    for n in range(1, _N_CLAUSEN + 1)
])


def clausen2(x: float) -> float:
    """Clausen function ``Cl_2(x) = sum sin(n x) / n^2``.

    After reduction to ``[-pi, pi]`` the expansion

        Cl_2(x) = x - x log|x| + sum_n |B_2n| x^(2n+1) / (2n (2n+1)!)

    converges geometrically with ratio at most 1/4; summation stops once a
    rigorous bound on the remaining tail drops below 1e-17.
    """
    x = math.remainder(float(x), 2.0 * math.pi)
    if x == 0.0:
        return 0.0
    ax = abs(x)
    r = (ax / (2.0 * math.pi)) ** 2
    total = ax - ax * math.log(ax)
    p = ax
    for n, c in enumerate(_CLAUSEN_COEFFS, start=1):
        p *= ax * ax
        term = c * p
        total += term
        # zeta(2n) decreases, so later terms shrink at least by the factor r
        if term * r / (1.0 - r) < 1e-17:
            break
    return math.copysign(total, x)


def lobachevsky(theta: float) -> float:
    """Lobachevsky function ``Lambda(theta) = Cl_2(2 theta) / 2``."""
    return 0.5 * clausen2(2.0 * float(theta))


def lobachevsky_integral(theta: float) -> float:
    """``-int_0^theta log|2 sin t| dt`` by adaptive quadrature (slow reference).

    On ``[0, pi]`` the logarithmic end singularities are split off in closed
    form so that ``quad`` only sees the smooth factor
    ``log(sin t / (t (pi - t)))``; other arguments are reduced by periodicity
    and oddness.
    """
    theta = math.remainder(float(theta), math.pi)
    if theta < 0:
        return -lobachevsky_integral(-theta)
    if theta == 0.0:
        return 0.0

    def _xlogx(x):
        return x * math.log(x) if x > 0 else 0.0

    def smooth(t):
        if t == 0.0:
            return -math.log(math.pi)
        return math.log(math.sin(t) / (t * (math.pi - t)))

    rest, _ = integrate.quad(smooth, 0.0, theta, epsabs=1e-14, epsrel=1e-13,
                             limit=200)
    p = math.pi
    log_t = _xlogx(theta) - theta
    log_pi_minus_t = -_xlogx(p - theta) + (p - theta) + _xlogx(p) - p
    return -(theta * math.log(2.0) + log_t + rest + log_pi_minus_t)


# -- Catalan's constant -----------------------------------------------------

def _catalan_ramanujan() -> float:
    # G = pi/8 log(2 + sqrt 3) + 3/8 sum 1 / ((2n+1)^2 C(2n, n))
    s = 0.0
    for n in range(60):
        term = 1.0 / ((2 * n + 1) ** 2 * math.comb(2 * n, n))
        s += term
        if term < 1e-18:
            break
    return math.pi / 8.0 * math.log(2.0 + math.sqrt(3.0)) + 3.0 / 8.0 * s


def _catalan_cohen(n: int = 30) -> float:
    # alternating-series acceleration for sum (-1)^k / (2k+1)^2
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b, c, s = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        s += c / (2 * k + 1) ** 2
        b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1))
    return s / d


def catalan(method: str = "ramanujan") -> float:
    """Catalan's constant ``G = sum (-1)^n / (2n+1)^2``.

    ``method="ramanujan"`` uses the binomial series with ratio 1/4;
    ``method="cohen"`` accelerates the defining alternating series.
    """
    if method == "ramanujan":
        return _catalan_ramanujan()
    if method == "cohen":
        return _catalan_cohen()
    raise ValueError(f"unknown method {method!r}")


# -- closed forms -----------------------------------------------------------

class VolumeKind(enum.Enum):
    LOBACHEVSKY = "lobachevsky"
    CATALAN = "catalan"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class VolumeExpression:
    """Volume as ``coefficient * Lambda(angle * pi)``, ``coefficient * G`` or a
    bare numeric value."""

    kind: VolumeKind
    coefficient: Fraction = Fraction(1)
    angle: Fraction | None = None
    value: float | None = None
    printed_value: float | None = None

    def __post_init__(self):
        kind = VolumeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        if kind is VolumeKind.LOBACHEVSKY:
            if self.angle is None:
                raise ValueError("Lobachevsky multiple needs an angle")
            a = Fraction(self.angle)
            if not 0 < a < 1:
                raise ValueError("angle must lie in (0, pi)")
            object.__setattr__(self, "angle", a)
        if kind is VolumeKind.NUMERIC and self.value is None:
            raise ValueError("numeric volume needs a value")
        if self.evaluate() <= 0:
            raise ValueError("volume must be positive")

    def evaluate(self) -> float:
        if self.kind is VolumeKind.LOBACHEVSKY:
            return float(self.coefficient) * lobachevsky(float(self.angle) * math.pi)
        if self.kind is VolumeKind.CATALAN:
            return float(self.coefficient) * catalan()
        return float(self.value)

    @property
    def is_exact(self) -> bool:
        return self.kind is not VolumeKind.NUMERIC

    def __str__(self):
        if self.kind is VolumeKind.LOBACHEVSKY:
            return f"{self.coefficient}*L({self.angle}pi)"
        if self.kind is VolumeKind.CATALAN:
            return f"{self.coefficient}*G"
        return f"{self.value}"


def closed_form_volume(expr) -> float:
    """Numeric value of a volume expression (or of an object carrying one)."""
    if not isinstance(expr, VolumeExpression):
        expr = expr.volume
    return expr.evaluate()


# -- Gram matrix to simplex -------------------------------------------------

def simplex_from_gram(gram) -> tuple[list[Point], list[np.ndarray]]:
    """Vertices and face forms of the simplex with the given Gram matrix.

    The Gram matrix ``G`` of unit face normals factors as ``U J U^T``; the rows
    of ``U`` are the face forms and the columns of ``U^-1`` the vertices, so
    face ``i`` is opposite vertex ``i`` and every ``u_i . A_i > 0``.
    """
    g = np.asarray(getattr(gram, "entries", gram), dtype=float)
    w, q = np.linalg.eigh(g)
    neg = np.flatnonzero(w < 0)
    if len(neg) != 1 or np.any(np.abs(w) < 1e-14):
        raise ValueError("Gram matrix must have signature (3, 1)")
    order = [neg[0]] + [i for i in range(4) if i != neg[0]]
    u = q[:, order] * np.sqrt(np.abs(w[order]))
    a = np.linalg.inv(u)
    if np.sum(a[0]) < 0:
        u, a = -u, -a
    verts = []
    for i in range(4):
        col = a[:, i]
        if col[0] <= 0:
            raise ValueError("Gram matrix does not describe a hyperbolic simplex")
        verts.append(Point(col / col[0]))
    return verts, [u[i].copy() for i in range(4)]


# -- quadrature oracle ------------------------------------------------------

@dataclass(frozen=True)
class QuadratureResult:
    volume: float
    anchor: int
    cusp_volume: float
    body_volume: float
    error: float
    truncation_s: float = field(default=float("nan"))


def _half_space(x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Boundary coordinate z and ideal flag of a point, infinity at (1,0,0,1)."""
    x = x if x[0] > 0 else -x
    q = lorentz_inner(x, x)
    ideal = classify(x) is Kind.IDEAL
    if not ideal:
        x = x / math.sqrt(-q)
    d = x[0] - x[3]
    if d <= 0:
        raise ValueError("point coincides with the anchor")
    return np.array([x[1] / d, x[2] / d]), ideal


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def cusp_column_volume(triangle: Sequence, ideal: Sequence[bool], center,
                       radius: float, epsabs: float = 1e-13) -> tuple[float, float]:
    """Hyperbolic volume above a hemisphere over a triangle in the half-space.

    ``int_T dz / (2 (R^2 - |z - c|^2))`` by the polar reduction around ``c``:
    each oriented edge ``P -> Q`` contributes
    ``int_0^1 -1/4 log(D(u) / R^2) * cross(Y - c, Q - P) / |Y - c|^2 du`` with
    ``Y = P + u (Q - P)`` and ``D = R^2 - |Y - c|^2``.  Vertices flagged ideal
    lie on the boundary circle and their ``D`` is taken to vanish exactly.
    Returns ``(value, error estimate)``.
    """
    pts = [np.asarray(p, dtype=float) for p in triangle]
    c = np.asarray(center, dtype=float)
    r2 = radius * radius
    area2 = _cross(pts[1] - pts[0], pts[2] - pts[0])
    if abs(area2) < 1e-14:
        raise DegenerateTriangle("projected triangle is degenerate")
    orient = 1.0 if area2 > 0 else -1.0
    total, err = 0.0, 0.0
    for k in range(3):
        p, q = pts[k], pts[(k + 1) % 3]
        ideal_p, ideal_q = ideal[k], ideal[(k + 1) % 3]
        d = q - p
        pc = p - c
        sweep = _cross(pc, d)
        if abs(sweep) < 1e-15 * (1.0 + float(d @ d)):
            continue
        d0 = 0.0 if ideal_p else r2 - float(pc @ pc)
        d1 = -2.0 * float(pc @ d)
        d2 = -float(d @ d)
        if ideal_q:
            # make D(1) vanish exactly: d0 + d1 + d2 = 0
            d1 = -d0 - d2

        def f(u, d0=d0, d1=d1, d2=d2, pc=pc, d=d, sweep=sweep):
            y = pc + u * d
            dd = d0 + u * (d1 + u * d2)
            if dd <= 0.0:
                return 0.0
            return -0.25 * math.log(dd / r2) * sweep / float(y @ y)

        val, e = integrate.quad(f, 0.0, 1.0, epsabs=epsabs, epsrel=1e-13,
                                limit=200)
        total += val
        err += e
    return orient * total, err


def _opposite_form(pts: Sequence[np.ndarray]) -> np.ndarray:
    _, _, vt = np.linalg.svd(np.array(pts))
    u = vt[-1]
    n = lorentz_inner(u, u)
    if n <= 0:
        raise ValueError("opposite face is not a hyperbolic plane")
    return u / math.sqrt(n)


def _default_truncation(anchor, vertices, anchor_index) -> float:
    others = [v for i, v in enumerate(vertices) if i != anchor_index]
    u = _opposite_form(others)
    foot = project_onto_plane(anchor, u)
    from .horoball import s_from_tangency
    s_max = s_from_tangency(anchor, foot)
    # shrink the maximal cusp by log 2 in the Busemann parameter
    return math.tanh(math.atanh(s_max) + math.log(2.0))


def quadrature_volume(simplex, cusps: Mapping[int, float] | None = None,
                      anchor: int | None = None,
                      tolerance: float = 1e-10) -> QuadratureResult:
    """Volume of a simplex with at least one ideal vertex, by quadrature.

    ``simplex`` is a sequence of four vertices or any object with a
    ``vertices`` attribute.  ``anchor`` picks the ideal vertex sent to
    infinity (default: the first ideal vertex).  ``cusps`` maps ideal vertex
    indices to truncation s-parameters; the anchor's truncation splits the
    result into the Bolyai cusp volume and the remaining body, whose sum does
    not depend on it.
    """
    verts = [_vec(v) for v in getattr(simplex, "vertices", simplex)]
    if len(verts) != 4:
        raise ValueError("a simplex has four vertices")
    ideal = [classify(v) is Kind.IDEAL for v in verts]
    if anchor is None:
        if not any(ideal):
            raise ValueError("quadrature oracle needs an ideal vertex")
        anchor = ideal.index(True)
    elif not ideal[anchor]:
        raise ValueError(f"vertex {anchor} is not ideal")

    frame = rotation_to_axis(verts[anchor])
    moved = [frame.matrix @ v for v in verts]
    others = [i for i in range(4) if i != anchor]
    tri, flags = [], []
    for i in others:
        z, fl = _half_space(moved[i])
        tri.append(z)
        flags.append(fl)
    u = _opposite_form([moved[i] for i in others])
    k = u[0] + u[3]
    if abs(k) < 1e-14:
        raise ValueError("opposite face passes through the anchor")
    center = -np.array([u[1], u[2]]) / k
    radius = 1.0 / abs(k)

    total, err = cusp_column_volume(tri, flags, center, radius,
                                    epsabs=tolerance * 1e-3)
    if not err < tolerance:
        raise NonConvergence(f"quadrature error estimate {err:.3g} above {tolerance:.3g}")

    s = None if cusps is None else cusps.get(anchor)
    if s is None:
        s = _default_truncation(verts[anchor], verts, anchor)
    t0sq = (1.0 + s) / (1.0 - s)
    area = 0.5 * abs(_cross(tri[1] - tri[0], tri[2] - tri[0]))
    cusp = area / (2.0 * t0sq)
    return QuadratureResult(total, anchor, cusp, total - cusp, err, s)


# -- decompositions ---------------------------------------------------------

_PHI = (1.0 + math.sqrt(5.0)) / 2.0

# dihedral-angle brackets of orthoschemes; integers k stand for pi/k
DECOMPOSITIONS = {
    "AV3": ((3, 3, 6), (3, 4, 4), (4, 4, 3), (3, 6, 3)),
    "BV3h": ((4, 3, 6),
             (math.pi / 4, math.atan(math.sqrt(2)), math.atan(1 / math.sqrt(2))),
             (math.atan(math.sqrt(2)), math.pi / 2 - math.atan(math.sqrt(2)), math.pi / 3),
             (3, 6, 3)),
    "HV3h": ((5, 3, 6),
             (math.pi / 5, math.atan(_PHI), math.atan(1 / _PHI)),
             (math.atan(_PHI), math.pi / 2 - math.atan(_PHI), math.pi / 3),
             (3, 6, 3)),
    "CR3": ((3, 4, 4), (4, 4, 4),
            (math.pi / 3, math.atan(1 / math.sqrt(2)), math.atan(math.sqrt(2))),
            (math.atan(1 / math.sqrt(2)), math.pi / 2 - math.atan(1 / math.sqrt(2)),
             math.pi / 4)),
}

# integer brackets that are themselves catalog cells
_BRACKET_CELLS = {(3, 3, 6): "V3", (6, 3, 3): "V3", (3, 4, 4): "R3",
                  (4, 4, 3): "R3", (3, 6, 3): "Y3", (4, 3, 6): "BV3",
                  (6, 3, 4): "BV3", (5, 3, 6): "HV3", (6, 3, 5): "HV3",
                  (4, 4, 4): "N3"}


def orthoscheme_gram(angles: Sequence) -> np.ndarray:
    """Gram matrix of the orthoscheme with dihedral angles ``angles`` along
    the path ``u0 - u1 - u2 - u3`` (integers k mean pi/k)."""
    rad = [math.pi / a if isinstance(a, int) else float(a) for a in angles]
    g = np.eye(4)
    for i, a in enumerate(rad):
        g[i, i + 1] = g[i + 1, i] = -math.cos(a)
    return g


def orthoscheme_volume(angles: Sequence) -> float:
    """Quadrature volume of an orthoscheme given by its dihedral angles."""
    verts, _ = simplex_from_gram(orthoscheme_gram(angles))
    return quadrature_volume(verts).volume


@dataclass(frozen=True)
class DecompositionReport:
    key: str
    terms: tuple
    total: float
    target: float
    residual: float

    @property
    def ok(self) -> bool:
        return self.residual < 1e-5


def decomposition_check(key: str, catalog=None) -> DecompositionReport:
    """Sum the orthoscheme decomposition of a cyclic-diagram simplex.

    Terms that are catalog cells with a closed-form volume use it; all other
    terms are built from their Gram matrix and integrated.  The sum is
    compared with the catalog's printed volume.
    """
    from .catalog import get_simplex
    try:
        brackets = DECOMPOSITIONS[key]
    except KeyError:
        target = get_simplex(key, catalog).key if catalog is not None else key
        brackets = DECOMPOSITIONS.get(target)
        if brackets is None:
            raise UnknownDecomposition(f"no orthoscheme decomposition for {key!r}")
        key = target
    terms = []
    for br in brackets:
        label = "[" + ",".join(str(a) if isinstance(a, int) else f"{a:.6f}"
                               for a in br) + "]"
        cell = _BRACKET_CELLS.get(br) if all(isinstance(a, int) for a in br) else None
        if cell is not None:
            expr = get_simplex(cell, catalog).volume
            if expr.is_exact:
                terms.append((label, expr.evaluate(), f"closed form ({cell})"))
                continue
        terms.append((label, orthoscheme_volume(br), "quadrature"))
    total = sum(t[1] for t in terms)
    target = get_simplex(key, catalog).volume.evaluate()
    return DecompositionReport(key, tuple(terms), total, target, abs(total - target))
