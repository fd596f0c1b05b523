"""Projective Lorentzian linear algebra for the Cayley-Klein model of H^3.

Points are homogeneous column 4-vectors ``(x0, x1, x2, x3)``; hyperplanes are
covectors ``(b0, b1, b2, b3)`` acting by the plain dot product ``u . x``.  The
bilinear form is ``<x, y> = -x0*y0 + x1*y1 + x2*y2 + x3*y3`` and the same
diagonal form (its own inverse) is used on covectors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (DegeneratePlane, DomainError, NotIsometry, NotProper,
                     ZeroVector)
from .tolerances import (EPS_CLASS, EPS_DOM, EPS_GRAM, EPS_ISO, EPS_NORM,
                         EPS_ZERO)

J = np.diag([-1.0, 1.0, 1.0, 1.0])
J.setflags(write=False)

ArrayLike4 = Union["Point", "Plane", Sequence[float], np.ndarray]


class Kind(enum.Enum):
    PROPER = "proper"
    IDEAL = "ideal"
    OUTER = "outer"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(4)
    arr.setflags(write=False)
    return arr


def _vec(x) -> np.ndarray:
    if isinstance(x, Point):
        return x.coords
    if isinstance(x, Plane):
        return x.coeffs
    return np.asarray(x, dtype=float).reshape(4)


@dataclass(frozen=True, eq=False)
class Point:
    """A point of projective 3-space: proper, ideal or outer."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coords)
        if np.max(np.abs(arr)) < EPS_ZERO:
            raise ZeroVector("point has all coordinates zero")
        object.__setattr__(self, "coords", arr)

    @property
    def kind(self) -> Kind:
        return classify(self)

    @property
    def is_ideal(self) -> bool:
        return classify(self) is Kind.IDEAL

    @property
    def is_proper(self) -> bool:
        return classify(self) is Kind.PROPER

    def affine(self) -> "Point":
        """Representative with ``x0 = 1`` (returned unchanged if ``x0 = 0``)."""
        x0 = self.coords[0]
        if abs(x0) < EPS_ZERO * np.max(np.abs(self.coords)):
            return self
        return Point(self.coords / x0)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return "Point(" + ", ".join(f"{c:.12g}" for c in self.coords) + ")"


@dataclass(frozen=True, eq=False)
class Plane:
    """A hyperplane given by a covector ``u`` with ``u . x = 0``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        if np.max(np.abs(arr)) < EPS_ZERO:
            raise ZeroVector("hyperplane form has all coefficients zero")
        object.__setattr__(self, "coeffs", arr)

    def normalized(self) -> "Plane":
        """Rescale to unit Lorentz norm, keeping the orientation."""
        n = lorentz_inner(self, self)
        if n <= EPS_NORM * float(self.coeffs @ self.coeffs):
            raise DegeneratePlane("form does not define a hyperbolic plane")
        return Plane(self.coeffs / math.sqrt(n))

    def __call__(self, x) -> float:
        return float(self.coeffs @ _vec(x))

    def __neg__(self):
        return Plane(-self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return "Plane(" + ", ".join(f"{c:.12g}" for c in self.coeffs) + ")"


@dataclass(frozen=True, eq=False)
class Isometry:
    """A matrix in O(1,3) acting on column coordinate vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(4, 4)
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        if np.max(np.abs(m.T @ J @ m - J)) > EPS_ISO * scale:
            raise NotIsometry("matrix does not preserve the Lorentz form")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, x):
        if isinstance(x, Plane):
            # covectors pull back: (u M^-1) . (M x) = u . x
            return Plane(x.coeffs @ self.inverse().matrix)
        return Point(self.matrix @ _vec(x))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        return Isometry(J @ self.matrix.T @ J)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(4))


def lorentz_inner(x, y) -> float:
    """``-x0*y0 + x1*y1 + x2*y2 + x3*y3``."""
    a, b = _vec(x), _vec(y)
    return float(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])


def classify(x) -> Kind:
    v = _vec(x)
    scale = float(np.linalg.norm(v))
    if scale < EPS_ZERO:
        raise ZeroVector("cannot classify the zero vector")
    q = lorentz_inner(v, v) / scale**2
    if abs(q) <= EPS_CLASS:
        return Kind.IDEAL
    return Kind.PROPER if q < 0 else Kind.OUTER


def projectively_equal(x, y, tol: float = 1e-9) -> bool:
    """Compare after scaling to unit Euclidean norm with a canonical sign."""
    return bool(np.allclose(_canonical(_vec(x)), _canonical(_vec(y)),
                            atol=tol, rtol=0.0))


def _canonical(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    return v if lead > 0 else -v


def distance(x, y) -> float:
    """Hyperbolic distance between two proper points."""
    a, b = _vec(x), _vec(y)
    qa, qb = lorentz_inner(a, a), lorentz_inner(b, b)
    if classify(a) is not Kind.PROPER or classify(b) is not Kind.PROPER:
        raise NotProper("distance is defined for proper points only")
    # |<a,b>| so that both sign representatives give the same point
    c = abs(lorentz_inner(a, b)) / math.sqrt(qa * qb)
    if c < 1.0 - EPS_DOM:
        raise DomainError(f"arccosh argument {c!r} below 1")
    return math.acosh(max(c, 1.0))


def pole(u) -> Point:
    """Point polar to the hyperplane ``u`` (index raised with J)."""
    return Point(J @ _vec(u))


def project_onto_plane(x, u) -> Point:
    """Foot of the perpendicular from ``x`` to the hyperplane ``u``."""
    xv, uv = _vec(x), _vec(u)
    uu = lorentz_inner(uv, uv)
    if uu < EPS_NORM * float(uv @ uv):
        raise DegeneratePlane("projection needs a form with <u,u> > 0")
    return Point(xv - (float(uv @ xv) / uu) * (J @ uv))


def apply_isometry(m: Isometry, x):
    if not isinstance(m, Isometry):
        m = Isometry(m)
    return m(x)


# -- isometry builders ------------------------------------------------------

def spatial_rotation(axis: Sequence[float], angle: float) -> Isometry:
    """Rotation about the model centre by ``angle`` around ``axis``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    r = np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * kx @ kx
    m = np.eye(4)
    m[1:, 1:] = r
    return Isometry(m)


def boost(direction: Sequence[float], rapidity: float) -> Isometry:
    """Hyperbolic translation by ``rapidity`` along a unit spatial direction."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    m = np.eye(4)
    m[0, 0] = ch
    m[0, 1:] = sh * n
    m[1:, 0] = sh * n
    m[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return Isometry(m)


def rotation_to_axis(point) -> Isometry:
    """Rotation fixing the model centre that sends ``point`` onto the +x3 axis.

    Used to put an ideal point at the canonical position (1, 0, 0, 1).
    """
    v = _vec(point)
    if v[0] < 0:
        v = -v
    d = v[1:] / np.linalg.norm(v[1:])
    e3 = np.array([0.0, 0.0, 1.0])
    c = float(d @ e3)
    if c > 1.0 - 1e-15:
        return Isometry.identity()
    if c < -1.0 + 1e-15:
        return spatial_rotation((1.0, 0.0, 0.0), math.pi)
    axis = np.cross(d, e3)
    return spatial_rotation(axis, math.atan2(np.linalg.norm(axis), c))


# -- Gram matrices ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray

    def __post_init__(self):
        g = np.array(self.entries, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)

    def dihedral_angles(self) -> dict:
        """Map ``(i, j)`` to the dihedral angle, or None for ultraparallel faces."""
        g = self.entries
        out = {}
        n = len(g)
        for i in range(n):
            for j in range(i + 1, n):
                c = -g[i, j]
                if c > 1.0 + EPS_GRAM:
                    out[(i, j)] = None
                else:
                    out[(i, j)] = math.acos(min(1.0, max(-1.0, c)))
        return out

    def signature(self, eps: float = 1e-9) -> tuple:
        """(positive, negative) eigenvalue counts."""
        w = np.linalg.eigvalsh(self.entries)
        return int(np.sum(w > eps)), int(np.sum(w < -eps))


def gram_of_simplex(faces: Iterable) -> GramMatrix:
    """Matrix of Lorentz products of the (normalized) face forms."""
    u = np.array([_vec(f) for f in faces])
    return GramMatrix(u @ J @ u.T)
