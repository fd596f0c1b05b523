"""Horospheres and horoballs in the projective model.

A horoball is stored as its ideal centre together with the s-parameter: after
the rotation about the model centre that takes the centre to (1, 0, 0, 1), the
horosphere crosses the x3 axis at (1, 0, 0, s).  Smaller s means a larger ball.
The Busemann offset ``artanh(s)`` turns the s-parameter into a signed distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DegenerateTriangle, FootAtInfinity, NoIntersection,
                     NotIdeal, NotProper)
from .lorentz import (Isometry, Kind, Point, _vec, classify, distance,
                      lorentz_inner, rotation_to_axis)
from .tolerances import EPS_TRI

AXIS_IDEAL = np.array([1.0, 0.0, 0.0, 1.0])


def horosphere_eval(s: float, x) -> float:
    """Left-hand side of the horosphere equation in canonical position.

    Zero on the horosphere centred at (1, 0, 0, 1) through (1, 0, 0, s);
    positive inside the ball, negative outside.
    """
    v = _vec(x)
    q = -v[0] ** 2 + v[1] ** 2 + v[2] ** 2 + v[3] ** 2
    return float((s - 1.0) * q - (1.0 + s) * (v[0] - v[3]) ** 2)


@dataclass(frozen=True, eq=False)
class Horoball:
    center: Point
    s: float
    frame: Isometry = field(init=False, repr=False)

    def __post_init__(self):
        c = self.center if isinstance(self.center, Point) else Point(self.center)
        if classify(c) is not Kind.IDEAL:
            raise NotIdeal("horoball centre must be an ideal point")
        if not -1.0 < self.s < 1.0:
            raise ValueError(f"s-parameter {self.s!r} outside (-1, 1)")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "frame", rotation_to_axis(c))

    @classmethod
    def from_busemann(cls, center, offset: float) -> "Horoball":
        return cls(center, math.tanh(offset))

    @property
    def busemann_offset(self) -> float:
        """Signed distance ``beta(o, x, xi)`` of the horosphere from the centre o."""
        return math.atanh(self.s)

    def evaluate(self, x) -> float:
        return horosphere_eval(self.s, self.frame(x).coords)

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.evaluate(x) > tol


def busemann(x, y, xi) -> float:
    """``beta(x, y, xi) = lim (d(x, z) - d(y, z))`` as z runs out to ``xi``."""
    if classify(xi) is not Kind.IDEAL:
        raise NotIdeal("Busemann function needs an ideal point")
    if classify(x) is not Kind.PROPER or classify(y) is not Kind.PROPER:
        raise NotProper("Busemann function needs proper points")
    xv, yv, zv = _vec(x), _vec(y), _vec(xi)
    # ratios are invariant under rescaling each vector independently
    fx = abs(lorentz_inner(xv, zv)) / math.sqrt(-lorentz_inner(xv, xv))
    fy = abs(lorentz_inner(yv, zv)) / math.sqrt(-lorentz_inner(yv, yv))
    return math.log(fx / fy)


def s_from_tangency(center, foot, frame: Isometry | None = None) -> float:
    """s-parameter of the horoball centred at ``center`` whose horosphere passes
    through the proper point ``foot``.

    The horosphere equation is linear in s; ``frame`` must take ``center`` to
    the canonical ideal point and defaults to the standard rotation.
    """
    if classify(foot) is not Kind.PROPER:
        raise FootAtInfinity("tangency point must be a proper point")
    if frame is None:
        frame = rotation_to_axis(center)
    y = frame(foot).coords
    q = lorentz_inner(y, y)
    w = (y[0] - y[3]) ** 2
    return float((q + w) / (q - w))


def edge_intersection(ball: Horoball, ai, ray: bool = False) -> Point:
    """Point where the horosphere of ``ball`` crosses the edge from its centre
    to the vertex ``ai``.  With ``ray`` the edge is extended past ``ai`` to
    the whole geodesic ray from the centre.

    On the edge ``h(lam) = lam * a0 + ai`` the horosphere equation is linear in
    ``lam`` because ``a0`` is the (null) centre and lies on the tangent plane
    ``x0 = x3``.
    """
    a = ball.frame(ai).coords
    if a[0] < 0:
        a = -a
    a = a / a[0]
    s = ball.s
    q = -a[0] ** 2 + a[1] ** 2 + a[2] ** 2 + a[3] ** 2
    l2 = (a[0] - a[3]) ** 2
    cross = lorentz_inner(AXIS_IDEAL, a)
    if abs(cross) < 1e-14:
        raise NoIntersection("edge endpoint coincides with the horoball centre")
    lam = ((1.0 + s) * l2 - (s - 1.0) * q) / (2.0 * (s - 1.0) * cross)
    # lam = 0 is the horosphere passing through the vertex itself
    if lam < -1e-12 and not ray:
        raise NoIntersection(
            "horosphere does not meet the edge (the ball swallows the endpoint)")
    if not ray:
        lam = max(lam, 0.0)
    h = lam * AXIS_IDEAL + a
    return ball.frame.inverse()(h / h[0]).affine()


def horo_arc_length(chord: float) -> float:
    """Length on the horosphere between two of its points at distance ``chord``."""
    return 2.0 * math.sinh(chord / 2.0)


@dataclass(frozen=True)
class HorosphericalTriangle:
    L12: float
    L13: float
    L23: float

    def __post_init__(self):
        a, b, c = sorted((self.L12, self.L13, self.L23))
        if a <= 0 or a + b <= c * (1.0 + 1e-15):
            raise DegenerateTriangle(
                f"side lengths {self.L12}, {self.L13}, {self.L23} violate the "
                "triangle inequality")


def triangle_area(t: HorosphericalTriangle) -> float:
    """Euclidean area from the Cayley-Menger determinant.

    For a triangle the bordered determinant equals ``-16 A^2``.
    """
    a2, b2, c2 = t.L12 ** 2, t.L13 ** 2, t.L23 ** 2
    cm = np.array([[0.0, 1.0, 1.0, 1.0],
                   [1.0, 0.0, a2, b2],
                   [1.0, a2, 0.0, c2],
                   [1.0, b2, c2, 0.0]])
    sixteen_a2 = -np.linalg.det(cm)
    scale = max(a2, b2, c2)
    if sixteen_a2 <= (EPS_TRI * scale) ** 2:
        raise DegenerateTriangle("Cayley-Menger determinant is not positive")
    return math.sqrt(sixteen_a2 / 16.0)


@dataclass(frozen=True, eq=False)
class HoroballPiece:
    """Intersection of a horoball with the cone spanned by three edges."""

    ball: Horoball
    points: tuple
    chords: tuple
    arcs: tuple
    area: float

    @property
    def volume(self) -> float:
        return 0.5 * self.area


def horoball_piece(ball: Horoball, edges: Sequence, cone: bool = False) -> HoroballPiece:
    """Piece of ``ball`` inside the cone from its centre over three vertices.

    By default the cone is cut off at the vertices; with ``cone`` it is the
    full infinite cone spanned by the three edge rays.
    """
    if len(edges) != 3:
        raise ValueError("a simplex cusp has exactly three edges")
    pts = tuple(edge_intersection(ball, a, ray=cone) for a in edges)
    chords = (distance(pts[0], pts[1]), distance(pts[0], pts[2]),
              distance(pts[1], pts[2]))
    arcs = tuple(horo_arc_length(c) for c in chords)
    area = triangle_area(HorosphericalTriangle(*arcs))
    return HoroballPiece(ball, pts, chords, arcs, area)


def horoball_piece_volume(ball: Horoball, edges: Sequence, cone: bool = False) -> float:
    """Volume of the horoball piece: half the horospherical triangle's area."""
    return horoball_piece(ball, edges, cone).volume
