"""Complex projective plane with the complexified Euclidean form.

Points and lines are homogeneous triples. The affine chart is
``z1 = h1/h0, z2 = h2/h0`` so the infinity line is ``(1, 0, 0)`` and the
isotropic points at infinity are ``I1 = (0:1:i)`` and ``I2 = (0:1:-i)``.

Directions are encoded by the chart ``z = (v2 - i v1) / (v2 + i v1)`` which
sends ``I1`` to 0 and ``I2`` to infinity. A direction coordinate is kept as a
homogeneous pair ``(num, den)`` so that infinity needs no special casing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

REL_TOL = 1e-10
COINCIDENCE_TOL = 1e-12


class DegenerateMirrorError(ValueError):
    """Raised when an isotropic (or infinite) line is used as a mirror."""


def _normalize(a: complex, b: complex, c: complex) -> tuple[complex, complex, complex]:
    vals = (complex(a), complex(b), complex(c))
    k = max(range(3), key=lambda i: abs(vals[i]))
    m = vals[k]
    if m == 0:
        raise ValueError("homogeneous triple is zero")
    return (vals[0] / m, vals[1] / m, vals[2] / m)


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _norm3(u) -> float:
    return math.sqrt(abs(u[0]) ** 2 + abs(u[1]) ** 2 + abs(u[2]) ** 2)


@dataclass(frozen=True)
class ProjPoint:
    h0: complex
    h1: complex
    h2: complex

    def __post_init__(self):
        n = _normalize(self.h0, self.h1, self.h2)
        object.__setattr__(self, "h0", n[0])
        object.__setattr__(self, "h1", n[1])
        object.__setattr__(self, "h2", n[2])

    @classmethod
    def affine(cls, x: complex, y: complex) -> "ProjPoint":
        return cls(1.0, x, y)

    @property
    def coords(self) -> tuple[complex, complex, complex]:
        return (self.h0, self.h1, self.h2)

    def is_finite(self, tol: float = REL_TOL) -> bool:
        return abs(self.h0) > tol

    def xy(self) -> tuple[complex, complex]:
        if abs(self.h0) == 0:
            raise ValueError("point at infinity has no affine coordinates")
        return (self.h1 / self.h0, self.h2 / self.h0)

    def coincides(self, other: "ProjPoint", tol: float = REL_TOL) -> bool:
        return point_distance(self, other) < tol


@dataclass(frozen=True)
class ProjLine:
    c0: complex
    c1: complex
    c2: complex

    def __post_init__(self):
        n = _normalize(self.c0, self.c1, self.c2)
        object.__setattr__(self, "c0", n[0])
        object.__setattr__(self, "c1", n[1])
        object.__setattr__(self, "c2", n[2])

    @property
    def coords(self) -> tuple[complex, complex, complex]:
        return (self.c0, self.c1, self.c2)

    @classmethod
    def through(cls, p: ProjPoint, q: ProjPoint) -> "ProjLine":
        c = _cross(p.coords, q.coords)
        if _norm3(c) < COINCIDENCE_TOL:
            raise ValueError("points coincide; line undefined")
        return cls(*c)

    @classmethod
    def from_point_direction(cls, p: ProjPoint, v: tuple[complex, complex]) -> "ProjLine":
        x, y = p.xy()
        return cls.through(ProjPoint.affine(x, y), ProjPoint(0.0, v[0], v[1]))

    def incidence(self, p: ProjPoint) -> complex:
        return self.c0 * p.h0 + self.c1 * p.h1 + self.c2 * p.h2

    def contains(self, p: ProjPoint, tol: float = REL_TOL) -> bool:
        return abs(self.incidence(p)) < tol * _norm3(p.coords) * _norm3(self.coords)

    def is_infinity(self, tol: float = REL_TOL) -> bool:
        return abs(self.c1) < tol and abs(self.c2) < tol

    def direction(self) -> tuple[complex, complex]:
        """Direction vector of a finite line, ``(c2, -c1)``."""
        if self.is_infinity():
            raise DegenerateMirrorError("the infinity line has no direction")
        return (self.c2, -self.c1)

    def intersect(self, other: "ProjLine") -> ProjPoint:
        c = _cross(self.coords, other.coords)
        if _norm3(c) < COINCIDENCE_TOL:
            raise ValueError("lines coincide")
        return ProjPoint(*c)

    def coincides(self, other: "ProjLine", tol: float = REL_TOL) -> bool:
        c = _cross(self.coords, other.coords)
        return _norm3(c) < tol * _norm3(self.coords) * _norm3(other.coords)


INFINITY_LINE = ProjLine(1.0, 0.0, 0.0)
I1 = ProjPoint(0.0, 1.0, 1j)
I2 = ProjPoint(0.0, 1.0, -1j)


def point_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Chordal (Fubini-Study sine) distance between projective points."""
    return _norm3(_cross(p.coords, q.coords)) / (_norm3(p.coords) * _norm3(q.coords))


def bilinear_form(v, w) -> complex:
    return v[0] * w[0] + v[1] * w[1]


def is_isotropic(l: ProjLine, tol: float = REL_TOL) -> bool:
    if l.is_infinity(tol):
        return True
    return l.contains(I1, tol) or l.contains(I2, tol)


@dataclass(frozen=True)
class DirectionCoord:
    """Point ``num/den`` of the extended complex line of directions."""

    num: complex
    den: complex

    def __post_init__(self):
        s = math.hypot(abs(self.num), abs(self.den))
        if s == 0:
            raise ValueError("zero direction pair")
        object.__setattr__(self, "num", complex(self.num) / s)
        object.__setattr__(self, "den", complex(self.den) / s)

    @classmethod
    def from_vector(cls, v) -> "DirectionCoord":
        return cls(v[1] - 1j * v[0], v[1] + 1j * v[0])

    @classmethod
    def from_line(cls, l: ProjLine) -> "DirectionCoord":
        return cls.from_vector(l.direction())

    @classmethod
    def from_angle(cls, theta: complex) -> "DirectionCoord":
        return cls(-cmath.exp(2j * theta), 1.0)

    @classmethod
    def from_z(cls, z: complex) -> "DirectionCoord":
        if cmath.isinf(z):
            return cls(1.0, 0.0)
        return cls(z, 1.0)

    @property
    def z(self) -> complex:
        if self.den == 0:
            return complex(math.inf, 0.0)
        return self.num / self.den

    def is_isotropic(self, tol: float = REL_TOL) -> bool:
        return abs(self.num) < tol or abs(self.den) < tol

    def vector(self) -> tuple[complex, complex]:
        """A direction vector ``(v1, v2)`` with this coordinate."""
        a, b = self.num, self.den
        return (0.5j * (a - b), 0.5 * (a + b))


def chordal(z: DirectionCoord, w: DirectionCoord) -> float:
    return abs(z.num * w.den - z.den * w.num)


def reflect_direction(incident: DirectionCoord, mirror: DirectionCoord) -> DirectionCoord:
    """Reflect direction ``z`` in a mirror of direction ``zeta``: ``zeta**2 / z``."""
    if mirror.is_isotropic():
        raise DegenerateMirrorError("isotropic mirror direction")
    p, q = mirror.num, mirror.den
    return DirectionCoord(p * p * incident.den, q * q * incident.num)


def reflection_matrix(v) -> list[list[complex]]:
    """Linear part ``2 v v^T/(v.v) - Id`` of the symmetry about direction ``v``."""
    vv = bilinear_form(v, v)
    if abs(vv) < REL_TOL * (abs(v[0]) ** 2 + abs(v[1]) ** 2):
        raise DegenerateMirrorError("isotropic direction")
    return [
        [2 * v[0] * v[0] / vv - 1, 2 * v[0] * v[1] / vv],
        [2 * v[1] * v[0] / vv, 2 * v[1] * v[1] / vv - 1],
    ]


def _line_anchor(l: ProjLine) -> tuple[complex, complex]:
    # foot of the line closest to the origin in the bilinear sense
    c0, c1, c2 = l.coords
    nn = c1 * c1 + c2 * c2
    return (-c0 * c1 / nn, -c0 * c2 / nn)


def symmetry_matrix(l: ProjLine) -> list[list[complex]]:
    """3x3 homogeneous matrix of the complex symmetry about ``l``."""
    if is_isotropic(l):
        raise DegenerateMirrorError("isotropic axis")
    S = reflection_matrix(l.direction())
    q = _line_anchor(l)
    t = (q[0] - S[0][0] * q[0] - S[0][1] * q[1], q[1] - S[1][0] * q[0] - S[1][1] * q[1])
    return [[1.0, 0.0, 0.0], [t[0], S[0][0], S[0][1]], [t[1], S[1][0], S[1][1]]]


def apply_matrix(M, p: ProjPoint) -> ProjPoint:
    h = p.coords
    return ProjPoint(*(M[i][0] * h[0] + M[i][1] * h[1] + M[i][2] * h[2] for i in range(3)))


def symmetry_about_line(p: ProjPoint, l: ProjLine) -> ProjPoint:
    if not p.is_finite():
        raise ValueError("point at infinity")
    return apply_matrix(symmetry_matrix(l), p)


def symmetric_vector(v, l: ProjLine) -> tuple[complex, complex]:
    S = reflection_matrix(l.direction())
    return (S[0][0] * v[0] + S[0][1] * v[1], S[1][0] * v[0] + S[1][1] * v[1])


def reflect_line(l: ProjLine, axis: ProjLine) -> ProjLine:
    """Image of ``l`` under the symmetry about ``axis`` (S is an involution)."""
    S = symmetry_matrix(axis)
    c = l.coords
    return ProjLine(*(S[0][j] * c[0] + S[1][j] * c[1] + S[2][j] * c[2] for j in range(3)))


class VerdictKind(str, Enum):
    SYMMETRIC = "symmetric-nonisotropic"
    ISOTROPIC_EDGE = "isotropic-edge-on-mirror"
    VERTEX_COINCIDENCE = "vertex-coincidence"
    VIOLATED = "violated"


@dataclass(frozen=True)
class ReflectionVerdict:
    kind: VerdictKind
    residual: float

    @property
    def ok(self) -> bool:
        return self.kind is not VerdictKind.VIOLATED


def reflection_law_verdict(
    prev: ProjPoint, vertex: ProjPoint, next: ProjPoint, mirror_line: ProjLine, tol: float = 1e-9
) -> ReflectionVerdict:
    if point_distance(prev, vertex) < COINCIDENCE_TOL or point_distance(next, vertex) < COINCIDENCE_TOL:
        return ReflectionVerdict(VerdictKind.VERTEX_COINCIDENCE, 0.0)
    e_in = ProjLine.through(vertex, prev)
    e_out = ProjLine.through(vertex, next)
    if is_isotropic(mirror_line):
        # the only way to reflect off an isotropic line is to travel along it
        if mirror_line.coincides(e_in) or mirror_line.coincides(e_out):
            return ReflectionVerdict(VerdictKind.ISOTROPIC_EDGE, 0.0)
        res = 1.0
        if not mirror_line.is_infinity():
            zeta = DirectionCoord.from_line(mirror_line)
            gaps = [chordal(DirectionCoord.from_line(e), zeta) for e in (e_in, e_out) if not e.is_infinity()]
            if gaps:
                res = max(min(gaps), 1e-300)
        return ReflectionVerdict(VerdictKind.VIOLATED, res)
    if e_in.is_infinity() or e_out.is_infinity():
        return ReflectionVerdict(VerdictKind.VIOLATED, 1.0)
    zeta = DirectionCoord.from_line(mirror_line)
    res = chordal(reflect_direction(DirectionCoord.from_line(e_in), zeta), DirectionCoord.from_line(e_out))
    kind = VerdictKind.SYMMETRIC if res < tol else VerdictKind.VIOLATED
    return ReflectionVerdict(kind, res)
