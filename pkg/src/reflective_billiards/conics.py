"""Parametrized mirrors: lines, circles, confocal conics, parabolas, mirror images.

Every mirror maps a complex parameter ``t`` to a finite point and knows its
derivative, so tangent lines come straight from the parametrization. Conic
mirrors also expose their symmetric 3x3 matrix ``Q`` (``h^T Q h = 0``), used for
line intersections and for the polar-line cross check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .projective import (
    DegenerateMirrorError,
    ProjLine,
    ProjPoint,
    _line_anchor,
    is_isotropic,
    symmetry_matrix,
)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Frame:
    """Rigid motion ``p -> R(angle) p + (ox, oy)``; complex points allowed."""

    angle: float = 0.0
    ox: float = 0.0
    oy: float = 0.0

    def apply(self, x, y):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return (c * x - s * y + self.ox, s * x + c * y + self.oy)

    def rotate(self, vx, vy):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return (c * vx - s * vy, s * vx + c * vy)

    def inverse_apply(self, x, y):
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx, dy = x - self.ox, y - self.oy
        return (c * dx + s * dy, -s * dx + c * dy)

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[1.0, 0.0, 0.0], [self.ox, c, -s], [self.oy, s, c]], dtype=complex)

    def compose(self, other: "Frame") -> "Frame":
        """``self`` after ``other``."""
        ox, oy = self.apply(other.ox, other.oy)
        return Frame(self.angle + other.angle, float(np.real(ox)), float(np.real(oy)))


IDENTITY = Frame()


def _unwrap(t: complex, near: complex | None, period: complex | None) -> complex:
    if near is None or period is None:
        return t
    k = round(((near - t) / period).real)
    return t + k * period


class Mirror:
    """Base class; subclasses implement ``point``, ``deriv`` and ``parameter_of``."""

    kind = "abstract"
    period: complex | None = None

    def point(self, t: complex) -> tuple[complex, complex]:
        raise NotImplementedError

    def deriv(self, t: complex) -> tuple[complex, complex]:
        raise NotImplementedError

    def parameter_of(self, x: complex, y: complex, near: complex | None = None) -> complex:
        raise NotImplementedError

    def conic_matrix(self) -> np.ndarray | None:
        return None

    def point_at(self, t: complex) -> ProjPoint:
        return ProjPoint.affine(*self.point(t))

    def is_line(self) -> bool:
        return False


@dataclass(frozen=True, eq=True)
class LineMirror(Mirror):
    line: ProjLine
    kind = "line"

    def __post_init__(self):
        if is_isotropic(self.line):
            raise DegenerateMirrorError("isotropic lines cannot be mirrors")

    def _data(self):
        d = self.line.direction()
        n = math.sqrt(abs(d[0]) ** 2 + abs(d[1]) ** 2)
        return _line_anchor(self.line), (d[0] / n, d[1] / n)

    def point(self, t):
        q, d = self._data()
        return (q[0] + t * d[0], q[1] + t * d[1])

    def deriv(self, t):
        return self._data()[1]

    def parameter_of(self, x, y, near=None):
        q, d = self._data()
        return (x - q[0]) * d[0].conjugate() + (y - q[1]) * d[1].conjugate()

    def is_line(self) -> bool:
        return True


@dataclass(frozen=True, eq=True)
class CircleMirror(Mirror):
    cx: complex
    cy: complex
    r2: complex
    kind = "circle"
    period = TWO_PI

    def __post_init__(self):
        if abs(self.r2) < 1e-14:
            raise ValueError("zero radius circle is a pair of isotropic lines")

    @property
    def r(self) -> complex:
        return cmath.sqrt(self.r2)

    def point(self, t):
        r = self.r
        return (self.cx + r * cmath.cos(t), self.cy + r * cmath.sin(t))

    def deriv(self, t):
        r = self.r
        return (-r * cmath.sin(t), r * cmath.cos(t))

    def parameter_of(self, x, y, near=None):
        r = self.r
        t = -1j * cmath.log((x - self.cx) / r + 1j * (y - self.cy) / r)
        return _unwrap(t, near, self.period)

    def conic_matrix(self):
        cx, cy, r2 = self.cx, self.cy, self.r2
        return np.array(
            [[cx * cx + cy * cy - r2, -cx, -cy], [-cx, 1, 0], [-cy, 0, 1]], dtype=complex
        )


def _framed(Q: np.ndarray, frame: Frame) -> np.ndarray:
    Fi = np.linalg.inv(frame.matrix())
    return Fi.T @ Q @ Fi


@dataclass(frozen=True, eq=True)
class ConfocalConic(Mirror):
    """Member ``x^2/lam + y^2/(lam - c^2) = 1`` of a confocal family."""

    c: float
    lam: complex
    frame: Frame = IDENTITY
    branch: int = 1
    kind = "confocal"

    @property
    def hyperbolic(self) -> bool:
        lam = complex(self.lam)
        return lam.imag == 0 and 0 < lam.real < self.c**2

    @property
    def period(self):
        return 2j * math.pi if self.hyperbolic else TWO_PI

    def axes(self) -> tuple[complex, complex]:
        lam = complex(self.lam)
        if self.hyperbolic:
            return (math.sqrt(lam.real), math.sqrt(self.c**2 - lam.real))
        return (cmath.sqrt(lam), cmath.sqrt(lam - self.c**2))

    def _local(self, t):
        a, b = self.axes()
        if self.hyperbolic:
            return (self.branch * a * cmath.cosh(t), b * cmath.sinh(t))
        return (a * cmath.cos(t), b * cmath.sin(t))

    def _local_deriv(self, t):
        a, b = self.axes()
        if self.hyperbolic:
            return (self.branch * a * cmath.sinh(t), b * cmath.cosh(t))
        return (-a * cmath.sin(t), b * cmath.cos(t))

    def point(self, t):
        return self.frame.apply(*self._local(t))

    def deriv(self, t):
        return self.frame.rotate(*self._local_deriv(t))

    def parameter_of(self, x, y, near=None):
        u, v = self.frame.inverse_apply(x, y)
        a, b = self.axes()
        if self.hyperbolic:
            t = cmath.log(u / (self.branch * a) + v / b)
        else:
            t = -1j * cmath.log(u / a + 1j * v / b)
        return _unwrap(t, near, self.period)

    def conic_matrix(self):
        lam = complex(self.lam)
        Q = np.diag([-1.0, 1.0 / lam, 1.0 / (lam - self.c**2)]).astype(complex)
        return _framed(Q, self.frame)

    def foci(self) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
        return (self.frame.apply(self.c, 0.0), self.frame.apply(-self.c, 0.0))


@dataclass(frozen=True)
class ConfocalFamily:
    c: float
    frame: Frame = IDENTITY

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("confocal family needs c > 0 (circles are a separate kind)")


def conic_at(family: ConfocalFamily, lam: complex, branch: int = 1) -> ConfocalConic:
    if abs(lam) < 1e-12 or abs(lam - family.c**2) < 1e-12:
        raise ValueError(f"degenerate member lambda={lam} of the confocal family")
    return ConfocalConic(family.c, lam, family.frame, branch)


@dataclass(frozen=True, eq=True)
class ParabolaMirror(Mirror):
    """``x^2 = 4 f (y + f)`` in its frame: focus at the frame origin, axis along y."""

    f: float
    frame: Frame = IDENTITY
    kind = "parabola"

    def __post_init__(self):
        if self.f == 0:
            raise ValueError("f = 0 parabola is degenerate")

    def point(self, t):
        return self.frame.apply(t, t * t / (4 * self.f) - self.f)

    def deriv(self, t):
        return self.frame.rotate(1.0, t / (2 * self.f))

    def parameter_of(self, x, y, near=None):
        return self.frame.inverse_apply(x, y)[0]

    def conic_matrix(self):
        f = self.f
        Q = np.array([[-4 * f * f, 0, -2 * f], [0, 1, 0], [-2 * f, 0, 0]], dtype=complex)
        return _framed(Q, self.frame)


@dataclass(frozen=True)
class ParabolaFamily:
    frame: Frame = IDENTITY


def parabola_at(family: ParabolaFamily, f: float) -> ParabolaMirror:
    return ParabolaMirror(f, family.frame)


@dataclass(frozen=True, eq=True)
class MirrorImage(Mirror):
    """Image of ``base`` under the symmetry about ``axis``."""

    base: Mirror
    axis: ProjLine
    kind = "mirror-image"

    def __post_init__(self):
        if is_isotropic(self.axis):
            raise DegenerateMirrorError("isotropic symmetry axis")

    @property
    def period(self):
        return self.base.period

    def _S(self):
        return symmetry_matrix(self.axis)

    def point(self, t):
        x, y = self.base.point(t)
        S = self._S()
        return (S[1][0] + S[1][1] * x + S[1][2] * y, S[2][0] + S[2][1] * x + S[2][2] * y)

    def deriv(self, t):
        vx, vy = self.base.deriv(t)
        S = self._S()
        return (S[1][1] * vx + S[1][2] * vy, S[2][1] * vx + S[2][2] * vy)

    def parameter_of(self, x, y, near=None):
        S = self._S()
        u = S[1][0] + S[1][1] * x + S[1][2] * y
        v = S[2][0] + S[2][1] * x + S[2][2] * y
        return self.base.parameter_of(u, v, near)

    def conic_matrix(self):
        Q = self.base.conic_matrix()
        if Q is None:
            return None
        S = np.array(self._S(), dtype=complex)
        return S.T @ Q @ S

    def is_line(self) -> bool:
        return self.base.is_line()

    def as_line(self) -> ProjLine:
        S = np.array(self._S(), dtype=complex)
        return ProjLine(*(S.T @ np.array(line_of(self.base).coords)))


def line_of(m: Mirror) -> ProjLine:
    if isinstance(m, LineMirror):
        return m.line
    if isinstance(m, MirrorImage) and m.is_line():
        return m.as_line()
    raise TypeError("not a line mirror")


def tangent_line(m: Mirror, t: complex) -> ProjLine:
    if m.is_line():
        return line_of(m)
    x, y = m.point(t)
    vx, vy = m.deriv(t)
    scale = 1.0 + abs(x) + abs(y)
    if abs(vx) + abs(vy) < 1e-14 * scale:
        raise ValueError(f"singular parameter t={t}")
    return ProjLine.through(ProjPoint.affine(x, y), ProjPoint(0.0, vx, vy))


def polar_line(m: Mirror, p: ProjPoint) -> ProjLine:
    Q = m.conic_matrix()
    if Q is None:
        raise TypeError("polar lines need a conic mirror")
    return ProjLine(*(Q @ np.array(p.coords)))


@dataclass(frozen=True)
class IntersectionSet:
    points: tuple[tuple[ProjPoint, int], ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _spanning_points(l: ProjLine):
    c = np.array(l.coords)
    m = int(np.argmax(np.abs(c)))
    others = [k for k in range(3) if k != m]
    pts = []
    for k in others:
        e = np.zeros(3, dtype=complex)
        e[k] = 1.0
        pts.append(np.cross(c, e))
    return pts


def intersect_line_mirror(
    l: ProjLine, m: Mirror, tol: float = 1e-12, double_tol: float = 1e-13
) -> IntersectionSet:
    if m.is_line():
        ml = line_of(m)
        if ml.coincides(l):
            raise ValueError("line coincides with the line mirror")
        return IntersectionSet(((l.intersect(ml), 1),))
    Q = m.conic_matrix()
    p, q = _spanning_points(l)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    # (mu p + nu q)^T Q (mu p + nu q) = a nu^2 + b mu nu + c mu^2
    a = q @ Q @ q
    b = 2 * (p @ Q @ q)
    c = p @ Q @ p
    scale = abs(a) + abs(b) + abs(c)
    if scale < tol * np.linalg.norm(Q):
        raise ValueError("line lies in the conic (degenerate locus)")
    disc = b * b - 4 * a * c
    if abs(disc) <= double_tol * scale**2:
        # tangency: double root of a t^2 + b t + c with t = nu/mu
        if abs(a) >= abs(c):
            h = p - b / (2 * a) * q
        else:
            h = -b / (2 * c) * p + q
        return IntersectionSet(((ProjPoint(*h), 2),))
    sq = cmath.sqrt(disc)
    if (b.conjugate() * sq).real < 0:
        sq = -sq
    w = -(b + sq) / 2
    # roots nu/mu = w/a and c/w, written homogeneously
    h1 = a * p + w * q
    h2 = w * p + c * q
    return IntersectionSet(((ProjPoint(*h1), 1), (ProjPoint(*h2), 1)))
