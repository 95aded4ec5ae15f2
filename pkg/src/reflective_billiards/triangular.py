"""Framed triangles with a fixed vertex, concordant lengths and triangular spirals.

A state is a triangle ``ABC`` with ``A`` fixed, the line ``AC`` equal to
``H(AB)`` for a fixed complex rotation ``H`` about ``A``, and symmetry lines
``L_B`` (of ``BA``, ``BC``) and ``L_C`` (of ``CA``, ``CB``). The line field moves
``B`` along ``L_B`` and ``C`` along ``L_C`` while keeping ``AC = H(AB)``; the
squared perimeter built from concordant lengths is its first integral.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from .projective import (
    DirectionCoord,
    ProjLine,
    ProjPoint,
    chordal,
    is_isotropic,
    reflect_direction,
    reflection_matrix,
)

SINGULAR_COND = 1e8


class SingularState(RuntimeError):
    pass


def _vec(p: ProjPoint) -> np.ndarray:
    return np.array(p.xy(), dtype=complex)


def _J(v):
    return np.array([-v[1], v[0]])


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _bil(u, v):
    return u[0] * v[0] + u[1] * v[1]


@dataclass(frozen=True)
class RotationH:
    """Element of SO(2, C): rotation by the complex angle ``psi``."""

    psi: complex

    def __post_init__(self):
        if abs(cmath.exp(1j * self.psi) - 1) < 1e-12:
            raise ValueError("H must differ from the identity")

    @property
    def matrix(self) -> np.ndarray:
        c, s = cmath.cos(self.psi), cmath.sin(self.psi)
        return np.array([[c, -s], [s, c]])

    @property
    def mu(self) -> complex:
        """Multiplier on direction coordinates: ``z -> mu z``."""
        return cmath.exp(2j * self.psi)

    def __call__(self, v):
        return self.matrix @ np.asarray(v, dtype=complex)


@dataclass(frozen=True)
class FramedTriangleState:
    A: ProjPoint
    B: ProjPoint
    C: ProjPoint
    L_B: ProjLine
    L_C: ProjLine
    H: RotationH


def _symmetric_about(L: ProjLine, P: ProjPoint, Q: ProjPoint, R: ProjPoint, tol=1e-8) -> None:
    """Check that lines ``QP`` and ``QR`` are symmetric about ``L`` (through ``Q``)."""
    if not L.contains(Q, 1e-8):
        raise ValueError("frame line must pass through its vertex")
    zin = DirectionCoord.from_line(ProjLine.through(Q, P))
    zout = DirectionCoord.from_line(ProjLine.through(Q, R))
    if chordal(reflect_direction(zin, DirectionCoord.from_line(L)), zout) > tol:
        raise ValueError("edges are not symmetric about the frame line")


def concordant_pair(A: ProjPoint, B: ProjPoint, C: ProjPoint, L: ProjLine) -> tuple[complex, complex]:
    """Signed lengths ``(|BA|, |BC|)`` that are ``L``-concordant.

    The symmetry ``S`` about ``L`` maps the unit vector ``n`` of ``BA`` into the
    line ``BC``; concordance ``|B S(x)| = -|Bx|`` fixes ``|BC| = -(C-B).S(n)``.
    The global sign follows the principal square root of ``(A-B).(A-B)``.
    """
    if is_isotropic(L):
        raise ValueError("isotropic frame line")
    _symmetric_about(L, A, B, C)
    a, b, c = _vec(A), _vec(B), _vec(C)
    ba, bc = a - b, c - b
    for e in (ba, bc):
        if abs(_bil(e, e)) < 1e-14 * (abs(e[0]) ** 2 + abs(e[1]) ** 2):
            raise ValueError("isotropic edge: complex length degenerates")
    l_ba = cmath.sqrt(_bil(ba, ba))
    n = ba / l_ba
    S = np.array(reflection_matrix(L.direction()))
    return l_ba, -_bil(bc, S @ n)


def squared_perimeter(s: FramedTriangleState) -> complex:
    p, q = concordant_pair(s.A, s.B, s.C, s.L_B)
    q2, r = concordant_pair(s.B, s.C, s.A, s.L_C)
    P = p + q + r * (q / q2)
    return P * P


def concordant_lengths3(s: FramedTriangleState) -> tuple[complex, complex, complex]:
    """``(l_AB, l_BC, l_CA)`` normalized concordant at both B and C."""
    p, q = concordant_pair(s.A, s.B, s.C, s.L_B)
    q2, r = concordant_pair(s.B, s.C, s.A, s.L_C)
    return p, q, r * (q / q2)


def _branch(v, near: complex) -> complex:
    """Square root of ``v.v`` on the branch closest to the tracked value ``near``."""
    r = cmath.sqrt(_bil(v, v))
    return r if abs(r - near) <= abs(r + near) else -r


def _frame_dir(P, Q, R, lPQ, lQR):
    """Direction of the symmetry line at ``Q`` for concordant lengths ``|QP|, |QR|``.

    The tracked lengths only choose the branch; the unit vectors are exact.
    """
    return _J((P - Q) / _branch(P - Q, lPQ) + (R - Q) / _branch(R - Q, lQR))


def _velocity(a, b, c, lab, lbc, lca, H: RotationH):
    eB = _frame_dir(a, b, c, lab, lbc)
    eC = _frame_dir(b, c, a, lbc, lca)
    Hm = H.matrix
    bp, cp = b - a, c - a
    r1 = _det(cp, Hm @ eB)
    r2 = _det(eC, Hm @ bp)
    scale = (np.linalg.norm(cp) * np.linalg.norm(eB) + np.linalg.norm(eC) * np.linalg.norm(bp)) or 1.0
    u, w = r2, -r1
    if math.hypot(abs(r1), abs(r2)) < scale / SINGULAR_COND:
        raise SingularState("kernel is two-dimensional")
    if abs(u) * SINGULAR_COND < abs(w):
        raise SingularState("B stalls: vertex speed normalization blows up")
    norm = abs(u) * math.sqrt(abs(_bil(eB, eB)))
    if norm == 0:
        raise SingularState("isotropic frame direction at B")
    return u * eB / norm, w * eC / norm


def line_field_direction(s: FramedTriangleState) -> tuple[np.ndarray, np.ndarray]:
    """Velocities ``(dB, dC)`` spanning the line field, unit complex speed of B."""
    lab, lbc, lca = concordant_lengths3(s)
    return _velocity(_vec(s.A), _vec(s.B), _vec(s.C), lab, lbc, lca, s.H)


def check_state(s: FramedTriangleState, tol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``s`` lies in the closure of ``M_{A,H}``."""
    a, b, c = _vec(s.A), _vec(s.B), _vec(s.C)
    if min(np.linalg.norm(b - a), np.linalg.norm(c - a), np.linalg.norm(c - b)) < tol:
        raise ValueError("coincident vertices")
    if abs(_det(c - a, s.H(b - a))) > tol * np.linalg.norm(c - a) * np.linalg.norm(b - a):
        raise ValueError("AC differs from H(AB)")
    _symmetric_about(s.L_B, s.A, s.B, s.C, tol)
    _symmetric_about(s.L_C, s.B, s.C, s.A, tol)


def make_state(A, B, C, H: RotationH, exterior_B: bool = True, exterior_C: bool = True) -> FramedTriangleState:
    """Frame a triangle by picking one of the two symmetry lines at B and at C.

    ``exterior`` picks the line along ``J(n1 + n2)`` for the principal unit
    vectors ``n1, n2`` of the two edges, which is the exterior bisector for real
    triangles.
    """
    a, b, c = (np.asarray(v, dtype=complex) for v in (A, B, C))

    def frame(p, q, r, ext):
        n1 = (p - q) / cmath.sqrt(_bil(p - q, p - q))
        n2 = (r - q) / cmath.sqrt(_bil(r - q, r - q))
        d = _J(n1 + n2) if ext else n1 + n2
        if np.linalg.norm(d) < 1e-12:
            d = _J(n1 - n2) if ext else n1 - n2
        return ProjLine.from_point_direction(ProjPoint.affine(*q), tuple(d))

    return FramedTriangleState(
        ProjPoint.affine(*a), ProjPoint.affine(*b), ProjPoint.affine(*c),
        frame(a, b, c, exterior_B), frame(b, c, a, exterior_C), H,
    )


def circle_state(r_b: complex, phi: float = 0.0, A=(0.0, 0.0)) -> FramedTriangleState:
    """Degenerate case ``AB = AC``: ``C = 2A - B`` on the same circle, ``H = -Id``.

    Frame lines are the perpendiculars to ``AB`` at ``B`` and ``C``.
    """
    a = np.asarray(A, dtype=complex)
    u = np.array([math.cos(phi), math.sin(phi)], dtype=complex)
    b, c = a + r_b * u, a - r_b * u
    LB = ProjLine.from_point_direction(ProjPoint.affine(*b), tuple(_J(u)))
    LC = ProjLine.from_point_direction(ProjPoint.affine(*c), tuple(_J(u)))
    return FramedTriangleState(
        ProjPoint.affine(*a), ProjPoint.affine(*b), ProjPoint.affine(*c), LB, LC, RotationH(math.pi)
    )


@dataclass
class Trajectory:
    times: np.ndarray
    B: np.ndarray  # (n, 2) complex
    C: np.ndarray
    lengths: np.ndarray  # (n, 3) complex: l_AB, l_BC, l_CA tracked along the flow
    P2: np.ndarray
    A: np.ndarray
    H: RotationH
    truncated: str | None = None

    def state(self, i: int) -> FramedTriangleState:
        a, b, c = self.A, self.B[i], self.C[i]
        lab, lbc, lca = self.lengths[i]
        LB = ProjLine.from_point_direction(ProjPoint.affine(*b), tuple(_frame_dir(a, b, c, lab, lbc)))
        LC = ProjLine.from_point_direction(ProjPoint.affine(*c), tuple(_frame_dir(b, c, a, lbc, lca)))
        return FramedTriangleState(ProjPoint.affine(*a), ProjPoint.affine(*b), ProjPoint.affine(*c), LB, LC, self.H)

    def relative_drift(self) -> float:
        return float(np.max(np.abs(self.P2 - self.P2[0])) / abs(self.P2[0]))


def integrate_spiral(
    s0: FramedTriangleState, steps: int, h: float, rtol: float = 1e-12, atol: float = 1e-14
) -> Trajectory:
    """Integrate the line field with an adaptive 4(5) Runge-Kutta pair.

    Concordant lengths ride along as state variables, so square-root branches
    are continued rather than re-chosen. ``P^2`` is recomputed from geometry at
    every output point, independently of the tracked lengths.
    """
    check_state(s0)
    a = _vec(s0.A)
    Hm = s0.H.matrix
    b0, c0 = _vec(s0.B), _vec(s0.C)
    hb = Hm @ (b0 - a)
    # C = A + s H(B - A) keeps the constraint AC = H(AB) exactly
    s_init = np.vdot(hb, c0 - a) / np.vdot(hb, hb)
    y0 = np.concatenate([b0, [s_init], np.array(concordant_lengths3(s0))])

    def unpack(y):
        b, sc = y[0:2], y[2]
        return b, a + sc * (Hm @ (b - a))

    def rhs(_t, y):
        (b, c), sc, (lab, lbc, lca) = unpack(y), y[2], y[3:6]
        vb, vc = _velocity(a, b, c, lab, lbc, lca, s0.H)
        hb = Hm @ (b - a)
        ds = np.vdot(hb, vc - sc * (Hm @ vb)) / np.vdot(hb, hb)
        return np.concatenate([
            vb, [ds],
            [_bil(b - a, vb) / lab, _bil(c - b, vc - vb) / lbc, _bil(c - a, vc) / lca],
        ])

    times = h * np.arange(steps + 1)
    out = [y0]
    truncated = None
    solver = RK45(rhs, 0.0, y0, times[-1], rtol=rtol, atol=atol)
    k = 1
    try:
        while k < len(times) and solver.status == "running":
            solver.step()
            if solver.status == "failed":
                truncated = "step size underflow"
                break
            dense = solver.dense_output()
            while k < len(times) and abs(times[k]) <= abs(solver.t) + 1e-15:
                out.append(dense(times[k]))
                k += 1
    except SingularState as exc:
        truncated = f"singular state: {exc}"
    Y = np.array(out)
    C = np.array([unpack(y)[1] for y in Y])
    traj = Trajectory(times[: len(Y)], Y[:, 0:2], C, Y[:, 3:6], np.zeros(len(Y), complex), a, s0.H, truncated)
    traj.P2 = np.array([squared_perimeter(traj.state(i)) for i in range(len(Y))])
    return traj
