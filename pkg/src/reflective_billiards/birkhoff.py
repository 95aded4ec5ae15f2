"""Framed k-gons, the Birkhoff distribution and integral planes for k = 4.

Coordinates on the space of pointed lines are ``(A_j, zeta_j)``: the vertex in
the affine chart and the direction coordinate of its frame line. The frame
constraint at vertex ``j`` is ``zeta_j^2 = z(A_{j-1} - A_j) z(A_{j+1} - A_j)``,
and the contact form is ``theta_j = det(dA_j, e(zeta_j))`` with
``e(zeta) = (1 - zeta, i(1 + zeta))``, a vector of direction ``zeta``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .projective import (
    DirectionCoord,
    ProjLine,
    ProjPoint,
    bilinear_form,
    is_isotropic,
    reflection_law_verdict,
)
from .triangular import concordant_pair

RANK_TOL = 1e-9
LAMBDA_TOL = 1e-9


class SingularPoint(ValueError):
    pass


class ComponentError(ValueError):
    """No concordant length collection: the gon lies in the minus component."""


def _J(v):
    return np.array([-v[1], v[0]])


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _e(zeta):
    return np.array([1 - zeta, 1j * (1 + zeta)])


_DE = np.array([-1.0, 1j])


def _z(v) -> complex:
    return (v[1] - 1j * v[0]) / (v[1] + 1j * v[0])


def _dz(v) -> np.ndarray:
    # gradient of z(v) in (v1, v2)
    D = v[1] + 1j * v[0]
    return np.array([-2j * v[1] / D**2, 2j * v[0] / D**2])


@dataclass(frozen=True)
class FramedKGon:
    points: tuple[ProjPoint, ...]
    lines: tuple[ProjLine, ...]

    def __post_init__(self):
        k = len(self.points)
        if k < 3 or len(self.lines) != k:
            raise ValueError("need k >= 3 vertices, one frame line each")
        for j in range(k):
            A, L = self.points[j], self.lines[j]
            if not A.is_finite():
                raise ValueError("vertices must be finite")
            if is_isotropic(L):
                raise ValueError(f"frame line {j} is isotropic")
            prev, nxt = self.points[j - 1], self.points[(j + 1) % k]
            if A.coincides(prev, 1e-12) or A.coincides(nxt, 1e-12):
                raise ValueError(f"vertex {j} coincides with a neighbor")
            ein, eout = ProjLine.through(A, prev), ProjLine.through(A, nxt)
            if is_isotropic(ein) or is_isotropic(eout):
                raise ValueError(f"isotropic edge at vertex {j}")
            if ein.coincides(L) or eout.coincides(L) or ein.coincides(eout):
                raise ValueError(f"edges and frame line at vertex {j} are not distinct")
            if not reflection_law_verdict(prev, A, nxt, L, 1e-8).ok:
                raise ValueError(f"edges at vertex {j} are not symmetric about the frame line")

    @property
    def k(self) -> int:
        return len(self.points)

    def xy(self) -> np.ndarray:
        return np.array([p.xy() for p in self.points], dtype=complex)

    def zetas(self) -> np.ndarray:
        return np.array([DirectionCoord.from_line(L).z for L in self.lines])

    @classmethod
    def from_arrays(cls, pts, zetas) -> "FramedKGon":
        P = [ProjPoint.affine(*p) for p in pts]
        L = [ProjLine.from_point_direction(p, tuple(_e(z))) for p, z in zip(P, zetas)]
        return cls(tuple(P), tuple(L))


def frame_from_points(pts, signs) -> FramedKGon:
    """Frame a complex gon by ``zeta_j = sign_j sqrt(z_in z_out)`` (principal root)."""
    pts = np.asarray(pts, dtype=complex)
    k = len(pts)
    zs = []
    for j in range(k):
        zin, zout = _z(pts[j - 1] - pts[j]), _z(pts[(j + 1) % k] - pts[j])
        zs.append(signs[j] * cmath.sqrt(zin * zout))
    return FramedKGon.from_arrays(pts, zs)


def frame_real_kgon(points, alpha) -> FramedKGon:
    """Exterior bisector at ``alpha_j = 1``, interior bisector at ``alpha_j = -1``."""
    pts = np.asarray(points, dtype=float)
    k = len(pts)
    if len(alpha) != k or any(a not in (1, -1) for a in alpha):
        raise ValueError("alpha must be a list of +-1, one per vertex")
    lines = []
    for j in range(k):
        n1 = pts[j - 1] - pts[j]
        n2 = pts[(j + 1) % k] - pts[j]
        l1, l2 = np.linalg.norm(n1), np.linalg.norm(n2)
        if min(l1, l2) < 1e-12:
            raise ValueError("degenerate gon: coincident vertices")
        n1, n2 = n1 / l1, n2 / l2
        if abs(_det(n1, n2)) < 1e-12:
            raise ValueError("degenerate gon: collinear neighbors")
        d = _J(n1 + n2) if alpha[j] == 1 else n1 + n2
        lines.append(ProjLine.from_point_direction(ProjPoint.affine(*pts[j]), tuple(d)))
    return FramedKGon(tuple(ProjPoint.affine(*p) for p in pts), tuple(lines))


def concordant_holonomy(g: FramedKGon) -> tuple[complex, list[complex]]:
    """Transport a length around the cycle; returns (holonomy, lengths).

    ``lengths[j] = |A_j A_{j+1}|`` starting from the principal root of edge 0.
    """
    k = g.k
    P = g.points
    a = g.xy()
    e0 = a[1] - a[0]
    ls = [cmath.sqrt(bilinear_form(e0, e0))]
    for j in range(1, k + 1):
        jj = j % k
        p, q = concordant_pair(P[j - 1], P[jj], P[(jj + 1) % k], g.lines[jj])
        ls.append(ls[-1] * q / p)
    return ls[-1] / ls[0], ls[:k]


def concordant_lengths(g: FramedKGon) -> list[complex] | None:
    h, ls = concordant_holonomy(g)
    return ls if abs(h - 1) < abs(h + 1) else None


def _require_lengths(g: FramedKGon) -> list[complex]:
    ls = concordant_lengths(g)
    if ls is None:
        raise ComponentError("frame has no concordant length collection")
    return ls


def tangent_functions(g: FramedKGon) -> list[complex]:
    """``t_j = i(z_j - w_j)/(z_j + w_j)``: tangent of the angle from L_j-perp to edge j."""
    a = g.xy()
    out = []
    for j in range(g.k):
        d = np.array(g.lines[j].direction())
        z = DirectionCoord.from_vector(_J(d))
        w = DirectionCoord.from_vector(a[(j + 1) % g.k] - a[j])
        num = z.num * w.den - w.num * z.den
        den = z.num * w.den + w.num * z.den
        if abs(den) < 1e-12 or abs(num) < 1e-12:
            raise SingularPoint(f"z = +-w at vertex {j}")
        out.append(1j * num / den)
    return out


def lambda_residual(g: FramedKGon) -> complex:
    if g.k != 4:
        raise ValueError("the Lambda locus is defined for quadrilaterals")
    l1, l2, l3, l4 = _require_lengths(g)
    return l1 * l3 - l2 * l4


def on_lambda(g: FramedKGon, tol: float = LAMBDA_TOL) -> bool:
    ls = _require_lengths(g)
    scale = max(abs(x * y) for x in ls for y in ls)
    return abs(lambda_residual(g)) < tol * scale


# --- the distribution -------------------------------------------------------


def constraint_jacobian(pts, zetas) -> np.ndarray:
    """Jacobian of ``F_j = zeta_j^2 - z(A_{j-1}-A_j) z(A_{j+1}-A_j)`` in (A, zeta)."""
    k = len(pts)
    Jm = np.zeros((k, 3 * k), dtype=complex)
    for j in range(k):
        vin, vout = pts[j - 1] - pts[j], pts[(j + 1) % k] - pts[j]
        zin, zout = _z(vin), _z(vout)
        gin, gout = _dz(vin), _dz(vout)
        jp, jn = (j - 1) % k, (j + 1) % k
        Jm[j, 3 * jp:3 * jp + 2] += -zout * gin
        Jm[j, 3 * jn:3 * jn + 2] += -zin * gout
        Jm[j, 3 * j:3 * j + 2] += zout * gin + zin * gout
        Jm[j, 3 * j + 2] += 2 * zetas[j]
    return Jm


def contact_basis(pts, zetas) -> np.ndarray:
    """Columns spanning the product contact distribution (A_j along L_j, zeta_j free)."""
    k = len(pts)
    B = np.zeros((3 * k, 2 * k), dtype=complex)
    for j in range(k):
        e = _e(zetas[j])
        B[3 * j:3 * j + 2, 2 * j] = e / np.linalg.norm(e)
        B[3 * j + 2, 2 * j + 1] = 1.0
    return B


def _null(M: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    _, s, vh = np.linalg.svd(M)
    cut = tol * (s[0] if len(s) and s[0] > 0 else 1.0)
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T, s


@dataclass(frozen=True)
class DistributionReport:
    dimension: int
    basis: np.ndarray  # (3k, dim), orthonormal in (A, zeta) coordinates
    singular_values: np.ndarray


def distribution_dimension(g: FramedKGon, tol: float = RANK_TOL) -> DistributionReport:
    pts, zetas = g.xy(), g.zetas()
    Jm = constraint_jacobian(pts, zetas)
    s_full = np.linalg.svd(Jm, compute_uv=False)
    if s_full[-1] < tol * s_full[0]:
        raise SingularPoint("constraint Jacobian is rank deficient")
    B = contact_basis(pts, zetas)
    N, s = _null(Jm @ B, tol)
    D, _ = np.linalg.qr(B @ N)
    return DistributionReport(D.shape[1], D, s)


def distribution_residual(g: FramedKGon, v: np.ndarray) -> float:
    """Relative distance of a tangent vector in (A, zeta) coordinates to D(x)."""
    D = distribution_dimension(g).basis
    v = np.asarray(v, dtype=complex)
    r = v - D @ (D.conj().T @ v)
    return float(np.linalg.norm(r) / np.linalg.norm(v))


def contact_two_form(zetas, j: int, X, Y) -> complex:
    """``d theta_j (X, Y)`` for vectors in (A, zeta) coordinates."""
    xa, ya = X[3 * j:3 * j + 2], Y[3 * j:3 * j + 2]
    return _det(xa, _DE) * Y[3 * j + 2] - _det(ya, _DE) * X[3 * j + 2]


# --- nu-frame and integral planes (k = 4) -----------------------------------


def _frame_dirs(g: FramedKGon):
    ls = _require_lengths(g)
    a = g.xy()
    k = g.k
    u = [(a[(j + 1) % k] - a[j]) / ls[j] for j in range(k)]
    return ls, [u[j - 1] + u[j] for j in range(k)]


def _zeta_coupling(g: FramedKGon, e):
    """Coefficients (a_j, c_j) of x_{j-1}, x_{j+1} in the zeta_j velocity."""
    k = g.k
    Jm = constraint_jacobian(g.xy(), g.zetas())
    out = []
    for j in range(k):
        jp, jn = (j - 1) % k, (j + 1) % k
        d = Jm[j, 3 * j + 2]
        out.append((-(Jm[j, 3 * jp:3 * jp + 2] @ e[jp]) / d, -(Jm[j, 3 * jn:3 * jn + 2] @ e[jn]) / d))
    return out


def nu_frame(g: FramedKGon) -> tuple[np.ndarray, float]:
    """Scales ``kappa`` with ``nu_j = kappa_j x_j`` where ``dA_j = x_j e_j``.

    ``e_j = u_{j-1} + u_j`` is a direction of L_j built from concordant unit
    edges. Restricted to D^4, ``d theta_j`` is a multiple of
    ``x_j ^ (a_j x_{j-1} + c_j x_{j+1})``; matching it with
    ``nu_j ^ (l_{j-1} nu_{j+1} + l_j nu_{j-1})`` fixes ``kappa`` up to one scale
    per parity class (set to 1 at vertices 1, 2). The forms at vertices 3, 4
    over-determine the scales; the returned mismatch measures how well the
    l-weighted normal form holds.
    """
    if g.k != 4:
        raise ValueError("the nu-frame is built for quadrilaterals")
    ls, e = _frame_dirs(g)
    ac = _zeta_coupling(g, e)
    ratio = [c / a * ls[j] / ls[j - 1] for j, (a, c) in enumerate(ac)]  # kappa_{j+1}/kappa_{j-1}
    kappa = np.ones(4, dtype=complex)
    kappa[2] = kappa[0] * ratio[1]
    kappa[3] = kappa[1] / ratio[0]
    mismatch = max(abs(ratio[2] * kappa[1] / kappa[3] - 1), abs(ratio[3] * kappa[2] / kappa[0] - 1))
    return kappa, float(mismatch)


def lift_nu(g: FramedKGon, nu) -> np.ndarray:
    """Vector of D(x) with prescribed nu-coordinates, in (A, zeta) coordinates."""
    _, e = _frame_dirs(g)
    kappa, _ = nu_frame(g)
    k = g.k
    V = np.zeros(3 * k, dtype=complex)
    for j in range(k):
        V[3 * j:3 * j + 2] = (nu[j] / kappa[j]) * e[j]
    # zeta velocities from the linearized constraint
    Jm = constraint_jacobian(g.xy(), g.zetas())
    rhs = -(Jm @ V)
    for j in range(k):
        V[3 * j + 2] = rhs[j] / Jm[j, 3 * j + 2]
    return V


def nu_coordinates(g: FramedKGon, V: np.ndarray) -> np.ndarray:
    _, e = _frame_dirs(g)
    kappa, _ = nu_frame(g)
    out = []
    for j in range(g.k):
        va = V[3 * j:3 * j + 2]
        out.append(kappa[j] * bilinear_form(va, e[j]) / bilinear_form(e[j], e[j]))
    return np.array(out)


@dataclass(frozen=True)
class IntegralPlane:
    basis: np.ndarray  # (2, 4): rows (0, l1, eta, -l4) and (l1, 0, -l2, eta')
    eta: complex
    eta_prime: complex
    lengths: tuple[complex, ...]
    form_residual: float  # max |d theta_j| on the plane, relative
    product_residual: float  # |eta eta' - (l2 l4 - l1 l3)| relative

    def vectors(self, g: FramedKGon) -> np.ndarray:
        return np.stack([lift_nu(g, r) for r in self.basis], axis=1)


def integral_plane(g: FramedKGon, eta: complex | None = None, tangent=None) -> IntegralPlane:
    """The integral 2-plane of D^4 through a given direction.

    The vanishing of the contact 2-forms leaves a pencil of integral planes
    indexed by ``eta``; ``eta`` is read off ``tangent`` (a vector of D(x) with
    ``nu_1 = 0``) when supplied, else taken as the symmetric root
    ``eta = eta' = sqrt(l2 l4 - l1 l3)``. ``eta'`` is then solved from the
    2-forms themselves, not from the product formula.
    """
    if g.k != 4:
        raise ValueError("integral planes are built for quadrilaterals")
    ls = _require_lengths(g)
    l1, l2, l3, l4 = ls
    scale = max(abs(x * y) for x in ls for y in ls)
    lam = l2 * l4 - l1 * l3
    if abs(lam) < LAMBDA_TOL * scale:
        raise SingularPoint("gon lies on the Lambda locus: integral plane not unique")
    if tangent is not None:
        nu = nu_coordinates(g, np.asarray(tangent, dtype=complex))
        if abs(nu[0]) > 1e-6 * np.max(np.abs(nu)):
            raise ValueError("tangent must fix the first vertex (nu_1 = 0)")
        eta = nu[2] * l1 / nu[1]
    elif eta is None:
        eta = cmath.sqrt(lam)
    zetas = g.zetas()
    R = lift_nu(g, [0, l1, eta, -l4])
    R0 = lift_nu(g, [l1, 0, -l2, 0])
    R1 = lift_nu(g, [0, 0, 0, 1])
    # d theta_j(R, R0 + eta' R1) = 0 for all j: least squares in eta'
    a = np.array([contact_two_form(zetas, j, R, R0) for j in range(4)])
    b = np.array([contact_two_form(zetas, j, R, R1) for j in range(4)])
    eta_p = -np.vdot(b, a) / np.vdot(b, b)
    Rp = R0 + eta_p * R1
    form_res = float(
        max(abs(contact_two_form(zetas, j, R, Rp)) for j in range(4))
        / (np.linalg.norm(R) * np.linalg.norm(Rp))
    )
    basis = np.array([[0, l1, eta, -l4], [l1, 0, -l2, eta_p]], dtype=complex)
    prod = float(abs(eta * eta_p - lam) / scale)
    return IntegralPlane(basis, complex(eta), complex(eta_p), tuple(ls), form_res, prod)


# --- lifting billiard orbits ------------------------------------------------


def lift_orbit_state(points, tangent_lines) -> np.ndarray:
    """(A_j, zeta_j) coordinates of an orbit framed by mirror tangent lines."""
    out = []
    for p, L in zip(points, tangent_lines):
        x, y = p.xy()
        out.extend([x, y, DirectionCoord.from_line(L).z])
    return np.array(out, dtype=complex)


def state_to_gon(X: np.ndarray) -> FramedKGon:
    k = len(X) // 3
    pts = [X[3 * j:3 * j + 2] for j in range(k)]
    return FramedKGon.from_arrays(pts, [X[3 * j + 2] for j in range(k)])


def orbit_family_tangents(b, t1: complex, t2: complex, seed=None, h: float = 1e-5):
    """Lifted orbit state at ``(t1, t2)`` and central differences in t1 and t2."""
    from .conics import tangent_line
    from .reflectivity import extend_orbit

    def state(s1, s2, sd):
        o = extend_orbit(b, s1, s2, sd)
        if not o.closed:
            raise SingularPoint(f"orbit at ({s1}, {s2}) does not close")
        T = [tangent_line(m, t) for m, t in zip(b.mirrors, o.params)]
        return lift_orbit_state(o.points, T), o

    X, o = state(t1, t2, seed)
    d1 = (state(t1 + h, t2, o)[0] - state(t1 - h, t2, o)[0]) / (2 * h)
    d2 = (state(t1, t2 + h, o)[0] - state(t1, t2 - h, o)[0]) / (2 * h)
    return X, d1, d2
