"""Billiards, orbit extension by folding reflections, and k-reflectivity checks.

An orbit is grown from two seed vertices ``A1 = a1(t1)`` and ``A2 = a2(t2)``:
the edge ``A1 A2`` is reflected in the tangent line at ``A2``, intersected with
mirror 3, and so on up to mirror k. The orbit closes when the reflection law
also holds at ``A_k`` (edge back to ``A1``) and at ``A1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .conics import (
    ConfocalFamily,
    LineMirror,
    Mirror,
    MirrorImage,
    ParabolaFamily,
    conic_at,
    intersect_line_mirror,
    line_of,
    parabola_at,
    tangent_line,
)
from .projective import (
    COINCIDENCE_TOL,
    DegenerateMirrorError,
    DirectionCoord,
    ProjLine,
    ProjPoint,
    ReflectionVerdict,
    VerdictKind,
    is_isotropic,
    point_distance,
    reflect_direction,
    reflection_law_verdict,
)

CLOSURE_TOL = 1e-9


class ExtensionFailure(RuntimeError):
    pass


class PatchRejected(RuntimeError):
    pass


class Law(str, Enum):
    USUAL = "usual"
    SKEW = "skew"


@dataclass(frozen=True)
class Patch:
    """Real 2-dimensional slice ``t_j = x_j + i*imag_j`` of the parameter space."""

    t1: tuple[float, float]
    t2: tuple[float, float]
    imag: tuple[float, float] = (0.0, 0.0)

    def grid(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        g1 = np.linspace(self.t1[0], self.t1[1], n) + 1j * self.imag[0]
        g2 = np.linspace(self.t2[0], self.t2[1], n) + 1j * self.imag[1]
        return g1, g2


@dataclass(frozen=True)
class Orbit:
    params: tuple[complex, ...]
    points: tuple[ProjPoint, ...]
    verdicts: tuple[ReflectionVerdict, ...]
    closed: bool
    closure_residual: float
    degenerate: str | None = None
    laws: tuple[Law | None, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Billiard:
    mirrors: tuple[Mirror, ...]
    laws: tuple[Law, ...] | None = None
    seed: Orbit | None = field(default=None, compare=False)
    patch: Patch | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mirrors", tuple(self.mirrors))
        k = len(self.mirrors)
        if k < 3:
            raise ValueError("a billiard needs at least three mirrors")
        for j, m in enumerate(self.mirrors):
            n = self.mirrors[(j + 1) % k]
            if m.is_line() and n.is_line() and line_of(m).coincides(line_of(n)):
                raise ValueError(f"neighbor mirrors {j} and {(j + 1) % k} lie on one line")
        if self.laws is not None:
            laws = tuple(Law(x) for x in self.laws)
            if len(laws) != k:
                raise ValueError("one law flag per mirror")
            object.__setattr__(self, "laws", laws)

    @property
    def k(self) -> int:
        return len(self.mirrors)

    def with_seed(self, seed: Orbit | None, patch: Patch | None = None) -> "Billiard":
        return Billiard(self.mirrors, self.laws, seed, patch or self.patch)


def _tangent(m: Mirror, t: complex) -> ProjLine:
    T = tangent_line(m, t)
    if is_isotropic(T):
        raise DegenerateMirrorError("isotropic tangent")
    return T


def _outgoing(prev: ProjPoint, cur: ProjPoint, T: ProjLine) -> ProjLine:
    e_in = ProjLine.through(cur, prev)
    if e_in.is_infinity():
        raise DegenerateMirrorError("edge is the infinity line")
    z = reflect_direction(DirectionCoord.from_line(e_in), DirectionCoord.from_line(T))
    v = z.vector()
    return ProjLine.through(cur, ProjPoint(0.0, v[0], v[1]))


def _candidates(b: Billiard, j: int, prev: ProjPoint, cur: ProjPoint, t_cur: complex):
    """Possible next vertices after reflecting at vertex ``j`` (0-based)."""
    T = _tangent(b.mirrors[j], t_cur)
    out = _outgoing(prev, cur, T)
    nxt = b.mirrors[(j + 1) % b.k]
    pts = [p for p, _ in intersect_line_mirror(out, nxt, double_tol=0.0) if p.is_finite(1e-9)]
    far = [p for p in pts if point_distance(p, cur) > COINCIDENCE_TOL]
    return far or pts


def _side(line: ProjLine, p: ProjPoint) -> float:
    x, y = p.xy()
    return (line.c0 + line.c1 * x + line.c2 * y).real


def law_at(prev: ProjPoint, cur: ProjPoint, nxt: ProjPoint, T: ProjLine) -> Law | None:
    """Usual/skew classification for real configurations, ``None`` otherwise."""
    coords = [*prev.coords, *cur.coords, *nxt.coords, *T.coords]
    if any(abs(c.imag) > 1e-9 for c in coords):
        return None
    s1, s2 = _side(T, prev), _side(T, nxt)
    if abs(s1) < 1e-12 or abs(s2) < 1e-12:
        return None
    return Law.USUAL if (s1 > 0) == (s2 > 0) else Law.SKEW


def _finish(b: Billiard, params, points, tol: float) -> Orbit:
    k = b.k
    verdicts = []
    laws = []
    degenerate = None
    for j in range(k):
        prev, cur, nxt = points[j - 1], points[j], points[(j + 1) % k]
        try:
            T = _tangent(b.mirrors[j], params[j])
        except (DegenerateMirrorError, ValueError) as exc:
            degenerate = degenerate or f"vertex {j + 1}: {exc}"
            verdicts.append(ReflectionVerdict(VerdictKind.VIOLATED, float("inf")))
            laws.append(None)
            continue
        v = reflection_law_verdict(prev, cur, nxt, T, tol)
        if v.kind is VerdictKind.VERTEX_COINCIDENCE:
            degenerate = degenerate or f"vertex {j + 1} coincides with a neighbor"
        verdicts.append(v)
        laws.append(law_at(prev, cur, nxt, T) if degenerate is None else None)
    residual = max(verdicts[-1].residual, verdicts[0].residual)
    closed = degenerate is None and residual < tol
    return Orbit(tuple(params), tuple(points), tuple(verdicts), closed, residual, degenerate, tuple(laws))


def _law_mismatch(b: Billiard, o: Orbit) -> int:
    if b.laws is None:
        return 0
    return sum(1 for want, got in zip(b.laws, o.laws or ()) if got is not want)


def _start(b: Billiard, t1: complex, t2: complex):
    A = b.mirrors[0].point_at(t1)
    B = b.mirrors[1].point_at(t2)
    if point_distance(A, B) < COINCIDENCE_TOL:
        raise ExtensionFailure("A = B")
    return A, B


def extend_orbit(
    b: Billiard, t1: complex, t2: complex, seed: Orbit | None = None, tol: float = CLOSURE_TOL
) -> Orbit:
    """Fold reflections from ``(a1(t1), a2(t2))`` through all mirrors.

    With a seed, every intersection branch is the one nearest (chordally) to the
    seed's vertex. Without one, all branches are explored and the orbit with the
    fewest law mismatches and then the smallest closure residual is returned.
    """
    A, B = _start(b, t1, t2)
    if seed is not None:
        params, points = [t1, t2], [A, B]
        for j in range(1, b.k - 1):
            cands = _candidates(b, j, points[j - 1], points[j], params[j])
            if not cands:
                raise ExtensionFailure(f"no intersection with mirror {j + 2}")
            p = min(cands, key=lambda c: point_distance(c, seed.points[j + 1]))
            m = b.mirrors[j + 1]
            params.append(m.parameter_of(*p.xy(), near=seed.params[j + 1]))
            points.append(p)
        return _finish(b, params, points, tol)
    return min(_all_branches(b, t1, t2, tol), key=lambda o: (_law_mismatch(b, o), o.closure_residual))


def _all_branches(b: Billiard, t1, t2, tol) -> list[Orbit]:
    A, B = _start(b, t1, t2)
    partial = [([t1, t2], [A, B])]
    for j in range(1, b.k - 1):
        grown = []
        for params, points in partial:
            for p in _candidates(b, j, points[j - 1], points[j], params[j]):
                t = b.mirrors[j + 1].parameter_of(*p.xy())
                grown.append((params + [t], points + [p]))
        partial = grown
    if not partial:
        raise ExtensionFailure("every branch left the finite plane")
    return [_finish(b, params, points, tol) for params, points in partial]


@dataclass
class ClosureReport:
    n: int
    tol: float
    residuals: np.ndarray  # nan marks degenerate cells
    law_ok: np.ndarray
    orbits: list | None = field(default=None, repr=False)

    @property
    def degenerate_cells(self) -> int:
        return int(np.isnan(self.residuals).sum())

    def fraction_closed(self, tol: float | None = None) -> float:
        tol = self.tol if tol is None else tol
        r = np.where(np.isnan(self.residuals), np.inf, self.residuals)
        return float(((r < tol) & self.law_ok).sum()) / self.residuals.size

    @property
    def max_residual(self) -> float:
        r = self.residuals[~np.isnan(self.residuals)]
        return float(r.max()) if r.size else float("nan")

    @property
    def passed(self) -> bool:
        return self.fraction_closed() >= 0.99 and self.max_residual < self.tol

    def to_dict(self) -> dict:
        return {
            "grid": [self.n, self.n],
            "tol": self.tol,
            "fraction_closed": self.fraction_closed(),
            "max_residual": self.max_residual,
            "degenerate_cells": self.degenerate_cells,
            "passed": self.passed,
        }


def _safe_extend(b, t1, t2, seed, tol):
    try:
        o = extend_orbit(b, t1, t2, seed, tol)
    except (ExtensionFailure, DegenerateMirrorError, ValueError, ZeroDivisionError):
        return None
    return None if o.degenerate else o


def verify_k_reflectivity(
    b: Billiard, patch: Patch | None = None, n: int = 24, tol: float = CLOSURE_TOL
) -> ClosureReport:
    """Extend every cell of an ``n x n`` grid and summarize closure.

    Cells are seeded from their left neighbor, the first column from the cell
    above; billiards with law flags explore all branches in every cell.
    """
    patch = patch or b.patch
    if patch is None:
        raise ValueError("no patch given and the billiard carries no default patch")
    g1, g2 = patch.grid(n)
    res = np.full((n, n), np.nan)
    law_ok = np.zeros((n, n), dtype=bool)
    orbits: list[list[Orbit | None]] = [[None] * n for _ in range(n)]
    enumerate_all = b.laws is not None
    col_seed = b.seed
    for i in range(n):
        seed = col_seed
        for j in range(n):
            o = _safe_extend(b, g1[i], g2[j], None if enumerate_all else seed, tol)
            if seed is not None and not enumerate_all and (o is None or not o.closed):
                # continuation jumped branches (near a root collision): re-enumerate
                alt = _safe_extend(b, g1[i], g2[j], None, tol)
                if o is None or (alt is not None and alt.closure_residual < o.closure_residual):
                    o = alt
            orbits[i][j] = o
            if o is None:
                continue
            res[i, j] = o.closure_residual
            law_ok[i, j] = _law_mismatch(b, o) == 0
            seed = o
            if j == 0:
                col_seed = o
    if np.isnan(res).sum() > 0.5 * n * n:
        raise PatchRejected(f"{int(np.isnan(res).sum())} of {n * n} cells are degenerate")
    return ClosureReport(n, tol, res, law_ok, orbits)


# ---------------------------------------------------------------- constructors


def build_type1(a: ProjLine, b: Mirror, patch: Patch | None = None) -> Billiard:
    """``(a, b, a, sigma_a(b))``: every orbit closes by the mirror symmetry."""
    am = LineMirror(a)
    if b.is_line() and line_of(b).coincides(a):
        raise ValueError("b coincides with the line a")
    return Billiard((am, b, am, MirrorImage(b, a)), patch=patch)


def type1_orbit(bl: Billiard, t1: complex, t2: complex) -> tuple[ProjPoint, ...]:
    """Closed-form orbit of a type-1 billiard: C from one reflection, D = sigma_a(B)."""
    from .projective import symmetry_about_line

    a = line_of(bl.mirrors[0])
    A = bl.mirrors[0].point_at(t1)
    B = bl.mirrors[1].point_at(t2)
    out = _outgoing(A, B, _tangent(bl.mirrors[1], t2))
    C = out.intersect(a)
    return (A, B, C, symmetry_about_line(B, a))


def _line_at(O: ProjPoint, theta: complex) -> ProjLine:
    import cmath

    return ProjLine.from_point_direction(O, (cmath.cos(theta), cmath.sin(theta)))


def build_type2(O: ProjPoint, theta_a: complex, theta_b: complex, rho: complex, patch: Patch | None = None) -> Billiard:
    """Lines ``a, b`` through ``O`` and ``d = R(a), c = R(b)``.

    For finite ``O`` the thetas are direction angles and ``R`` is the rotation
    by ``rho`` about ``O``. For ``O`` at infinity all lines share the direction
    of ``O``; the thetas are then signed offsets and ``R`` is the translation by
    ``rho`` along the common normal.
    """
    if O.is_finite():
        a, b = _line_at(O, theta_a), _line_at(O, theta_b)
        c, d = _line_at(O, theta_b + rho), _line_at(O, theta_a + rho)
    else:
        u, v = O.h1, O.h2
        nrm = (u * u + v * v) ** 0.5
        if abs(nrm) < 1e-12:
            raise DegenerateMirrorError("isotropic direction of the parallel pencil")
        nx, ny = -v / nrm, u / nrm

        def off(s):
            return ProjLine(-s, nx, ny)

        a, b, c, d = off(theta_a), off(theta_b), off(theta_b + rho), off(theta_a + rho)
    lines = (a, b, c, d)
    for i, j in itertools.combinations(range(4), 2):
        if lines[i].coincides(lines[j]):
            raise ValueError("type-2 lines must be pairwise distinct")
    return Billiard(tuple(LineMirror(l) for l in lines), patch=patch)


class Topotype(str, Enum):
    ELLIPSES = "ellipses"
    HYPERBOLAS = "hyperbolas"
    ELLIPSE_HYPERBOLA = "ellipse-hyperbola"
    PARABOLAS = "parabolas"


# default real patches (t1 on conic 1, t2 on conic 2) for each topotype
_TYPE3_PATCHES = {
    Topotype.ELLIPSES: Patch((0.2, 0.7), (1.9, 2.4)),
    Topotype.HYPERBOLAS: Patch((0.2, 0.6), (-0.9, -0.5)),
    Topotype.ELLIPSE_HYPERBOLA: Patch((0.2, 0.6), (0.5, 0.9)),
    Topotype.PARABOLAS: Patch((0.5, 1.0), (-1.6, -1.1)),
}


def _classify(f, l1, l2) -> Topotype:
    if isinstance(f, ParabolaFamily):
        return Topotype.PARABOLAS
    kinds = {complex(l).real > f.c**2 for l in (l1, l2)}
    if kinds == {True}:
        return Topotype.ELLIPSES
    if kinds == {False}:
        return Topotype.HYPERBOLAS
    return Topotype.ELLIPSE_HYPERBOLA


def build_type3(
    f: ConfocalFamily | ParabolaFamily,
    lam1: complex,
    lam2: complex,
    topotype: Topotype | str | None = None,
    patch: Patch | None = None,
) -> Billiard:
    """``(C1, C2, C1, C2)`` for two distinct confocal conics.

    For a ``ParabolaFamily`` the lambdas are the focal parameters ``f`` of
    ``x^2 = 4f(y+f)``. The returned billiard carries a default patch for the
    topotype and a seed orbit found by branch enumeration at the patch corner.
    """
    if lam1 == lam2:
        raise ValueError("type 3 needs two distinct conics")
    if isinstance(f, ParabolaFamily):
        c1, c2 = parabola_at(f, lam1), parabola_at(f, lam2)
    else:
        c1, c2 = conic_at(f, lam1), conic_at(f, lam2)
    topo = Topotype(topotype) if topotype is not None else _classify(f, lam1, lam2)
    if topo is not _classify(f, lam1, lam2):
        raise ValueError(f"conics do not match topotype {topo.value}")
    bl = Billiard((c1, c2, c1, c2))
    patch = patch or _TYPE3_PATCHES[topo]
    g1, g2 = patch.grid(2)
    seed = extend_orbit(bl, g1[0], g2[0])
    return bl.with_seed(seed, patch)


def combine(alpha: Billiard, beta: Billiard, s: int, delta: list[Mirror] | tuple = ()) -> Billiard:
    """Mirror adding: ``(a1..as, d1..dt, b1..bm, dt..d1, a(s+1)..al)``."""
    if not 1 <= s <= alpha.k:
        raise ValueError("need 1 <= s <= len(alpha)")
    delta = tuple(delta)
    for d in delta:
        if d.is_line() and is_isotropic(line_of(d)):
            raise DegenerateMirrorError("isotropic added mirror")
    a = alpha.mirrors
    return Billiard(a[:s] + delta + beta.mirrors + delta[::-1] + a[s:])


def combine_erase(alpha: Billiard, beta: Billiard, s: int) -> Billiard:
    """Mirror erasing: needs ``a_j = b_(m-j+1)`` for ``j <= s``; returns ``(a(s+1)..al, b1..b(m-s))``."""
    l, m = alpha.k, beta.k
    if not 1 <= s < min(l, m):
        raise ValueError("need 1 <= s < min(l, m)")
    for j in range(s):
        if alpha.mirrors[j] != beta.mirrors[m - 1 - j]:
            raise ValueError(f"mirror a_{j + 1} differs from b_{m - j}")
    return Billiard(alpha.mirrors[s:] + beta.mirrors[: m - s])


def chain(a: ProjLine, bs: list[Mirror]) -> Billiard:
    """``(a, b_(l-1), ..., b_1, a, b_1*, ..., b_(l-1)*)`` with ``b*`` the image in ``a``."""
    am = LineMirror(a)
    images = [MirrorImage(b, a) for b in bs]
    return Billiard((am, *reversed(bs), am, *images))
