"""Real pseudo-billiards: usual and skew laws, billiard maps on oriented lines,
commuting bodies, orientation parity and invisibility.

An oriented line is ``(phi, p)``: direction ``d = (cos phi, sin phi)``, left
normal ``n = (-sin phi, cos phi)`` and points ``x`` with ``<x, n> = p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conics import ConfocalConic, Frame, Mirror, ParabolaMirror, tangent_line
from .projective import ProjLine, ProjPoint, reflection_law_verdict
from .reflectivity import Law

TWO_PI = 2 * math.pi
PARAM_TOL = 1e-9


class NotAReflection(ValueError):
    pass


class CornerHit(ValueError):
    pass


class TangentHit(ValueError):
    pass


@dataclass(frozen=True)
class OrientedLine:
    phi: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "p", float(self.p))

    @property
    def d(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)])

    @property
    def n(self) -> np.ndarray:
        return np.array([-math.sin(self.phi), math.cos(self.phi)])

    def base(self) -> np.ndarray:
        return self.p * self.n

    @classmethod
    def through(cls, x, d) -> "OrientedLine":
        x, d = np.asarray(x, float), np.asarray(d, float)
        phi = math.atan2(d[1], d[0])
        n = np.array([-math.sin(phi), math.cos(phi)])
        return cls(phi, float(x @ n))

    def reversed(self) -> "OrientedLine":
        return OrientedLine(self.phi + math.pi, -self.p)

    def embed(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi), self.p])


def line_distance(l1: OrientedLine, l2: OrientedLine) -> float:
    """Euclidean distance of ``(cos phi, sin phi, p)`` embeddings."""
    return float(np.linalg.norm(l1.embed() - l2.embed()))


# --- laws -------------------------------------------------------------------


def _real_line(L) -> tuple[np.ndarray, float]:
    """Unit normal and offset of a real ProjLine ``c0 + c1 x + c2 y = 0``."""
    c = np.array([complex(v) for v in L.coords])
    if np.max(np.abs(c.imag)) > 1e-12 * np.max(np.abs(c)):
        c = c / c[np.argmax(np.abs(c))]
    if np.max(np.abs(c.imag)) > 1e-9:
        raise ValueError("line is not real")
    c = c.real
    nn = math.hypot(c[1], c[2])
    return np.array([c[1], c[2]]) / nn, c[0] / nn


def law_type(A, B, C, L: ProjLine, tol: float = 1e-9) -> Law:
    """Usual iff ``A`` and ``C`` lie on the same side of ``L``."""
    pa, pb, pc = (ProjPoint.affine(*map(float, v)) for v in (A, B, C))
    if not L.contains(pb, 1e-9):
        raise NotAReflection("L does not pass through B")
    v = reflection_law_verdict(pa, pb, pc, L, tol)
    if not v.ok:
        raise NotAReflection(f"BA and BC are not symmetric about L (residual {v.residual:.3g})")
    nrm, c0 = _real_line(L)
    sa = float(np.asarray(A, float) @ nrm + c0)
    sc = float(np.asarray(C, float) @ nrm + c0)
    if abs(sa) < 1e-12 or abs(sc) < 1e-12:
        raise ValueError("A or C lies on L: law undefined")
    return Law.USUAL if (sa > 0) == (sc > 0) else Law.SKEW


# --- arcs and bodies ----------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Real trace of ``mirror`` for ``t`` in ``[t0, t1]`` with a law flag."""

    mirror: Mirror
    t0: float
    t1: float
    law: Law = Law.USUAL

    def __post_init__(self):
        if not self.t0 < self.t1:
            raise ValueError("arc needs t0 < t1")

    @property
    def closed(self) -> bool:
        per = getattr(self.mirror, "period", None)
        return per is not None and abs(self.t1 - self.t0 - abs(per)) < 1e-12

    def point(self, t) -> np.ndarray:
        return np.array([complex(v).real for v in self.mirror.point(t)])

    def samples(self, n: int) -> np.ndarray:
        return np.array([self.point(t) for t in np.linspace(self.t0, self.t1, n)])


@dataclass(frozen=True)
class Hit:
    s: float  # arclength along the oriented line from its base point
    x: np.ndarray = field(compare=False)
    arc: int
    t: float


def _real_roots(a, b, c, scale):
    """Real roots of ``a s^2 + b s + c``; raises TangentHit on a double root."""
    if abs(a) < 1e-14 * scale:
        return [] if abs(b) < 1e-300 else [-c / b]
    disc = b * b - 4 * a * c
    if abs(disc) <= 1e-12 * (b * b + abs(4 * a * c)):
        raise TangentHit("line is tangent to a mirror")
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    w = -(b + math.copysign(sq, b)) / 2
    return [w / a, c / w] if w != 0 else [0.0, -b / a]


def arc_hits(arc: Arc, x0: np.ndarray, d: np.ndarray, idx: int, corner_check: bool) -> list[Hit]:
    m = arc.mirror
    if m.is_line():
        nrm, c0 = _real_line(tangent_line(m, 0.0))
        den = d @ nrm
        if abs(den) < 1e-14:
            return []
        roots = [-(x0 @ nrm + c0) / den]
    else:
        Q = np.real_if_close(m.conic_matrix(), tol=1e6)
        if np.iscomplexobj(Q):
            raise ValueError("mirror is not real")
        X0, D = np.array([1.0, *x0]), np.array([0.0, *d])
        a, b, c = D @ Q @ D, 2 * (X0 @ Q @ D), X0 @ Q @ X0
        roots = _real_roots(a, b, c, np.abs(Q).max())
    hits = []
    mid = 0.5 * (arc.t0 + arc.t1)
    for s in roots:
        x = x0 + s * d
        t = complex(m.parameter_of(x[0], x[1], near=mid)).real
        if arc.closed:
            hits.append(Hit(s, x, idx, t))
            continue
        if arc.t0 - PARAM_TOL <= t <= arc.t1 + PARAM_TOL:
            if corner_check and min(abs(t - arc.t0), abs(t - arc.t1)) < PARAM_TOL:
                raise CornerHit("line passes through an arc endpoint")
            hits.append(Hit(s, x, idx, t))
    return hits


@dataclass(frozen=True)
class ArcBody:
    """A finite union of arcs (not necessarily closed)."""

    arcs: tuple[Arc, ...]

    def hits(self, x0, d, corner_check: bool = True) -> list[Hit]:
        out = []
        for i, a in enumerate(self.arcs):
            out.extend(arc_hits(a, np.asarray(x0, float), np.asarray(d, float), i, corner_check))
        return sorted(out, key=lambda h: h.s)

    def samples(self, n: int = 200) -> np.ndarray:
        if not self.arcs:
            return np.zeros((0, 2))
        return np.concatenate([a.samples(n) for a in self.arcs])

    def radius(self) -> float:
        s = self.samples(64)
        return float(np.max(np.linalg.norm(s, axis=1))) if len(s) else 0.0


@dataclass(frozen=True)
class ConvexBody(ArcBody):
    """Closed convex chain of arcs, counterclockwise."""

    def __post_init__(self):
        arcs = self.arcs
        if not arcs:
            raise ValueError("a body needs at least one arc")
        for i, a in enumerate(arcs):
            nxt = arcs[(i + 1) % len(arcs)]
            if len(arcs) == 1 and not a.closed:
                raise ValueError("a single arc must be a full period")
            if len(arcs) > 1 and np.linalg.norm(a.point(a.t1) - nxt.point(nxt.t0)) > 1e-9:
                raise ValueError(f"arcs {i} and {(i + 1) % len(arcs)} do not join")
        poly = np.concatenate([a.samples(200)[:-1] for a in arcs])
        e = np.roll(poly, -1, axis=0) - poly
        cr = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if cr.sum() <= 0:
            raise ValueError("boundary must be counterclockwise")
        if cr.min() < -1e-9 * np.abs(cr).max():
            raise ValueError("boundary is not convex")
        object.__setattr__(self, "_poly", poly)

    def contains(self, x) -> bool:
        poly = self._poly
        e = np.roll(poly, -1, axis=0) - poly
        w = np.asarray(x, float) - poly
        return bool(np.all(e[:, 0] * w[:, 1] - e[:, 1] * w[:, 0] > 0))


def disk(cx: float = 0.0, cy: float = 0.0, r: float = 1.0) -> ConvexBody:
    from .conics import CircleMirror

    return ConvexBody((Arc(CircleMirror(cx, cy, r * r), 0.0, TWO_PI),))


def ellipse_body(c: float, lam: float, frame: Frame = Frame()) -> ConvexBody:
    """Filled ellipse ``x^2/lam + y^2/(lam - c^2) <= 1`` of a confocal family."""
    if not lam > c * c:
        raise ValueError("need lam > c^2 for an ellipse")
    return ConvexBody((Arc(ConfocalConic(c, lam, frame), 0.0, TWO_PI),))


# --- reflection maps ----------------------------------------------------------


def _normal(arc: Arc, t: float) -> np.ndarray:
    vx, vy = arc.mirror.deriv(t)
    v = np.array([complex(vx).real, complex(vy).real])
    return np.array([-v[1], v[0]]) / np.linalg.norm(v)


def reflect_dir(d: np.ndarray, nu: np.ndarray, law: Law = Law.USUAL) -> np.ndarray:
    r = d - 2 * (d @ nu) * nu
    return r if law is Law.USUAL else -r


def billiard_map(body: ArcBody, l: OrientedLine) -> OrientedLine:
    """Reflect at the last intersection with the boundary; identity on missing lines."""
    hits = body.hits(l.base(), l.d)
    if not hits:
        return l
    h = hits[-1]
    d2 = reflect_dir(l.d, _normal(body.arcs[h.arc], h.t))
    return OrientedLine.through(h.x, d2)


def _nested(inner: ConvexBody, outer: ConvexBody) -> bool:
    return all(outer.contains(x) for x in inner.samples(100))


def commute_residual(b1: ConvexBody, b2: ConvexBody, samples) -> float:
    """``sup |s2 s1 (l) - s1 s2 (l)|`` over samples, skipping corner and tangent hits."""
    if not _nested(b1, b2):
        raise ValueError("first body must lie strictly inside the second")
    worst = 0.0
    for l in samples:
        try:
            a = billiard_map(b2, billiard_map(b1, l))
            b = billiard_map(b1, billiard_map(b2, l))
        except (CornerHit, TangentHit):
            continue
        worst = max(worst, line_distance(a, b))
    return worst


def sample_lines(rng: np.random.Generator, n: int, p_max: float) -> list[OrientedLine]:
    phis = rng.uniform(0, TWO_PI, n)
    ps = rng.uniform(-p_max, p_max, n)
    return [OrientedLine(f, p) for f, p in zip(phis, ps)]


# --- orientation parity ------------------------------------------------------


@dataclass(frozen=True)
class Reflector:
    """A mirror germ near parameter ``t`` with a prescribed law."""

    mirror: Mirror
    t: float
    law: Law = Law.USUAL


def compose_reflections(reflectors, l: OrientedLine) -> OrientedLine:
    """Apply the germs in order; each picks the intersection nearest its base parameter."""
    for r in reflectors:
        arc = Arc(r.mirror, r.t - 1.0, r.t + 1.0, r.law)
        hits = arc_hits(arc, l.base(), l.d, 0, corner_check=False)
        if not hits:
            raise TangentHit("line misses a reflector germ")
        h = min(hits, key=lambda hh: abs(hh.t - r.t))
        nu = _normal(arc, h.t)
        if abs(l.d @ nu) < 1e-8:
            raise TangentHit("tangential hit")
        l = OrientedLine.through(h.x, reflect_dir(l.d, nu, r.law))
    return l


def _wrap(a: float) -> float:
    return (a + math.pi) % TWO_PI - math.pi


def _jacobian(reflectors, l: OrientedLine, h: float) -> np.ndarray:
    Jm = np.zeros((2, 2))
    for k, e in enumerate(((h, 0.0), (0.0, h))):
        lp = compose_reflections(reflectors, OrientedLine(l.phi + e[0], l.p + e[1]))
        lm = compose_reflections(reflectors, OrientedLine(l.phi - e[0], l.p - e[1]))
        Jm[0, k] = _wrap(lp.phi - lm.phi) / (2 * h)
        Jm[1, k] = (lp.p - lm.p) / (2 * h)
    return Jm


def skew_parity_sign(reflectors, l: OrientedLine, h: float = 1e-6) -> int:
    """Sign of the Jacobian determinant of the composed map on ``(phi, p)``."""
    D = np.linalg.det(_jacobian(reflectors, l, h))
    if abs(D) < 1e-4:
        # Richardson extrapolation of the determinant
        D = (4 * np.linalg.det(_jacobian(reflectors, l, h / 2)) - D) / 3
    if D == 0:
        raise ValueError("degenerate Jacobian")
    return 1 if D > 0 else -1


# --- ray tracing and invisibility -----------------------------------------------


@dataclass
class RayTrace:
    segments: list  # (point, direction) pairs, the first point far upstream
    reflection_count: int
    exit_line: OrientedLine
    invisible: bool
    truncated: bool = False
    residual: float = math.inf


def trace_ray(
    body: ArcBody, entry: OrientedLine, max_reflections: int = 16, tol: float = 1e-9, eps: float = 1e-9
) -> RayTrace:
    """Propagate forward; skew arcs send the ray through with the reflected direction reversed."""
    R = 10.0 * (body.radius() + abs(entry.p) + 1.0)
    x, d = entry.base() - R * entry.d, entry.d
    segs = [(x.copy(), d.copy())]
    count = 0
    while True:
        hits = [h for h in body.hits(x, d) if h.s > eps]
        if not hits:
            break
        if count == max_reflections:
            out = OrientedLine.through(x, d)
            return RayTrace(segs, count, out, False, True, line_distance(out, entry))
        h = hits[0]
        arc = body.arcs[h.arc]
        nu = _normal(arc, h.t)
        if abs(d @ nu) < 1e-12:
            raise TangentHit("ray grazes a mirror")
        x, d = h.x, reflect_dir(d, nu, arc.law)
        segs.append((x.copy(), d.copy()))
        count += 1
    out = OrientedLine.through(x, d)
    res = line_distance(out, entry)
    return RayTrace(segs, count, out, res < tol, False, res)


@dataclass
class ScanReport:
    grid: tuple[int, int]
    tol: float
    fraction_invisible: float
    hit_fraction: float
    max_family_dimension_estimate: float
    invisible_cells: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "tol": self.tol,
            "fraction_invisible": self.fraction_invisible,
            "hit_fraction": self.hit_fraction,
            "max_family_dimension_estimate": self.max_family_dimension_estimate,
        }


def box_dimension(cells, n: int) -> float:
    """Box-counting slope for a set of integer grid cells in an ``n x n`` grid."""
    cells = np.asarray(cells, dtype=int).reshape(-1, 2)
    if len(cells) <= 1:
        return 0.0
    sizes, counts = [], []
    b = 1
    while b <= n // 2:
        counts.append(len({(i // b, j // b) for i, j in cells}))
        sizes.append(b)
        b *= 2
    if len(sizes) < 2:
        return 0.0
    slope = np.polyfit(np.log(1.0 / np.array(sizes)), np.log(counts), 1)[0]
    return float(max(slope, 0.0))


def invisibility_scan(
    body: ArcBody,
    window: tuple[tuple[float, float], tuple[float, float]],
    n: int = 41,
    tol: float = 1e-6,
    max_reflections: int = 16,
) -> ScanReport:
    """Grid scan of oriented lines ``(phi, p)``; only rays that touch the body can be invisible."""
    (f0, f1), (p0, p1) = window
    phis, ps = np.linspace(f0, f1, n), np.linspace(p0, p1, n)
    inv, hit = [], 0
    for i, f in enumerate(phis):
        for j, p in enumerate(ps):
            try:
                tr = trace_ray(body, OrientedLine(f, p), max_reflections, tol)
            except (CornerHit, TangentHit):
                continue
            if tr.reflection_count == 0:
                continue
            hit += 1
            if tr.invisible:
                inv.append((i, j))
    return ScanReport((n, n), tol, len(inv) / (n * n), hit / (n * n), box_dimension(inv, n), inv)


# --- constructed configurations -------------------------------------------------


def parabolic_assembly(f: float = 2.0, g: float = 1.0, gap: float = 10.0) -> ArcBody:
    """Two confocal parabola pairs that return every ray ``y = h``, ``h in [0.5, 1.5]``.

    Pair one shares the focus at the origin: P1 opens toward -x (focal
    parameter ``f``), P2 toward +x (``g``). A ray along +x at height ``h`` hits
    P1, passes the focus, leaves P2 along +x at height ``-g h / f``. Pair two,
    shifted by ``gap``, undoes the inversion.
    """
    left = Frame(math.pi / 2, 0.0, 0.0)  # local (t, .) -> opens toward -x, height y = t
    right = Frame(-math.pi / 2, 0.0, 0.0)  # opens toward +x, height y = -t
    lo, hi = 0.5, 1.5
    q = g / f
    P1 = Arc(ParabolaMirror(f, left), lo, hi)
    P2 = Arc(ParabolaMirror(g, right), q * lo, q * hi)
    P3 = Arc(ParabolaMirror(g, Frame(math.pi / 2, gap, 0.0)), -q * hi, -q * lo)
    P4 = Arc(ParabolaMirror(f, Frame(-math.pi / 2, gap, 0.0)), -hi, -lo)
    return ArcBody((P1, P2, P3, P4))


def _circle_germ(x, tangent, curvature_radius, side: int):
    from .conics import CircleMirror

    tdir = np.asarray(tangent, float) / np.linalg.norm(tangent)
    nrm = np.array([-tdir[1], tdir[0]]) * side
    c = np.asarray(x, float) + curvature_radius * nrm
    m = CircleMirror(float(c[0]), float(c[1]), curvature_radius**2)
    t = math.atan2(x[1] - c[1], x[0] - c[0])
    return m, t


def designed_skew_configuration(points, laws, radii, half_width: float = 0.15) -> ArcBody:
    """Four circle arcs that return the ray ``y = 0`` (+x) through the given vertices.

    ``points`` are the reflection vertices ``B1..B4`` with ``B1, B4`` on the x-axis;
    the mirror at each vertex is the line forced by its law, bent into a circle
    of the given radius.
    """
    pts = [np.asarray(p, float) for p in points]
    dirs = [np.array([1.0, 0.0])]
    for a, b in zip(pts, pts[1:]):
        dirs.append((b - a) / np.linalg.norm(b - a))
    dirs.append(np.array([1.0, 0.0]))
    arcs = []
    for j, (x, law, r) in enumerate(zip(pts, laws, radii)):
        law = Law(law)
        din, dout = dirs[j], dirs[j + 1]
        nu = din - dout if law is Law.USUAL else din + dout
        tangent = np.array([-nu[1], nu[0]])
        m, t = _circle_germ(x, tangent, abs(r), 1 if r > 0 else -1)
        arcs.append(Arc(m, t - half_width, t + half_width, law))
    return ArcBody(tuple(arcs))


def random_reflector_chain(rng: np.random.Generator, m: int, skew_prob: float = 0.5):
    """Circle germs hit transversally in sequence by a random start line."""
    l0 = OrientedLine(rng.uniform(0, TWO_PI), rng.uniform(-1, 1))
    l, chain = l0, []
    for _ in range(m):
        x = l.base() + rng.uniform(0.5, 2.0) * l.d
        ang = l.phi + rng.uniform(0.4, math.pi - 0.4)
        r = rng.uniform(0.5, 3.0) * rng.choice([-1, 1])
        mirror, t = _circle_germ(x, (math.cos(ang), math.sin(ang)), abs(r), 1 if r > 0 else -1)
        law = Law.SKEW if rng.random() < skew_prob else Law.USUAL
        chain.append(Reflector(mirror, t, law))
        l = compose_reflections(chain[-1:], l)
    return chain, l0
