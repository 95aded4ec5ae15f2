"""The acceptance battery: eleven numeric checks, each returning a JSON-ready dict.

Every check draws randomness from a generator seeded by ``(seed, criterion)``
so that subsets and full runs report identical values.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.linalg import subspace_angles

from . import birkhoff as bk
from . import real_billiards as rb
from .conics import (
    CircleMirror,
    ConfocalConic,
    ConfocalFamily,
    Frame,
    LineMirror,
    ParabolaFamily,
    ParabolaMirror,
    conic_at,
)
from .projective import (
    DirectionCoord,
    ProjLine,
    ProjPoint,
    chordal,
    reflect_direction,
    reflection_matrix,
)
from .reflectivity import (
    Billiard,
    Law,
    Patch,
    PatchRejected,
    build_type1,
    build_type2,
    build_type3,
    extend_orbit,
    verify_k_reflectivity,
)
from .triangular import RotationH, circle_state, integrate_spiral, make_state

GROUPS = {
    "projective": [1],
    "reflectivity": [2, 3],
    "triangular": [4],
    "real": [5, 9, 10],
    "birkhoff": [6, 7, 8],
    "determinism": [11],
}


def _rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng([seed, k])


# --- builtin billiards ----------------------------------------------------------


def builtin_billiards() -> dict[str, tuple[Billiard, Patch]]:
    """Named positive controls with their verification patches."""
    xaxis = ProjLine(0.0, 0.0, 1.0)
    F = ConfocalFamily(1.0)
    out = {
        "type1-parabola": (
            build_type1(xaxis, ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25))),
            Patch((-1.0, 1.0), (-0.8, 0.9)),
        ),
        "type1-circle": (build_type1(xaxis, CircleMirror(0.0, 0.0, 1.0)), Patch((-0.5, 0.5), (0.3, 2.8))),
        "type2-rotation": (
            build_type2(ProjPoint.affine(0, 0), 0.0, math.pi / 3, math.pi / 5),
            Patch((0.5, 1.5), (0.6, 1.6)),
        ),
        "type2-complex": (
            build_type2(ProjPoint.affine(0.3, -0.2), 0.2 + 0.1j, 1.1 - 0.05j, 0.7 + 0.2j),
            Patch((0.5, 1.5), (0.6, 1.6)),
        ),
        "type2-translation": (build_type2(ProjPoint(0.0, 1.0, 0.0), 0.0, 1.0, 3.0), Patch((-1, 1), (-0.5, 1.5))),
    }
    for name, f, l1, l2 in (
        ("type3-ellipses", F, 4.0, 2.0),
        ("type3-hyperbolas", F, 0.3, 0.7),
        ("type3-ellipse-hyperbola", F, 4.0, 0.5),
        ("type3-parabolas", ParabolaFamily(), 1.0, 2.0),
    ):
        b = build_type3(f, l1, l2)
        out[name] = (b, b.patch)
    return out


def non_confocal_billiard() -> tuple[Billiard, Patch]:
    c1 = conic_at(ConfocalFamily(1.0), 4.0)
    c2 = conic_at(ConfocalFamily(1.05), 2.01)
    return Billiard((c1, c2, c1, c2)), Patch((0.2, 0.7), (1.9, 2.4))


def random_mirror(rng: np.random.Generator):
    kind = rng.integers(3)
    fr = Frame(rng.uniform(0, math.pi), rng.uniform(-1, 1), rng.uniform(-1, 1))
    if kind == 0:
        th = rng.uniform(0, math.pi)
        x, y = fr.ox, fr.oy
        return LineMirror(ProjLine(-(x * -math.sin(th) + y * math.cos(th)), -math.sin(th), math.cos(th)))
    if kind == 1:
        return CircleMirror(fr.ox, fr.oy, rng.uniform(0.5, 3.0) ** 2)
    c = rng.uniform(0.5, 1.5)
    lam = rng.choice([rng.uniform(1.2, 3.0) * c * c, rng.uniform(0.2, 0.8) * c * c])
    return ConfocalConic(c, float(lam), fr)


def random_triple_billiard(rng: np.random.Generator) -> Billiard:
    while True:
        try:
            return Billiard(tuple(random_mirror(rng) for _ in range(3)))
        except ValueError:
            continue


# --- criteria --------------------------------------------------------------------


def c1_reflection_oracle(seed: int) -> dict:
    rng = _rng(seed, 1)
    worst = 0.0
    n = 10_000
    for _ in range(n):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        m = rng.normal(size=2) + 1j * rng.normal(size=2)
        S = np.array(reflection_matrix(m))
        oracle = DirectionCoord.from_vector(S @ v)
        got = reflect_direction(DirectionCoord.from_vector(v), DirectionCoord.from_vector(m))
        worst = max(worst, chordal(got, oracle))
    return {"cases": n, "max_chordal": worst, "threshold": 1e-12, "passed": worst < 1e-12}


def c2_positive_controls(seed: int, n: int = 24, tol: float = 1e-9) -> dict:
    rows = {}
    ok = True
    for name, (b, patch) in builtin_billiards().items():
        r = verify_k_reflectivity(b, patch, n, tol)
        rows[name] = {"fraction_closed": r.fraction_closed(), "max_residual": r.max_residual, "passed": r.passed}
        ok &= r.passed
    return {"grid": [n, n], "tol": tol, "billiards": rows, "passed": ok}


def c3_negative_controls(seed: int) -> dict:
    b, patch = non_confocal_billiard()
    r = verify_k_reflectivity(b, patch, 24, 1e-9)
    frac_a = r.fraction_closed()
    rng = _rng(seed, 3)
    worst, rejected = 0.0, 0
    patch3 = Patch((0.1, 0.9), (1.1, 1.9))
    for _ in range(100):
        bt = random_triple_billiard(rng)
        try:
            rt = verify_k_reflectivity(bt, patch3, 10, 1e-6)
        except PatchRejected:
            rejected += 1
            continue
        worst = max(worst, rt.fraction_closed(1e-6))
    return {
        "non_confocal_fraction": frac_a,
        "triples": 100,
        "triples_rejected": rejected,
        "worst_triple_fraction": worst,
        "passed": frac_a < 0.05 and worst < 0.01,
    }


def random_spiral_start(rng: np.random.Generator):
    H = RotationH(rng.uniform(0.3, 2.8))
    ang = rng.uniform(0, 2 * math.pi)
    B = rng.uniform(2.0, 4.0) * np.array([math.cos(ang), math.sin(ang)])
    C = rng.uniform(0.5, 2.0) * H(B)
    return make_state(np.zeros(2), B, C, H)


def c4_first_integral(seed: int) -> dict:
    rng = _rng(seed, 4)
    drifts, truncated = [], 0
    for _ in range(20):
        tr = integrate_spiral(random_spiral_start(rng), 1000, 1e-3)
        truncated += tr.truncated is not None
        drifts.append(tr.relative_drift())
    circ = integrate_spiral(circle_state(1.5, rng.uniform(0, math.pi)), 1000, 1e-2)
    cd = circ.relative_drift()
    return {
        "starts": 20,
        "truncated": truncated,
        "max_drift": max(drifts),
        "circle_drift": cd,
        "passed": truncated == 0 and max(drifts) < 1e-8 and cd < 1e-12 and circ.truncated is None,
    }


def c5_skew_parity(seed: int) -> dict:
    rng = _rng(seed, 5)
    agree = 0
    for _ in range(100):
        chain, l0 = rb.random_reflector_chain(rng, int(rng.integers(1, 6)))
        nskew = sum(r.law is Law.SKEW for r in chain)
        agree += rb.skew_parity_sign(chain, l0) == (-1) ** nskew
    return {"configurations": 100, "agree": agree, "passed": agree == 100}


def _random_quad(rng: np.random.Generator) -> np.ndarray:
    while True:
        pts = rng.uniform(-1, 1, size=(4, 2))
        ok = True
        for j in range(4):
            a, b, c = pts[j - 1], pts[j], pts[(j + 1) % 4]
            u, v = a - b, c - b
            if min(np.linalg.norm(u), np.linalg.norm(v)) < 0.05 or abs(u[0] * v[1] - u[1] * v[0]) < 0.01:
                ok = False
        if ok:
            return pts


def c6_concordance(seed: int) -> dict:
    rng = _rng(seed, 6)
    match = 0
    for _ in range(1000):
        alpha = [int(a) for a in rng.choice([1, -1], 4)]
        g = bk.frame_real_kgon(_random_quad(rng), alpha)
        present = bk.concordant_lengths(g) is not None
        match += present == (math.prod(alpha) == 1)
    sign_ok, min_ratio = 0, math.inf
    for _ in range(100):
        g = bk.frame_real_kgon(_random_quad(rng), [-1, -1, 1, 1])
        l = [complex(x).real for x in bk.concordant_lengths(g)]
        sign_ok += (l[0] > 0) != (l[1] > 0) and len({x > 0 for x in l[1:]}) == 1
        lam = abs(bk.lambda_residual(g))
        min_ratio = min(min_ratio, lam / max(abs(l[0] * l[2]), abs(l[1] * l[3])))
    return {
        "quads": 1000,
        "parity_matches": match,
        "alpha_minus_minus_sign_ok": sign_ok,
        "min_lambda_ratio": min_ratio,
        "passed": match == 1000 and sign_ok == 100 and min_ratio >= 1 - 1e-12,
    }


def random_complex_gon(rng: np.random.Generator, k: int, plus: bool = True) -> bk.FramedKGon:
    while True:
        pts = rng.normal(size=(k, 2)) + 0.5j * rng.normal(size=(k, 2))
        try:
            g = bk.frame_from_points(pts, rng.choice([1, -1], k))
        except ValueError:
            continue
        if not plus or bk.concordant_lengths(g) is not None:
            return g


def _type3_family_cases():
    F = ConfocalFamily(1.0)
    for name, f, l1, l2 in (
        ("ellipses", F, 4.0, 2.0),
        ("hyperbolas", F, 0.3, 0.7),
        ("ellipse-hyperbola", F, 4.0, 0.5),
        ("parabolas", ParabolaFamily(), 1.0, 2.0),
    ):
        yield name, build_type3(f, l1, l2)


def c7_integral_plane(seed: int) -> dict:
    rng = _rng(seed, 7)
    worst_prod, worst_form = 0.0, 0.0
    done = 0
    while done < 100:
        g = random_complex_gon(rng, 4)
        if bk.on_lambda(g):
            continue
        ip = bk.integral_plane(g)
        worst_prod = max(worst_prod, ip.product_residual)
        worst_form = max(worst_form, ip.form_residual)
        done += 1
    angles = {}
    for name, b in _type3_family_cases():
        g1, g2 = b.patch.grid(5)
        X, d1, d2 = bk.orbit_family_tangents(b, g1[2], g2[2], b.seed)
        g = bk.state_to_gon(X)
        ip = bk.integral_plane(g, tangent=d2)
        angles[name] = float(np.max(subspace_angles(ip.vectors(g), np.stack([d1, d2], axis=1))))
    return {
        "states": 100,
        "max_product_residual": worst_prod,
        "max_form_residual": worst_form,
        "principal_angles": angles,
        "passed": worst_prod < 1e-8 and worst_form < 1e-8 and max(angles.values()) < 1e-6,
    }


def c8_birkhoff_tangency(seed: int) -> dict:
    rng = _rng(seed, 8)
    tang = {}
    for name, (b, patch) in builtin_billiards().items():
        g1, g2 = patch.grid(5)
        worst = 0.0
        for i, j in ((1, 1), (1, 3), (3, 1)):
            o = extend_orbit(b, g1[i], g2[j])
            X, d1, d2 = bk.orbit_family_tangents(b, g1[i], g2[j], o)
            g = bk.state_to_gon(X)
            worst = max(worst, bk.distribution_residual(g, d1), bk.distribution_residual(g, d2))
        tang[name] = worst
    dims = {}
    for k in (3, 4, 5):
        good = sum(bk.distribution_dimension(random_complex_gon(rng, k, plus=False)).dimension == k for _ in range(300))
        dims[str(k)] = good / 300
    return {
        "tangency_residuals": tang,
        "dimension_fraction": dims,
        "passed": max(tang.values()) < 1e-7 and min(dims.values()) >= 0.99,
    }


def c9_commuting(seed: int) -> dict:
    rng = _rng(seed, 9)
    inner = rb.ellipse_body(1.0, 4.0)
    outer = rb.ellipse_body(1.0, 9.0)
    shifted = rb.ellipse_body(1.025, 9.0, Frame(0.0, 0.025, 0.0))
    lines = rb.sample_lines(rng, 1000, 3.2)
    conf = rb.commute_residual(inner, outer, lines)
    disp = rb.commute_residual(inner, shifted, lines)
    return {
        "lines": 1000,
        "confocal_residual": conf,
        "displaced_residual": disp,
        "passed": conf < 1e-9 and disp > 1e-3,
    }


SKEW_CONFIGS = (
    ([(0, 0), (1, 1), (3, 1.2), (4, 0)], ["skew", "skew", "usual", "usual"], [2, -3, 1.5, 2.5]),
    ([(0, 0), (1.5, -1), (3, -0.8), (4.5, 0)], ["usual", "skew", "skew", "usual"], [-1.5, 2, 4, -2]),
    ([(0, 0), (1, 1.5), (2.5, 1.0), (3.5, 0)], ["usual", "usual", "skew", "skew"], [3, 1, -2, 1.2]),
    ([(0, 0), (0.8, -1.2), (2.6, -1.5), (3.2, 0)], ["skew", "usual", "usual", "skew"], [-2, 2.5, 1.8, -3]),
)


def c10_invisibility(seed: int) -> dict:
    body = rb.parabolic_assembly()
    tr = rb.trace_ray(body, rb.OrientedLine(0.0, 1.0))
    scan = rb.invisibility_scan(body, ((-0.2, 0.2), (0.4, 1.6)), 41, 1e-6)
    skew = []
    for pts, laws, radii in SKEW_CONFIGS:
        b = rb.designed_skew_configuration(pts, laws, radii)
        s = rb.invisibility_scan(b, ((-0.05, 0.05), (-0.05, 0.05)), 21, 1e-6)
        skew.append({"laws": laws, "fraction_invisible": s.fraction_invisible})
    ok = (
        tr.invisible
        and tr.reflection_count == 4
        and scan.max_family_dimension_estimate <= 1
        and all(s["fraction_invisible"] < 0.01 for s in skew)
    )
    return {
        "central_ray": {"invisible": tr.invisible, "reflections": tr.reflection_count, "residual": tr.residual},
        "assembly_scan": scan.to_dict(),
        "two_neighbor_skew": skew,
        "passed": ok,
    }


CRITERIA: dict[int, tuple[str, Callable[[int], dict]]] = {
    1: ("reflection oracle equivalence", c1_reflection_oracle),
    2: ("type 1/2/3 positive controls", c2_positive_controls),
    3: ("negative controls", c3_negative_controls),
    4: ("first integral of the triangular field", c4_first_integral),
    5: ("skew parity", c5_skew_parity),
    6: ("concordance component test", c6_concordance),
    7: ("integral plane", c7_integral_plane),
    8: ("Birkhoff tangency and dimension", c8_birkhoff_tangency),
    9: ("commuting billiards", c9_commuting),
    10: ("invisibility", c10_invisibility),
}


def select(only: list[str] | None) -> list[int]:
    if not only:
        return list(range(1, 12))
    ids: list[int] = []
    for tok in only:
        if tok in GROUPS:
            ids += GROUPS[tok]
        elif tok.isdigit() and 1 <= int(tok) <= 11:
            ids.append(int(tok))
        else:
            raise ValueError(f"unknown criterion or group {tok!r}")
    return sorted(set(ids))


def run_criterion(i: int, seed: int) -> dict:
    name, fn = CRITERIA[i]
    try:
        body = fn(seed)
    except Exception as exc:  # failures are data
        body = {"error": f"{type(exc).__name__}: {exc}", "passed": False}
    return {"id": i, "name": name, **body}


def run_suite(seed: int = 0, only: list[str] | None = None) -> dict:
    """Run the selected criteria; criterion 11 re-runs the others and compares bytes."""
    from .serialization import dumps

    ids = select(only)
    base = [i for i in ids if i != 11]
    results = [run_criterion(i, seed) for i in base]
    if 11 in ids:
        others = base or list(range(1, 11))
        first = results if base else [run_criterion(i, seed) for i in others]
        again = [run_criterion(i, seed) for i in others]
        same = dumps(first) == dumps(again)
        results.append({
            "id": 11,
            "name": "determinism",
            "rerun_criteria": others,
            "byte_identical": same,
            "passed": same,
        })
    return {"seed": seed, "criteria": results, "passed": all(r["passed"] for r in results)}
