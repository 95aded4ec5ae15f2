import math

import pytest

from reflective_billiards.conics import (
    CircleMirror,
    ConfocalFamily,
    Frame,
    LineMirror,
    ParabolaFamily,
    ParabolaMirror,
    conic_at,
)
from reflective_billiards.projective import DegenerateMirrorError, ProjLine, ProjPoint
from reflective_billiards.reflectivity import (
    Billiard,
    Patch,
    PatchRejected,
    Topotype,
    build_type1,
    build_type2,
    build_type3,
    chain,
    combine,
    combine_erase,
    extend_orbit,
    type1_orbit,
    verify_k_reflectivity,
)
from reflective_billiards.suite import non_confocal_billiard

X_AXIS = ProjLine(0.0, 0.0, 1.0)
PARAB = ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25))  # y = 1 + x^2
F = ConfocalFamily(1.0)


def _close(p, q, tol):
    return max(abs(u - v) for u, v in zip(p.xy(), q.xy())) < tol


def test_type1_orbit_matches_mirror_image_oracle():
    b = build_type1(X_AXIS, PARAB)
    for t1, t2 in [(-0.5, 0.3), (0.2, -0.6), (0.7, 0.1)]:
        o = extend_orbit(b, t1, t2)
        assert o.closed and o.closure_residual < 1e-10
        for p, q in zip(o.points, type1_orbit(b, t1, t2)):
            assert _close(p, q, 1e-9)


def test_type1_examples():
    assert verify_k_reflectivity(build_type1(X_AXIS, PARAB), Patch((-1, 1), (-0.8, 0.9)), 8, 1e-10).passed
    semicircle = CircleMirror(0.0, 0.0, 1.0)
    assert verify_k_reflectivity(build_type1(X_AXIS, semicircle), Patch((-0.5, 0.5), (0.3, 2.8)), 8, 1e-10).passed
    with pytest.raises(ValueError):
        build_type1(X_AXIS, LineMirror(X_AXIS))


def test_three_lines_not_reflective():
    lines = (ProjLine(0.0, 0.0, 1.0), ProjLine(-1.0, 1.0, 0.3), ProjLine(0.5, 0.4, 1.0))
    b = Billiard(tuple(LineMirror(l) for l in lines))
    r = verify_k_reflectivity(b, Patch((0.1, 0.9), (0.2, 1.1)), 8, 1e-9)
    assert r.fraction_closed() == 0.0


def test_type2_examples():
    O = ProjPoint.affine(0, 0)
    b = build_type2(O, 0.0, math.pi / 3, math.pi / 5)
    assert verify_k_reflectivity(b, Patch((0.5, 1.5), (0.6, 1.6)), 8, 1e-9).passed
    with pytest.raises(ValueError):
        build_type2(O, 0.0, math.pi / 3, 0.0)
    tr = build_type2(ProjPoint(0.0, 1.0, 0.0), 0.0, 1.0, 3.0)
    assert verify_k_reflectivity(tr, Patch((-1, 1), (-0.5, 1.5)), 8, 1e-9).passed
    with pytest.raises(DegenerateMirrorError):
        build_type2(ProjPoint(0.0, 1.0, 1j), 0.0, 1.0, 3.0)


@pytest.mark.parametrize(
    "fam,l1,l2,topo",
    [
        (F, 4.0, 2.0, Topotype.ELLIPSES),
        (F, 0.3, 0.7, Topotype.HYPERBOLAS),
        (F, 4.0, 0.5, Topotype.ELLIPSE_HYPERBOLA),
        (ParabolaFamily(), 1.0, 2.0, Topotype.PARABOLAS),
    ],
)
def test_type3_topotypes(fam, l1, l2, topo):
    b = build_type3(fam, l1, l2, topo)
    r = verify_k_reflectivity(b, b.patch, 10, 1e-9)
    assert r.passed and r.max_residual < 1e-9


def test_type3_topotype_mismatch_rejected():
    with pytest.raises(ValueError):
        build_type3(F, 4.0, 2.0, Topotype.HYPERBOLAS)
    with pytest.raises(ValueError):
        build_type3(F, 2.0, 2.0)


def test_perturbed_conic_fails():
    b, patch = non_confocal_billiard()
    assert verify_k_reflectivity(b, patch, 16, 1e-9).fraction_closed() < 0.05
    c1, c2 = conic_at(F, 4.0), conic_at(F, 2.01)
    # lambda shift alone keeps the pair confocal, so it still closes
    assert verify_k_reflectivity(Billiard((c1, c2, c1, c2)), patch, 6, 1e-9).passed


def test_degenerate_patch_rejected():
    b = build_type1(X_AXIS, CircleMirror(0.0, 0.0, 1.0))
    with pytest.raises(PatchRejected):
        # t1 = 0 puts A at the centre, so every cell degenerates on the x-axis
        verify_k_reflectivity(b, Patch((0.0, 0.0), (0.0, 0.0)), 4, 1e-9)


def test_chain_is_six_reflective():
    b1 = CircleMirror(0.0, 2.0, 1.0)
    b2 = ParabolaMirror(0.25, Frame(0.0, 0.0, 4.0))
    ch = chain(X_AXIS, [b1, b2])
    assert ch.k == 6
    assert verify_k_reflectivity(ch, Patch((-1, 1), (-0.8, 0.8)), 6, 1e-9).passed


def test_combine_with_empty_delta_is_plain_combination():
    a = build_type1(X_AXIS, PARAB)
    b = build_type2(ProjPoint.affine(0, 0), 0.3, 1.2, 0.5)
    c = combine(a, b, 2)
    assert c.mirrors == a.mirrors[:2] + b.mirrors + a.mirrors[2:]
    d = LineMirror(ProjLine(1.0, 0.2, 1.0))
    c2 = combine(a, b, 2, [d])
    assert c2.mirrors == a.mirrors[:2] + (d,) + b.mirrors + (d,) + a.mirrors[2:]
    with pytest.raises(ValueError):
        combine(a, b, 0)


def test_combine_erase():
    b1 = CircleMirror(0.0, 2.0, 1.0)
    alpha = build_type1(X_AXIS, b1)  # (a, b1, a, b1*)
    beta = Billiard(alpha.mirrors[1:] + alpha.mirrors[:1])  # (b1, a, b1*, a)
    out = combine_erase(alpha, beta, 1)
    assert out.mirrors == alpha.mirrors[1:] + beta.mirrors[:3]
    with pytest.raises(ValueError):
        combine_erase(alpha, beta, 4)
    with pytest.raises(ValueError):
        combine_erase(alpha, alpha, 1)
