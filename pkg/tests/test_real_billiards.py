import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflective_billiards import real_billiards as rb
from reflective_billiards.conics import CircleMirror, Frame, LineMirror, ParabolaMirror, tangent_line
from reflective_billiards.projective import ProjLine
from reflective_billiards.reflectivity import Law, build_type1, extend_orbit
from reflective_billiards.suite import SKEW_CONFIGS

X_AXIS = ProjLine(0.0, 0.0, 1.0)
Y_AXIS = ProjLine(0.0, 1.0, 0.0)


def test_law_type_examples():
    A, B, C = (-1, 1), (0, 0), (1, 1)
    assert rb.law_type(A, B, C, X_AXIS) is Law.USUAL
    assert rb.law_type(A, B, C, Y_AXIS) is Law.SKEW
    with pytest.raises(rb.NotAReflection):
        rb.law_type(A, B, (2, 1), X_AXIS)


def test_type1_real_orbit_is_skew_on_the_line():
    b = build_type1(X_AXIS, ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25)))
    o = extend_orbit(b, 0.2, 0.3)
    pts = [tuple(complex(c).real for c in p.xy()) for p in o.points]
    laws = []
    for j in range(4):
        T = tangent_line(b.mirrors[j], o.params[j])
        laws.append(rb.law_type(pts[j - 1], pts[j], pts[(j + 1) % 4], T))
    assert laws[0] is Law.SKEW and laws[2] is Law.SKEW
    assert laws[1] is Law.USUAL and laws[3] is Law.USUAL


def test_billiard_map_examples():
    d = rb.disk()
    far = rb.OrientedLine(0.3, 5.0)
    assert rb.billiard_map(d, far) == far
    out = rb.billiard_map(d, rb.OrientedLine(0.0, 0.0))
    assert rb.line_distance(out, rb.OrientedLine(math.pi, 0.0)) < 1e-14


@given(st.floats(0, 6.28), st.floats(-0.95, 0.95))
def test_disk_chord_matches_angle_oracle(phi, p):
    # exit point at polar angle phi + asin p, outgoing angle phi + pi + 2 asin p
    beta = phi + math.asin(p)
    x = np.array([math.cos(beta), math.sin(beta)])
    phi_out = phi + math.pi + 2 * math.asin(p)
    n_out = np.array([-math.sin(phi_out), math.cos(phi_out)])
    oracle = rb.OrientedLine(phi_out, float(x @ n_out))
    assert rb.line_distance(rb.billiard_map(rb.disk(), rb.OrientedLine(phi, p)), oracle) < 1e-12


def test_commuting_examples(rng):
    lines = rb.sample_lines(rng, 1000, 2.2)
    assert rb.commute_residual(rb.disk(r=1.0), rb.disk(r=2.0), lines) < 1e-10
    lines = rb.sample_lines(rng, 1000, 3.2)
    inner = rb.ellipse_body(1.0, 4.0)
    assert rb.commute_residual(inner, rb.ellipse_body(1.0, 9.0), lines) < 1e-9
    shifted = rb.ellipse_body(1.025, 9.0, Frame(0.0, 0.025, 0.0))
    assert rb.commute_residual(inner, shifted, lines) > 1e-3
    with pytest.raises(ValueError):
        rb.commute_residual(rb.disk(r=2.0), rb.disk(r=1.0), lines)


def _chain_with(rng, m, nskew):
    while True:
        chain, l0 = rb.random_reflector_chain(rng, m)
        if sum(r.law is Law.SKEW for r in chain) == nskew:
            return chain, l0


@pytest.mark.parametrize("m,nskew,sign", [(2, 2, 1), (2, 1, -1), (4, 0, 1), (1, 0, 1), (1, 1, -1), (3, 1, -1)])
def test_parity_sign(rng, m, nskew, sign):
    # usual reflections preserve the area form on lines, skew ones reverse it
    for _ in range(5):
        chain, l0 = _chain_with(rng, m, nskew)
        assert rb.skew_parity_sign(chain, l0) == sign


def test_corner_hit_on_multi_arc_body():
    body = rb.ConvexBody(
        (rb.Arc(CircleMirror(0.0, 0.0, 1.0), 0.0, math.pi), rb.Arc(LineMirror(X_AXIS), -1.0, 1.0))
    )
    assert body.contains((0.0, 0.5)) and not body.contains((0.0, -0.5))
    with pytest.raises(rb.CornerHit):
        rb.trace_ray(body, rb.OrientedLine.through([2.0, -1.0], [-1.0, 1.0]))
    tr = rb.trace_ray(body, rb.OrientedLine.through([0.3, -2.0], [0.0, 1.0]))
    assert tr.reflection_count == 1 and not tr.invisible


def test_convex_body_validation():
    with pytest.raises(ValueError):
        rb.ConvexBody((rb.Arc(CircleMirror(0.0, 0.0, 1.0), 0.0, math.pi),))
    with pytest.raises(ValueError):
        rb.ConvexBody(
            (rb.Arc(CircleMirror(0.0, 0.0, 1.0), 0.0, math.pi), rb.Arc(LineMirror(X_AXIS), -2.0, 1.0))
        )


def test_trace_examples():
    tr = rb.trace_ray(rb.ArcBody(()), rb.OrientedLine(0.3, 0.2))
    assert tr.invisible and tr.reflection_count == 0
    for p in (-0.6, 0.1, 0.8):
        assert not rb.trace_ray(rb.disk(), rb.OrientedLine(0.4, p)).invisible


def test_parabolic_assembly_axis_ray_invisible():
    body = rb.parabolic_assembly()
    for h in (0.6, 1.0, 1.4):
        tr = rb.trace_ray(body, rb.OrientedLine(0.0, h))
        assert tr.invisible and tr.reflection_count == 4
    assert not rb.trace_ray(body, rb.OrientedLine(0.05, 1.0)).invisible


def test_scans():
    s = rb.invisibility_scan(rb.disk(), ((0.0, 3.0), (-0.9, 0.9)), 15)
    assert s.fraction_invisible == 0.0 and s.hit_fraction > 0
    s = rb.invisibility_scan(rb.parabolic_assembly(), ((-0.2, 0.2), (0.4, 1.6)), 21)
    assert 0 < s.fraction_invisible < 0.1 and s.max_family_dimension_estimate <= 1
    pts, laws, radii = SKEW_CONFIGS[0]
    b = rb.designed_skew_configuration(pts, laws, radii)
    assert rb.invisibility_scan(b, ((-0.05, 0.05), (-0.05, 0.05)), 11).fraction_invisible < 0.01


def test_box_dimension():
    n = 64
    assert rb.box_dimension([(i, 10) for i in range(n)], n) == pytest.approx(1.0, abs=1e-12)
    assert rb.box_dimension([(i, j) for i in range(n) for j in range(n)], n) == pytest.approx(2.0, abs=1e-12)
    assert rb.box_dimension([(3, 3)], n) == 0.0
