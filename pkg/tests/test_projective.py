import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflective_billiards.projective import (
    I1,
    I2,
    INFINITY_LINE,
    DegenerateMirrorError,
    DirectionCoord,
    ProjLine,
    ProjPoint,
    VerdictKind,
    bilinear_form,
    chordal,
    is_isotropic,
    reflect_direction,
    reflection_law_verdict,
    reflection_matrix,
    symmetry_about_line,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def _matrix_oracle(v, m):
    # independent route: reflect the vector, then take its coordinate
    S = np.array(reflection_matrix(m))
    return DirectionCoord.from_vector(S @ np.asarray(v, dtype=complex))


def test_bilinear_examples():
    assert bilinear_form((1, 0), (1, 0)) == 1
    assert abs(bilinear_form((1, 1j), (1, 1j))) == 0
    assert bilinear_form((1, 2), (3, 4)) == 11


def test_isotropic_examples():
    assert is_isotropic(ProjLine(0.0, 1j, -1.0))  # z2 = i z1
    assert is_isotropic(INFINITY_LINE)
    assert not is_isotropic(ProjLine(0.0, 0.0, 1.0))
    assert INFINITY_LINE.contains(I1) and INFINITY_LINE.contains(I2)


def test_reflect_fixes_mirror_direction():
    z = DirectionCoord.from_angle(0.4 + 0.2j)
    assert chordal(reflect_direction(z, z), z) < 1e-14


def test_real_angle_reflection_about_x_axis():
    zeta = DirectionCoord.from_vector((1, 0))
    assert abs(zeta.z + 1) < 1e-15
    for th in (0.1, 0.7, 2.0):
        out = reflect_direction(DirectionCoord.from_angle(th), zeta)
        assert chordal(out, DirectionCoord.from_angle(-th)) < 1e-14


def test_isotropic_mirror_rejected():
    with pytest.raises(DegenerateMirrorError):
        reflect_direction(DirectionCoord.from_z(2.0), DirectionCoord.from_z(0.0))


@given(cplx, cplx, cplx, cplx)
def test_reflection_matches_matrix_oracle(a, b, c, d):
    v, m = (a, b), (c, d)
    if abs(bilinear_form(m, m)) < 1e-3 or abs(bilinear_form(v, v)) < 1e-3:
        return
    if max(abs(c), abs(d)) < 1e-2 or max(abs(a), abs(b)) < 1e-2:
        return
    out = reflect_direction(DirectionCoord.from_vector(v), DirectionCoord.from_vector(m))
    assert chordal(out, _matrix_oracle(v, m)) < 1e-12


@given(cplx, cplx)
def test_reflection_is_involution(a, b):
    if abs(a) < 1e-3 or abs(b) < 1e-3:
        return
    z, zeta = DirectionCoord.from_z(a), DirectionCoord.from_z(b)
    assert chordal(reflect_direction(reflect_direction(z, zeta), zeta), z) < 1e-12


def test_symmetry_examples():
    x_axis = ProjLine(0.0, 0.0, 1.0)
    p = ProjPoint.affine(0.3, 0.0)
    assert symmetry_about_line(p, x_axis).coincides(p)
    assert symmetry_about_line(ProjPoint.affine(0, 1), x_axis).coincides(ProjPoint.affine(0, -1))
    l = ProjLine(0.0, 2.0, -1.0)  # z2 = 2 z1
    q = symmetry_about_line(ProjPoint.affine(1, 0), l)
    x, y = q.xy()
    assert abs(x + 0.6) < 1e-14 and abs(y - 0.8) < 1e-14


@given(cplx, cplx, cplx, cplx, cplx)
def test_symmetry_is_isometric_involution(x, y, c0, c1, c2):
    if abs(c1) + abs(c2) < 1e-2 or abs(c1 * c1 + c2 * c2) < 1e-2:
        return
    l = ProjLine(c0, c1, c2)
    p = ProjPoint.affine(x, y)
    q = symmetry_about_line(p, l)
    assert symmetry_about_line(q, l).coincides(p, 1e-9)
    # midpoint lies on l
    (px, py), (qx, qy) = p.xy(), q.xy()
    assert ProjLine(c0, c1, c2).contains(ProjPoint.affine((px + qx) / 2, (py + qy) / 2), 1e-9)


def test_projective_equality_matches_cross_product(rng):
    for _ in range(10_000):
        h = rng.normal(size=3) + 1j * rng.normal(size=3)
        s = complex(rng.normal(), rng.normal())
        p, q = ProjPoint(*h), ProjPoint(*(s * h))
        assert p.coincides(q)
        r = ProjPoint(*(h + 0.1 * (rng.normal(size=3) + 1j * rng.normal(size=3))))
        cross = np.cross(h, np.array(r.coords))
        assert p.coincides(r) == (np.linalg.norm(cross) < 1e-9 * np.linalg.norm(h))


def test_verdict_examples():
    A, B, C = ProjPoint.affine(-1, 1), ProjPoint.affine(0, 0), ProjPoint.affine(1, 1)
    v = reflection_law_verdict(A, B, C, ProjLine(0.0, 0.0, 1.0))
    assert v.kind is VerdictKind.SYMMETRIC and v.residual < 1e-15
    assert reflection_law_verdict(B, B, C, ProjLine(0.0, 0.0, 1.0)).kind is VerdictKind.VERTEX_COINCIDENCE
    iso = ProjLine(0.0, 1j, -1.0)
    assert reflection_law_verdict(A, B, C, iso).kind is VerdictKind.VIOLATED


def test_isotropic_edge_on_isotropic_mirror_is_allowed():
    iso = ProjLine(0.0, 1j, -1.0)
    B = ProjPoint.affine(0, 0)
    A = ProjPoint.affine(1, 1j)  # on iso
    C = ProjPoint.affine(2, 0.5)
    assert reflection_law_verdict(A, B, C, iso).kind is VerdictKind.ISOTROPIC_EDGE


def test_direction_coordinate_of_angle():
    for th in (0.0, 0.3, 1.2 + 0.4j):
        v = (cmath.cos(th), cmath.sin(th))
        assert chordal(DirectionCoord.from_vector(v), DirectionCoord.from_angle(th)) < 1e-14
    assert math.isinf(abs(DirectionCoord.from_z(math.inf).z))
