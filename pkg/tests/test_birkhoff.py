import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflective_billiards import birkhoff as bk
from reflective_billiards.conics import ConfocalFamily
from reflective_billiards.reflectivity import build_type3
from reflective_billiards.suite import _random_quad, random_complex_gon

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]])
QUAD = np.array([[0, 0], [2, 0.3], [2.2, 1.8], [-0.3, 1.5]])
KITE = np.array([[-1, 0], [0, 1], [2, 0], [0, -1.0]])


def _rot(pts, phi, shift=(0.0, 0.0)):
    c, s = math.cos(phi), math.sin(phi)
    return pts @ np.array([[c, s], [-s, c]]) + np.asarray(shift)


def _line_dir(L):
    return np.array(L.direction())


def test_all_exterior_frame_is_exterior_bisector():
    g = bk.frame_real_kgon(QUAD, [1, 1, 1, 1])
    for j in range(4):
        n1 = QUAD[j - 1] - QUAD[j]
        n2 = QUAD[(j + 1) % 4] - QUAD[j]
        ext = n1 / np.linalg.norm(n1) + n2 / np.linalg.norm(n2)  # interior direction
        d = _line_dir(g.lines[j]).real
        assert abs(d @ ext) < 1e-12 * np.linalg.norm(d)


def test_concordance_presence_examples():
    ls = bk.concordant_lengths(bk.frame_real_kgon(QUAD, [1, 1, 1, 1]))
    assert ls is not None and len({complex(x).real > 0 for x in ls}) == 1
    for j in range(4):
        e = QUAD[(j + 1) % 4] - QUAD[j]
        assert abs(abs(ls[j]) - np.linalg.norm(e)) < 1e-12
    assert bk.concordant_lengths(bk.frame_real_kgon(QUAD, [1, 1, 1, -1])) is None
    ls = [complex(x).real for x in bk.concordant_lengths(bk.frame_real_kgon(QUAD, [-1, -1, 1, 1]))]
    assert (ls[0] > 0) != (ls[1] > 0) and (ls[1] > 0) == (ls[2] > 0) == (ls[3] > 0)


def test_odd_alpha_on_square_is_a_valid_frame_without_lengths():
    g = bk.frame_real_kgon(SQUARE, [1, 1, 1, -1])
    assert g.k == 4
    with pytest.raises(bk.ComponentError):
        bk.lambda_residual(g)


def test_flipping_neighbor_pair_preserves_presence(rng):
    for _ in range(200):
        pts = _random_quad(rng)
        alpha = [int(a) for a in rng.choice([1, -1], 4)]
        j = int(rng.integers(4))
        beta = list(alpha)
        beta[j], beta[(j + 1) % 4] = -beta[j], -beta[(j + 1) % 4]
        a = bk.concordant_lengths(bk.frame_real_kgon(pts, alpha)) is not None
        b = bk.concordant_lengths(bk.frame_real_kgon(pts, beta)) is not None
        assert a == b


@pytest.mark.parametrize("k", [3, 4, 5])
def test_distribution_dimension_is_k(rng, k):
    for _ in range(20):
        g = random_complex_gon(rng, k, plus=False)
        rep = bk.distribution_dimension(g)
        assert rep.dimension == k
        Jm = bk.constraint_jacobian(g.xy(), g.zetas())
        assert np.linalg.norm(Jm @ rep.basis) < 1e-10 * np.linalg.norm(Jm)


def test_isotropic_frame_line_rejected():
    pts = [(0, 0), (1, 0), (0, 1)]
    with pytest.raises(ValueError):
        bk.FramedKGon.from_arrays(pts, [0.0, 1.0, 1.0])


def test_tangent_functions_real_angle_oracle():
    g = bk.frame_real_kgon(QUAD, [1, 1, 1, 1])
    t = bk.tangent_functions(g)
    for j in range(4):
        d = _line_dir(g.lines[j]).real
        perp = np.array([-d[1], d[0]])
        e = QUAD[(j + 1) % 4] - QUAD[j]
        ang = math.atan2(perp[0] * e[1] - perp[1] * e[0], perp @ e)
        assert abs(t[j] - math.tan(ang)) < 1e-12
    for v in bk.tangent_functions(bk.frame_real_kgon(SQUARE, [1, 1, 1, 1])):
        assert abs(abs(v) - 1) < 1e-14


@given(st.floats(0, 6.28), st.floats(-3, 3), st.floats(-3, 3))
def test_tangent_functions_isometry_invariant(phi, dx, dy):
    t0 = bk.tangent_functions(bk.frame_real_kgon(QUAD, [1, -1, 1, -1]))
    t1 = bk.tangent_functions(bk.frame_real_kgon(_rot(QUAD, phi, (dx, dy)), [1, -1, 1, -1]))
    assert np.allclose(t0, t1, atol=1e-10)


def test_lambda_examples():
    assert abs(bk.lambda_residual(bk.frame_real_kgon(SQUARE, [1, 1, 1, 1]))) < 1e-14
    kite = bk.frame_real_kgon(KITE, [-1, 1, -1, 1])  # L1 = L3 = the diagonal
    assert bk.on_lambda(kite)
    with pytest.raises(bk.SingularPoint):
        bk.integral_plane(kite)


@given(st.floats(0, 6.28), st.floats(0.2, 5.0))
def test_lambda_residual_isometry_and_scaling(phi, s):
    base = bk.lambda_residual(bk.frame_real_kgon(QUAD, [1, 1, 1, 1]))
    moved = bk.lambda_residual(bk.frame_real_kgon(s * _rot(QUAD, phi, (0.4, -1.0)), [1, 1, 1, 1]))
    assert abs(moved - s * s * base) < 1e-10 * s * s * abs(base)


def test_alpha_minus_minus_never_on_lambda(rng):
    for _ in range(100):
        g = bk.frame_real_kgon(_random_quad(rng), [-1, -1, 1, 1])
        assert not bk.on_lambda(g)


def test_nu_frame_is_consistent(rng):
    for _ in range(20):
        g = random_complex_gon(rng, 4)
        _, mismatch = bk.nu_frame(g)
        assert mismatch < 1e-10


def test_integral_plane_is_integral_and_in_distribution(rng):
    done = 0
    while done < 30:
        g = random_complex_gon(rng, 4)
        if bk.on_lambda(g):
            continue
        P = bk.integral_plane(g)
        assert P.product_residual < 1e-8 and P.form_residual < 1e-8
        for v in P.vectors(g).T:
            assert bk.distribution_residual(g, v) < 1e-8
        done += 1


def test_type3_family_tangent_to_distribution():
    b = build_type3(ConfocalFamily(1.0), 4.0, 2.0)
    (lo1, hi1), (lo2, hi2) = b.patch.t1, b.patch.t2
    X, d1, d2 = bk.orbit_family_tangents(b, (lo1 + hi1) / 2, (lo2 + hi2) / 2, b.seed)
    g = bk.state_to_gon(X)
    assert bk.distribution_residual(g, d1) < 1e-7
    assert bk.distribution_residual(g, d2) < 1e-7
    # d2 moves the second vertex only, so it fixes the first one (nu_1 = 0)
    from scipy.linalg import subspace_angles

    P = bk.integral_plane(g, tangent=d2)
    assert np.max(subspace_angles(P.vectors(g), np.stack([d1, d2], axis=1))) < 1e-6
