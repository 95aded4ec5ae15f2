import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflective_billiards import real_billiards as rb
from reflective_billiards import serialization as ser
from reflective_billiards.birkhoff import frame_real_kgon
from reflective_billiards.conics import CircleMirror, ConfocalConic, Frame, LineMirror, MirrorImage, ParabolaMirror
from reflective_billiards.projective import ProjLine
from reflective_billiards.reflectivity import Billiard, build_type1, extend_orbit
from reflective_billiards.svg import render_orbits, render_spiral, render_trace
from reflective_billiards.triangular import circle_state, integrate_spiral

MIRRORS = [
    LineMirror(ProjLine(0.5, 1.0, -2.0 + 0.5j)),
    CircleMirror(0.1, -0.2 + 0.3j, 2.0),
    ConfocalConic(1.0, 4.0, Frame(0.3, 1.0, -1.0)),
    ConfocalConic(1.0, 0.5 + 0.2j, Frame(), -1),
    ParabolaMirror(0.7, Frame(1.0, 0.0, 2.0)),
    MirrorImage(ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25)), ProjLine(0.0, 0.0, 1.0)),
]


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(ser.fmt_float(x)) == x
    assert json.loads(ser.dumps(x)) == x


def test_nonfinite_becomes_null():
    assert ser.dumps([math.nan, math.inf]).strip() == "[null, null]"


@pytest.mark.parametrize("m", MIRRORS, ids=lambda m: type(m).__name__)
def test_mirror_round_trip(m):
    d = json.loads(ser.dumps(ser.mirror_to_dict(m)))
    assert ser.mirror_from_dict(d) == m


def test_billiard_round_trip_and_determinism():
    b = Billiard(tuple(MIRRORS[:4]), ["usual", "skew", "usual", "skew"])
    text = ser.dumps(ser.billiard_to_dict(b))
    assert ser.billiard_from_dict(json.loads(text)) == b
    assert ser.dumps(ser.billiard_to_dict(ser.billiard_from_dict(json.loads(text)))) == text


def test_body_and_kgon_round_trip():
    body = rb.parabolic_assembly()
    back = ser.body_from_dict(json.loads(ser.dumps(ser.body_to_dict(body))))
    assert back == body
    g = frame_real_kgon(np.array([[0, 0], [2, 0.3], [2.2, 1.8], [-0.3, 1.5]]), [1, -1, 1, -1])
    g2 = ser.kgon_from_dict(json.loads(ser.dumps(ser.kgon_to_dict(g))))
    assert all(p.coincides(q) for p, q in zip(g.points, g2.points))
    assert all(a.coincides(b) for a, b in zip(g.lines, g2.lines))


@pytest.mark.parametrize(
    "bad",
    [{}, {"mirrors": [{"kind": "spline"}]}, {"mirrors": [{"kind": "circle", "params": {}}]}, {"mirrors": [3]}],
)
def test_malformed_billiard_rejected(bad):
    with pytest.raises(ser.FormatError):
        ser.billiard_from_dict(bad)


def test_complex_value_format():
    assert ser.to_complex([1.0, -2.0]) == 1 - 2j
    with pytest.raises(ser.FormatError):
        ser.to_complex([1, 2, 3])


def test_csv_outputs():
    b = build_type1(ProjLine(0.0, 0.0, 1.0), ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25)))
    text = ser.orbit_csv(extend_orbit(b, 0.2, 0.3))
    lines = text.strip().split("\n")
    assert lines[0].startswith("index,t_re") and len(lines) == 5
    tr = integrate_spiral(circle_state(1.0), 5, 1e-2)
    rows = ser.trajectory_csv(tr).strip().split("\n")
    assert len(rows) == 7 and len(rows[1].split(",")) == 11


def test_svg_is_deterministic():
    b = build_type1(ProjLine(0.0, 0.0, 1.0), ParabolaMirror(0.25, Frame(0.0, 0.0, 1.25)))
    orbits = [extend_orbit(b, t, 0.3) for t in (-0.3, 0.2)]
    a = render_orbits(b, orbits, "type 1")
    assert a == render_orbits(b, orbits, "type 1") and a.startswith("<?xml")
    tr = integrate_spiral(circle_state(1.0), 20, 1e-2)
    assert "<polyline" in render_spiral(tr)
    body = rb.parabolic_assembly()
    assert "<polyline" in render_trace(body, [rb.trace_ray(body, rb.OrientedLine(0.0, 1.0))])
