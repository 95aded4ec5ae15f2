"""JSON and CSV formats.

Floats are printed with 17 significant digits so every value round-trips.
Complex numbers are written as a plain number when real, else ``[re, im]``.
Mirror JSON is ``{"kind", "params", "frame": {"angle", "offset": [x, y]}}``.
"""

from __future__ import annotations

import io
import json
import math
from typing import Any

import numpy as np

from .conics import (
    IDENTITY,
    CircleMirror,
    ConfocalConic,
    Frame,
    LineMirror,
    Mirror,
    MirrorImage,
    ParabolaMirror,
)
from .projective import ProjLine, ProjPoint


class FormatError(ValueError):
    pass


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _enc(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        if c.imag == 0:
            return fmt_float(c.real)
        return f"[{fmt_float(c.real)}, {fmt_float(c.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_enc(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, np.ndarray):
        return _enc(obj.tolist(), indent, level)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_enc(v, indent, level + 1) for v in obj) + "]"
        return "[" + sep.join(f"{pad}{_enc(v, indent, level + 1)}" for v in obj) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _enc(obj, indent, 0) + "\n"


def to_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise FormatError(f"complex number must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    raise FormatError(f"not a number: {v!r}")


def _real(v) -> float:
    c = to_complex(v)
    if c.imag != 0:
        raise FormatError("expected a real number")
    return c.real


# --- mirrors ------------------------------------------------------------------


def frame_to_dict(f: Frame) -> dict:
    return {"angle": f.angle, "offset": [f.ox, f.oy]}


def frame_from_dict(d: dict | None) -> Frame:
    if not d:
        return IDENTITY
    off = d.get("offset", [0.0, 0.0])
    return Frame(_real(d.get("angle", 0.0)), _real(off[0]), _real(off[1]))


def line_to_list(l: ProjLine) -> list:
    return list(l.coords)


def line_from_list(v) -> ProjLine:
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise FormatError("a line is [c0, c1, c2]")
    return ProjLine(*(to_complex(x) for x in v))


def mirror_to_dict(m: Mirror) -> dict:
    if isinstance(m, LineMirror):
        return {"kind": "line", "params": {"line": line_to_list(m.line)}, "frame": frame_to_dict(IDENTITY)}
    if isinstance(m, CircleMirror):
        return {"kind": "circle", "params": {"center": [m.cx, m.cy], "r2": m.r2}, "frame": frame_to_dict(IDENTITY)}
    if isinstance(m, ConfocalConic):
        return {"kind": "confocal", "params": {"c": m.c, "lambda": m.lam, "branch": m.branch}, "frame": frame_to_dict(m.frame)}
    if isinstance(m, ParabolaMirror):
        return {"kind": "parabola", "params": {"f": m.f}, "frame": frame_to_dict(m.frame)}
    if isinstance(m, MirrorImage):
        return {
            "kind": "mirror-image",
            "params": {"base": mirror_to_dict(m.base), "axis": line_to_list(m.axis)},
            "frame": frame_to_dict(IDENTITY),
        }
    raise TypeError(f"cannot serialize mirror {type(m).__name__}")


def mirror_from_dict(d: dict) -> Mirror:
    if not isinstance(d, dict) or "kind" not in d:
        raise FormatError("mirror must be an object with a 'kind'")
    kind, p = d["kind"], d.get("params", {})
    frame = frame_from_dict(d.get("frame"))
    try:
        if kind == "line":
            return LineMirror(line_from_list(p["line"]))
        if kind == "circle":
            c = p["center"]
            return CircleMirror(to_complex(c[0]), to_complex(c[1]), to_complex(p["r2"]))
        if kind == "confocal":
            lam = to_complex(p["lambda"])
            return ConfocalConic(_real(p["c"]), lam.real if lam.imag == 0 else lam, frame, int(p.get("branch", 1)))
        if kind == "parabola":
            return ParabolaMirror(_real(p["f"]), frame)
        if kind == "mirror-image":
            return MirrorImage(mirror_from_dict(p["base"]), line_from_list(p["axis"]))
    except KeyError as exc:
        raise FormatError(f"mirror of kind {kind!r} is missing {exc}") from None
    raise FormatError(f"unknown mirror kind {kind!r}")


def billiard_to_dict(b) -> dict:
    out: dict = {"mirrors": [mirror_to_dict(m) for m in b.mirrors]}
    if b.laws is not None:
        out["laws"] = [l.value for l in b.laws]
    return out


def billiard_from_dict(d: dict):
    from .reflectivity import Billiard

    if not isinstance(d, dict) or not isinstance(d.get("mirrors"), list):
        raise FormatError("billiard JSON needs a 'mirrors' list")
    return Billiard(tuple(mirror_from_dict(m) for m in d["mirrors"]), d.get("laws"))


def body_to_dict(body) -> dict:
    return {
        "arcs": [
            {"mirror": mirror_to_dict(a.mirror), "t_range": [a.t0, a.t1], "law": a.law.value} for a in body.arcs
        ],
        "orientation": "ccw",
    }


def body_from_dict(d: dict, convex: bool = False):
    from .real_billiards import Arc, ArcBody, ConvexBody
    from .reflectivity import Law

    arcs = tuple(
        Arc(mirror_from_dict(a["mirror"]), _real(a["t_range"][0]), _real(a["t_range"][1]), Law(a.get("law", "usual")))
        for a in d.get("arcs", [])
    )
    return ConvexBody(arcs) if convex else ArcBody(arcs)


def kgon_to_dict(g) -> dict:
    return {"vertices": [{"A": list(p.xy()), "L": line_to_list(l)} for p, l in zip(g.points, g.lines)]}


def kgon_from_dict(d: dict):
    from .birkhoff import FramedKGon

    vs = d["vertices"]
    pts = tuple(ProjPoint.affine(to_complex(v["A"][0]), to_complex(v["A"][1])) for v in vs)
    return FramedKGon(pts, tuple(line_from_list(v["L"]) for v in vs))


# --- CSV -------------------------------------------------------------------------


def _row(vals) -> str:
    return ",".join(v if isinstance(v, str) else fmt_float(float(v)) if not isinstance(v, int) else str(v) for v in vals)


def orbit_csv(orbit) -> str:
    buf = io.StringIO()
    buf.write("index,t_re,t_im,x_re,x_im,y_re,y_im,residual\n")
    for j, (t, p, v) in enumerate(zip(orbit.params, orbit.points, orbit.verdicts)):
        t = complex(t)
        x, y = (complex(c) for c in p.xy())
        buf.write(_row([j + 1, t.real, t.imag, x.real, x.imag, y.real, y.imag, v.residual]) + "\n")
    return buf.getvalue()


def trajectory_csv(traj) -> str:
    buf = io.StringIO()
    buf.write("step,Bx_re,Bx_im,By_re,By_im,Cx_re,Cx_im,Cy_re,Cy_im,P2_re,P2_im\n")
    for i in range(len(traj.times)):
        b, c, p2 = traj.B[i], traj.C[i], complex(traj.P2[i])
        vals = [i]
        for z in (*b, *c, p2):
            vals += [complex(z).real, complex(z).imag]
        buf.write(_row(vals) + "\n")
    return buf.getvalue()
