"""Minimal deterministic SVG figures: mirrors, orbits, spirals and ray traces.

Output depends only on the input data: fixed number formatting, no
timestamps, no ids drawn from memory addresses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PALETTE = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#5d6d7e")


def _n(x: float) -> str:
    s = format(float(x), ".6f").rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass
class Figure:
    width: int = 600
    height: int = 600
    title: str = ""
    _items: list = field(default_factory=list)
    _pts: list = field(default_factory=list)

    def polyline(self, xy, color: str = "#000000", width: float = 1.0, closed: bool = False, dash: str | None = None):
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        xy = xy[np.all(np.isfinite(xy), axis=1)]
        if len(xy) < 2:
            return
        self._items.append(("poly", xy, color, width, closed, dash))
        self._pts.append(xy)

    def points(self, xy, color: str = "#000000", r: float = 2.5):
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        self._items.append(("dots", xy, color, r))
        self._pts.append(xy)

    def _transform(self):
        allp = np.concatenate(self._pts) if self._pts else np.zeros((1, 2))
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
        m = 30.0
        s = min(self.width, self.height) - 2 * m
        k = s / span

        def f(p):
            return m + (p[0] - lo[0]) * k, self.height - m - (p[1] - lo[1]) * k

        return f

    def to_svg(self) -> str:
        f = self._transform()
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>',
        ]
        if self.title:
            out.append(f'<text x="10" y="20" font-family="sans-serif" font-size="14">{_esc(self.title)}</text>')
        for it in self._items:
            if it[0] == "poly":
                _, xy, color, width, closed, dash = it
                pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in (f(p) for p in xy))
                tag = "polygon" if closed else "polyline"
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(
                    f'<{tag} points="{pts}" fill="none" stroke="{color}" stroke-width="{_n(width)}"{extra}/>'
                )
            else:
                _, xy, color, r = it
                for p in xy:
                    a, b = f(p)
                    out.append(f'<circle cx="{_n(a)}" cy="{_n(b)}" r="{_n(r)}" fill="{color}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _mirror_trace(m, t0: float, t1: float, n: int = 200) -> np.ndarray:
    ts = np.linspace(t0, t1, n)
    return np.array([[complex(v).real for v in m.point(t)] for t in ts])


def render_orbits(billiard, orbits, title: str = "", windows=None) -> str:
    """Real traces of the mirrors and the real parts of the orbit polygons."""
    fig = Figure(title=title)
    pts = np.array([[complex(c).real for c in p.xy()] for o in orbits for p in o.points])
    for j, m in enumerate(billiard.mirrors):
        if windows is not None:
            t0, t1 = windows[j]
        elif m.period is not None and abs(complex(m.period).imag) == 0:
            t0, t1 = 0.0, float(abs(m.period))
        else:
            ts = [complex(o.params[j]).real for o in orbits]
            pad = 0.5 * (max(ts) - min(ts)) + 0.5
            t0, t1 = min(ts) - pad, max(ts) + pad
        if m.is_line():
            c = pts.mean(axis=0) if len(pts) else np.zeros(2)
            tc = complex(m.parameter_of(*c)).real
            r = np.ptp(pts, axis=0).max() if len(pts) else 1.0
            t0, t1 = tc - r, tc + r
        fig.polyline(_mirror_trace(m, t0, t1), PALETTE[j % len(PALETTE)], 1.5)
    for o in orbits:
        xy = [[complex(c).real for c in p.xy()] for p in o.points]
        fig.polyline(xy, "#444444", 0.8, closed=True)
        fig.points(xy, "#000000", 2.0)
    return fig.to_svg()


def render_spiral(traj, title: str = "") -> str:
    fig = Figure(title=title)
    fig.polyline(np.real(traj.B), PALETTE[0], 1.2)
    fig.polyline(np.real(traj.C), PALETTE[1], 1.2)
    fig.points([np.real(traj.A)], "#000000", 3.0)
    return fig.to_svg()


def render_trace(body, traces, title: str = "") -> str:
    fig = Figure(title=title)
    for j, a in enumerate(body.arcs):
        fig.polyline(a.samples(120), PALETTE[j % len(PALETTE)], 2.0)
    ext = body.radius() + 2.0
    for tr in traces:
        xy = [s[0] for s in tr.segments]
        x, d = tr.segments[-1]
        xy.append(x + ext * d)
        # clip the far upstream start for readability
        x0, d0 = tr.segments[0]
        xy[0] = (xy[1] - ext * d0) if len(xy) > 1 else x0
        fig.polyline(xy, "#b03a2e" if tr.invisible else "#444444", 0.8)
    return fig.to_svg()
