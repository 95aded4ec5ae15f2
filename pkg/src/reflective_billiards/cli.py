"""Command line: ``refbill verify | render | suite``.

Exit codes: 0 pass, 1 checked failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import real_billiards as rb
from .conics import CircleMirror, ConfocalFamily, Frame, ParabolaFamily, conic_at
from .reflectivity import Billiard, Patch, PatchRejected, build_type3, extend_orbit, verify_k_reflectivity
from .serialization import FormatError, billiard_from_dict, dumps, orbit_csv, trajectory_csv
from .suite import builtin_billiards, random_spiral_start, run_suite
from .svg import render_orbits, render_spiral, render_trace
from .triangular import integrate_spiral

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_patch(s: str) -> Patch:
    try:
        v = [float(x) for x in s.split(",")]
    except ValueError:
        raise UsageError(f"bad --patch {s!r}") from None
    if len(v) not in (4, 6):
        raise UsageError("--patch needs t1lo,t1hi,t2lo,t2hi[,im1,im2]")
    return Patch((v[0], v[1]), (v[2], v[3]), (v[4], v[5]) if len(v) == 6 else (0.0, 0.0))


def _patch_from_json(d) -> Patch:
    try:
        return Patch(tuple(d["t1"]), tuple(d["t2"]), tuple(d.get("imag", (0.0, 0.0))))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad patch object: {exc}") from None


def triangle_conics() -> tuple[Billiard, Patch]:
    """A fixed conic/circle triple: the negative control for k = 3."""
    mirrors = (
        conic_at(ConfocalFamily(1.0), 4.0),
        CircleMirror(0.3, 0.1, 1.0),
        conic_at(ConfocalFamily(0.8, Frame(0.7, 0.2, -0.1)), 3.0),
    )
    return Billiard(mirrors), Patch((0.1, 0.9), (1.1, 1.9))


def _load_billiard(args) -> tuple[Billiard, Patch | None]:
    if args.input:
        path = Path(args.input)
        if not path.is_file():
            raise UsageError(f"no such file: {path}")
        try:
            d = json.loads(path.read_text())
            b = billiard_from_dict(d)
        except (json.JSONDecodeError, FormatError, ValueError, TypeError) as exc:
            raise UsageError(f"malformed billiard JSON: {exc}") from None
        return b, _patch_from_json(d["patch"]) if "patch" in d else None
    name = args.builtin
    if name is None:
        raise UsageError("give --input or --builtin")
    if name == "triangle-conics":
        return triangle_conics()
    if name == "type3":
        lam = args.lambdas or [4.0, 2.0]
        if len(lam) != 2:
            raise UsageError("--lambdas takes two values")
        fam = ParabolaFamily() if args.topotype == "parabolas" else ConfocalFamily(args.foci)
        try:
            b = build_type3(fam, lam[0], lam[1], args.topotype)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return b, b.patch
    table = builtin_billiards()
    alias = {"type1": "type1-parabola", "type2": "type2-rotation"}
    key = alias.get(name, name)
    if key not in table:
        raise UsageError(f"unknown builtin {name!r}; choose from {', '.join(['type1', 'type2', 'type3', 'triangle-conics', *table])}")
    return table[key]


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    b, patch = _load_billiard(args)
    if args.patch:
        patch = _parse_patch(args.patch)
    if patch is None:
        raise UsageError("no patch: give --patch or a 'patch' object in the input")
    try:
        r = verify_k_reflectivity(b, patch, args.grid, args.tol)
    except PatchRejected as exc:
        _write(dumps({"error": str(exc), "passed": False}), args.out)
        return EXIT_FAIL
    _write(dumps(r.to_dict()), args.out)
    return EXIT_PASS if r.passed else EXIT_FAIL


def cmd_render(args) -> int:
    if not args.out:
        raise UsageError("render needs --out")
    fig = args.figure
    if fig == "orbits":
        b, patch = _load_billiard(args)
        if args.patch:
            patch = _parse_patch(args.patch)
        if patch is None:
            raise UsageError("no patch for the orbit family")
        g1, g2 = patch.grid(4)
        orbits = []
        for t1 in g1:
            try:
                o = extend_orbit(b, t1, g2[1])
            except Exception:
                continue
            if o.closed:
                orbits.append(o)
        if not orbits:
            raise UsageError("no closed orbits to draw")
        Path(args.out).write_text(render_orbits(b, orbits, title=args.title or ""))
        if args.csv:
            Path(args.csv).write_text("".join(orbit_csv(o) for o in orbits[:1]))
    elif fig == "spiral":
        rng = np.random.default_rng(args.seed)
        traj = integrate_spiral(random_spiral_start(rng), args.steps, args.step)
        if len(traj.times) < 2:
            raise UsageError("empty trajectory")
        Path(args.out).write_text(render_spiral(traj, title=args.title or ""))
        if args.csv:
            Path(args.csv).write_text(trajectory_csv(traj))
    else:
        body = rb.parabolic_assembly()
        traces = [rb.trace_ray(body, rb.OrientedLine(0.0, h)) for h in np.linspace(0.6, 1.4, 5)]
        traces.append(rb.trace_ray(body, rb.OrientedLine(0.05, 1.0)))
        Path(args.out).write_text(render_trace(body, traces, title=args.title or ""))
    return EXIT_PASS


def cmd_suite(args) -> int:
    try:
        report = run_suite(args.seed, args.only)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(dumps(report), args.out)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="refbill", description="Complex and real reflective billiards.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--input", help="billiard JSON file")
        sp.add_argument("--builtin", help="named builtin billiard")
        sp.add_argument("--foci", type=float, default=1.0, help="half focal distance c of the confocal family")
        sp.add_argument("--lambdas", type=float, nargs="+", help="two family parameters for type3")
        sp.add_argument("--topotype", choices=["ellipses", "hyperbolas", "ellipse-hyperbola", "parabolas"])
        sp.add_argument("--patch", help="t1lo,t1hi,t2lo,t2hi[,im1,im2]")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (default stdout)")

    v = sub.add_parser("verify", help="check k-reflectivity on a parameter patch")
    common(v)
    v.add_argument("--grid", type=int, default=24)
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="write an SVG figure")
    common(r)
    r.add_argument("--figure", choices=["orbits", "spiral", "trace"], default="orbits")
    r.add_argument("--csv", help="also write orbit or trajectory CSV here")
    r.add_argument("--steps", type=int, default=1000)
    r.add_argument("--step", type=float, default=1e-3)
    r.add_argument("--title")
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("suite", help="run the acceptance battery")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--only", nargs="+", help="criterion ids or groups: " + ", ".join(
        ["projective", "reflectivity", "triangular", "real", "birkhoff", "determinism"]))
    s.add_argument("--out")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
