"""Command line entry point: verify scenes, print Lagrangian densities, list scenes."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..calculus.jets import JetError
from ..cartan import CartanError
from .expr import DomainError, ExpressionError
from .report import build_report, dumps, format_table
from .scenes import SceneError, builtin_names, load_scene, validate
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _positive_int(s: str) -> int:
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conftwistor", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites on a scene")
    v.add_argument("scene", help="scene file or built-in scene name")
    v.add_argument("--suite", default="all", choices=("all",) + SUITES)
    v.add_argument("--points", type=_positive_int)
    v.add_argument("--seed", type=int)
    v.add_argument("--order", type=_positive_int)
    v.add_argument("--tol", type=float, help="override both tolerances")
    v.add_argument("--json", metavar="PATH", help="write the JSON report ('-' for stdout)")

    lag = sub.add_parser("lagrangian", help="print the three Yang-Mills density routes at a point")
    lag.add_argument("scene")
    lag.add_argument("--point", required=True, help='comma separated, e.g. "0.1,0,0.2,0"')
    lag.add_argument("--order", type=_positive_int, default=4)

    sub.add_parser("scenes", help="list built-in scenes")
    return p


def _parse_point(s: str):
    try:
        pt = tuple(float(c) for c in s.split(","))
    except ValueError:
        raise SceneError(f"bad point {s!r}") from None
    if len(pt) != 4:
        raise SceneError("point needs 4 coordinates")
    return pt


def cmd_verify(args) -> int:
    scene = load_scene(args.scene)
    if args.points:
        scene.points = args.points
    if args.seed is not None:
        scene.seed = args.seed
    if args.order:
        scene.order = args.order
    points = scene.sample_points()
    validate(scene, points)
    results = run_suite(scene, args.suite, points, scene.order, args.tol)
    report = build_report(scene, results, scene.seed)
    text = dumps(report)
    if args.json == "-":
        sys.stdout.write(text)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        print(format_table(report))
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


def cmd_lagrangian(args) -> int:
    from ..yang_mills import lagrangian_routes
    scene = load_scene(args.scene)
    pt = _parse_point(args.point)
    validate(scene, [pt])
    routes = lagrangian_routes(scene.e.jet(pt, args.order))
    names = {"su22": "1/4 B_su22(Omega, *Omega)", "sl2": "1/2 B_sl2(W, *W)",
             "so13": "1/2 Tr(W ^ *W)"}
    for k, v in routes.items():
        print(f"{names[k]:<28} {float(np.real(v.value)):.12e}")
    return EXIT_OK


def cmd_scenes(args) -> int:
    for name in builtin_names():
        s = load_scene(name)
        print(f"{name:<18} {s.description}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    handler = {"verify": cmd_verify, "lagrangian": cmd_lagrangian, "scenes": cmd_scenes}[args.command]
    try:
        return handler(args)
    except (SceneError, ExpressionError, DomainError, CartanError, JetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
