"""Command line entry point."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .geometry import format_rat
from .io import TerrainFormatError, load_terrain, serialize
from .terrain import Terrain1D, Terrain2D, TerrainError


def _fmt(vec) -> str:
    return "(" + ",".join(format_rat(c) for c in vec) + ")"


def _load(path):
    return load_terrain(path)


def cmd_validate(args) -> int:
    T = _load(args.file)
    if isinstance(T, Terrain2D):
        print(f"valid 2.5D terrain: {T.n} vertices, {len(T.triangles)} triangles")
    else:
        print(f"valid 1.5D terrain: {T.n} vertices")
    return 0


def cmd_prickliness(args) -> int:
    from .prickliness1d import brute_force_1d, prickliness_1d
    from .prickliness2d import brute_force_2d, prickliness_2d

    T = _load(args.file)
    fast, slow = ((prickliness_2d, brute_force_2d) if isinstance(T, Terrain2D)
                  else (prickliness_1d, brute_force_1d))
    res = (fast if args.algo == "sweep" else slow)(T)
    w = res.witness
    if w is None:
        wtxt = "none"
    else:
        wtxt = _fmt(w.vector if hasattr(w, "vector") else w)
    print(f"pi={res.value} witness={wtxt}")
    if args.check:
        other = (slow if args.algo == "sweep" else fast)(T)
        if other.value != res.value:
            print(f"check failed: other algorithm gives {other.value}", file=sys.stderr)
            return 1
        print("check=ok")
    return 0


def cmd_heatmap(args) -> int:
    from .prickliness2d import heatmap

    T = _load(args.file)
    if not isinstance(T, Terrain2D):
        print("heatmap needs a 2.5D terrain", file=sys.stderr)
        return 1
    g = heatmap(T, args.res, args.max_offset)
    out = Path(args.out)
    out.with_suffix(".csv").write_text(g.to_csv())
    out.with_suffix(".pgm").write_text(g.to_pgm())
    print(f"max={g.max_value()} wrote {out.with_suffix('.csv')} {out.with_suffix('.pgm')}")
    return 0


def cmd_viewshed(args) -> int:
    from .prickliness2d import prickliness_2d
    from .viewshed import (Scene, ViewshedStats, Viewpoint, select_viewpoints,
                           viewshed_1d, viewshed_vertices_2d)

    T = _load(args.file)
    if isinstance(T, Terrain1D):
        if args.viewpoint is None:
            print("1.5D viewsheds need --viewpoint", file=sys.stderr)
            return 2
        res = viewshed_1d(T, T.vertices[args.viewpoint])
        print(f"intervals={res.count}")
        for a, b in res.intervals:
            print(f"{format_rat(a)} {format_rat(b)}")
        return 0
    if args.viewpoint is not None:
        if not 0 <= args.viewpoint < T.n:
            print(f"viewpoint {args.viewpoint} out of range", file=sys.stderr)
            return 2
        vps = [Viewpoint.at_vertex(T, args.viewpoint)]
    else:
        vps = select_viewpoints(T, args.auto)
    pi = prickliness_2d(T).value
    sc = Scene(T)
    tid = Path(args.file).stem
    lines = [ViewshedStats.CSV_HEADER]
    for vp in vps:
        st = viewshed_vertices_2d(T, vp, sc)
        lines.append(st.csv_row(tid, vp.vertex, pi, T.n))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_generate(args) -> int:
    from .generators import GeneratorSpec

    try:
        spec = GeneratorSpec.parse(args.family, args.params or [])
        built = spec.build()
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    T = built[0] if isinstance(built, tuple) else built
    text = serialize(T)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    from .experiment import rows_to_csv, run_experiment

    rows = run_experiment(Path(args.inputs), args.viewpoints)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prickliness",
                                 description="Prickliness and viewshed tools for terrains.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a terrain file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("prickliness", help="compute the prickliness and a witness direction")
    p.add_argument("file")
    p.add_argument("--algo", choices=("sweep", "brute"), default="sweep")
    p.add_argument("--check", action="store_true", help="compare against the other algorithm")
    p.set_defaults(func=cmd_prickliness)

    p = sub.add_parser("heatmap", help="peak counts for directions near vertical")
    p.add_argument("file")
    p.add_argument("--res", type=int, default=21)
    p.add_argument("--max-offset", type=float, default=20.0)
    p.add_argument("--out", required=True, help="output prefix (.csv and .pgm are added)")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("viewshed", help="viewshed vertex counts")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--viewpoint", type=int, help="vertex index")
    g.add_argument("--auto", type=int, metavar="K", help="pick K separated high vertices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_viewshed)

    p = sub.add_parser("generate", help="write a terrain from a named family")
    p.add_argument("--family", required=True)
    p.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="prickliness vs median viewshed complexity")
    p.add_argument("--inputs", required=True)
    p.add_argument("--viewpoints", type=int, default=9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (TerrainError, TerrainFormatError) as e:
        print(f"invalid terrain: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
