"""
Command-line front end.

    tfscatter solve CONFIG            run a simulation and write its outputs
    tfscatter render GRID -o OUT.ppm  raster snapshots of a grid file
    tfscatter validate SUITE          run a self-check suite
    tfscatter gallery NAME [--key value ...]  write a boundary polyline

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 solver flag (unresolved truncation or large residual), 4 I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4


def _err(msg):
    print(f"tfscatter: {msg}", file=sys.stderr)


def cmd_solve(args):
    from . import fileio
    from .config import load_config
    from .contour import ContourError
    from .geometry import GeometryError
    from .pipeline import ConfigError, run_simulation

    try:
        run = load_config(args.config)
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_IO
    except (ConfigError, GeometryError, ContourError, ValueError) as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    sim = run.sim
    if args.workers:
        from dataclasses import replace
        sim = replace(sim, workers=args.workers)
    try:
        sol = run_simulation(sim)
    except (GeometryError, ContourError, ConfigError) as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    meta = sol.meta
    print(f"m = {meta['m']}  delta = {meta['delta']:.6g}  n_c = {meta['n_c']}  "
          f"band = [{meta['band'][0]:.6g}, {meta['band'][1]:.6g}]")
    print(f"nodes = {meta['n_nodes']}  solves = {meta['n_solves']}  "
          f"max residual = {meta['max_residual']:.2e}  time = {meta['timings']['total']:.1f}s")
    try:
        if run.probe_path is not None and sol.probes.size:
            fileio.write_probes(run.probe_path, sol.probes, sol.probe_times, sol.probe_u, sol.probe_total)
            print(f"wrote {run.probe_path}")
        if run.grid_path is not None and sol.grid_u is not None:
            g = sol.grid
            fileio.write_grid(run.grid_path, sol.grid_u, (g.x0, g.x1, g.y0, g.y1), g.times)
            print(f"wrote {run.grid_path}")
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    if meta["flags"]:
        for f in meta["flags"]:
            _err(f"solver flag: {f}")
        return EXIT_SOLVER
    return EXIT_OK


def cmd_render(args):
    from . import fileio

    try:
        grid = fileio.read_grid(args.grid)
    except (OSError, fileio.FileFormatError) as exc:
        _err(f"cannot read grid: {exc}")
        return EXIT_IO
    out = Path(args.output) if args.output else Path(args.grid).with_suffix(".ppm")
    nt = grid.values.shape[0]
    try:
        for k in range(nt):
            path = out if nt == 1 else out.with_name(f"{out.stem}_{k:03d}{out.suffix or '.ppm'}")
            fileio.write_ppm(path, grid.values[k], args.colormap)
            print(f"wrote {path}  (t = {grid.times[k]:.6g})")
    except OSError as exc:
        _err(f"cannot write image: {exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_validate(args):
    from .validation import SUITES, run_suite

    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        _err(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or all")
        return EXIT_CONFIG
    failed = 0
    for name in names:
        print(f"[{name}]")
        for c in run_suite(name):
            print("  " + c.line())
            failed += not c.passed
    print("all checks passed" if not failed else f"{failed} check(s) failed")
    return EXIT_OK if not failed else EXIT_FAIL


def _gallery_params(extra):
    from .config import parse_value

    params = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise ValueError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            val = next(it, None)
            if val is None:
                raise ValueError(f"missing value for --{key}")
        v = parse_value(val)
        if isinstance(v, str):
            raise ValueError(f"--{key} expects a number or a comma-separated tuple")
        params[key.replace("-", "_")] = v
    return params


def cmd_gallery(args, extra):
    from . import fileio
    from .geometry import GALLERY, GeometryError, build_scatterer

    if args.name not in GALLERY:
        _err(f"unknown scatterer {args.name!r}; choose from {', '.join(GALLERY)}")
        return EXIT_CONFIG
    try:
        curve = build_scatterer(args.name, _gallery_params(extra))
    except (GeometryError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    pts = curve.sample(args.points)
    out = Path(args.output) if args.output else Path(f"{args.name}.txt")
    try:
        if len(pts) == 1:
            fileio.write_polyline(out, pts[0])
        else:
            # components separated by a blank line
            with open(out, "w") as fh:
                for k, c in enumerate(pts):
                    if k:
                        fh.write("\n")
                    np.savetxt(fh, np.c_[c.real, c.imag], fmt="%.17g")
    except OSError as exc:
        _err(f"cannot write polyline: {exc}")
        return EXIT_IO
    print(f"{curve.name}: components = {len(curve.components)}  pieces = {len(curve.pieces)}  "
          f"corners = {curve.n_corners}  arclength = {curve.arclength():.12g}")
    if curve.name == "radiator":
        # n + 1 equally spaced slots, minus the one facing the opening when it exists
        slots = int(curve.params.get("n", 5)) + 1
        print(f"petals = {slots - (slots % 2 == 0)}")
    print(f"wrote {out} ({sum(c.size for c in pts)} points)")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tfscatter", description="Time-domain scattering by damped frequency solves.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run a simulation from a config file")
    s.add_argument("config")
    s.add_argument("--workers", type=int, default=None, help="frequency-solve threads")

    r = sub.add_parser("render", help="render a grid file to PPM images")
    r.add_argument("grid")
    r.add_argument("--colormap", choices=("linear", "log"), default="linear")
    r.add_argument("-o", "--output", default=None)

    v = sub.add_parser("validate", help="run a validation suite")
    v.add_argument("suite", help="specfun, helmholtz, synthesis, contour, pipeline, trapping or all")

    g = sub.add_parser("gallery", help="write a gallery boundary as a polyline",
                       epilog="extra options --key value set gallery parameters")
    g.add_argument("name")
    g.add_argument("-o", "--output", default=None)
    g.add_argument("--points", type=int, default=2048)
    return p


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command != "gallery":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return cmd_solve(args)
    if args.command == "render":
        return cmd_render(args)
    if args.command == "validate":
        return cmd_validate(args)
    return cmd_gallery(args, extra)


if __name__ == "__main__":
    sys.exit(main())
