"""
Experiment manifests: INI-style ``key = value`` files with section headers.

Schema::

    [scatterer]
    name = c_curve              ; any gallery name
    nodes_per_panel = 16
    base_panels = 32            ; optional
    corner_depth = 30
    a = 3.0                     ; any other key is a gallery parameter

    [packet]
    sigma = 1.5
    omega0 = 6
    t0 = 15
    direction = 1, 0
    wave_speed = 1
    amplitude = 1

    [solver]
    T = 150
    band = auto                 ; or "W1, W2"
    eps_band = 1.523e-8
    delta = auto                ; or a number <= delta_limit(T)
    m = auto                    ; or an integer
    eps_chop = 1e-8
    m_max = 4096
    n_c = auto
    h_safe = auto
    workers = auto

    [probes]
    points = 1 0; -1 0.5        ; "x y" pairs separated by semicolons
    times = 0:150:301           ; start:stop:count, or a comma list

    [grid]
    bounds = -5, 5, -5, 5
    shape = 200, 200            ; nx, ny
    times = 20, 60
    field = total               ; or scattered

    [output]
    probes = probes.csv
    grid = snapshots.tfwv

Numbers may be simple arithmetic expressions in ``pi``, e.g. ``5*pi/4``.
Relative output paths are resolved against the config file's directory.
"""

import ast
import configparser
import math
import operator
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .incident import WavePacket
from .pipeline import ConfigError, GridSpec, ScattererSpec, SimConfig

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}


def parse_number(text):
    """Evaluate a numeric literal or an arithmetic expression in ``pi``."""
    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"not a number: {text!r}")
    try:
        return ev(ast.parse(text.strip(), mode="eval").body)
    except SyntaxError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_value(text):
    """Number, comma-separated tuple of numbers, or a bare string."""
    parts = [p for p in text.split(",")]
    try:
        vals = [parse_number(p) for p in parts]
    except ConfigError:
        return text.strip()
    return vals[0] if len(vals) == 1 else tuple(float(v) for v in vals)


def parse_times(text):
    text = text.strip()
    if ":" in text:
        a, b, n = text.split(":")
        return tuple(np.linspace(parse_number(a), parse_number(b), int(parse_number(n))).tolist())
    return tuple(float(parse_number(p)) for p in text.split(",") if p.strip())


def parse_points(text):
    pts = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        xy = chunk.replace(",", " ").split()
        if len(xy) != 2:
            raise ConfigError(f"point {chunk!r} needs two coordinates")
        pts.append((float(parse_number(xy[0])), float(parse_number(xy[1]))))
    return tuple(pts)


def _auto(section, key, conv, default=None):
    raw = section.get(key, "auto").strip()
    return default if raw.lower() == "auto" else conv(raw)


@dataclass(frozen=True)
class RunConfig:
    """A simulation configuration plus where to write its outputs."""

    sim: SimConfig
    probe_path: Path | None
    grid_path: Path | None


def load_config(path) -> RunConfig:
    """
    Parse a manifest.

    Raises
    ------
    ConfigError
        Unknown sections, malformed values, or inconsistent settings.
    OSError
        If the file cannot be read.
    """
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    with open(path) as fh:
        try:
            cp.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
    known = {"scatterer", "packet", "solver", "probes", "grid", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")
    try:
        return _build(cp, path.parent)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _build(cp, base):
    sc = cp["scatterer"] if cp.has_section("scatterer") else {}
    reserved = {"name", "nodes_per_panel", "base_panels", "corner_depth"}
    params = {k: parse_value(v) for k, v in sc.items() if k not in reserved}
    for k, v in params.items():
        if isinstance(v, str):
            raise ConfigError(f"scatterer parameter {k} = {v!r} is not numeric")
    scat = ScattererSpec(
        name=sc.get("name", "disk").strip(), params=params,
        nodes_per_panel=int(sc.get("nodes_per_panel", 16)),
        base_panels=_auto(sc, "base_panels", int),
        corner_depth=int(sc.get("corner_depth", 30)))

    pk = cp["packet"] if cp.has_section("packet") else {}
    direction = parse_value(pk.get("direction", "1, 0"))
    packet = WavePacket(
        sigma=float(parse_number(pk.get("sigma", "1"))),
        omega0=float(parse_number(pk.get("omega0", "6"))),
        t0=float(parse_number(pk.get("t0", "10"))),
        z0=tuple(float(v) for v in direction),
        c=float(parse_number(pk.get("wave_speed", "1"))),
        amplitude=float(parse_number(pk.get("amplitude", "1"))))

    so = cp["solver"] if cp.has_section("solver") else {}
    band = _auto(so, "band", parse_value)
    if band is not None and (not isinstance(band, tuple) or len(band) != 2):
        raise ConfigError("band must be 'auto' or 'W1, W2'")

    pr = cp["probes"] if cp.has_section("probes") else {}
    probes = parse_points(pr.get("points", ""))
    probe_times = parse_times(pr.get("times", ""))

    grid = None
    grid_field = "total"
    if cp.has_section("grid"):
        g = cp["grid"]
        bounds = parse_value(g["bounds"])
        shape = parse_value(g["shape"])
        if not isinstance(bounds, tuple) or len(bounds) != 4:
            raise ConfigError("grid bounds must be 'x0, x1, y0, y1'")
        if not isinstance(shape, tuple) or len(shape) != 2:
            raise ConfigError("grid shape must be 'nx, ny'")
        grid = GridSpec(*bounds, int(shape[0]), int(shape[1]), parse_times(g.get("times", "")))
        grid_field = g.get("field", "total").strip()

    sim = SimConfig(
        scatterer=scat, packet=packet,
        T=float(parse_number(so.get("T", "40"))),
        band=band,
        eps_band=float(parse_number(so.get("eps_band", repr(math.exp(-18))))),
        delta=_auto(so, "delta", lambda s: float(parse_number(s))),
        m=_auto(so, "m", lambda s: int(parse_number(s))),
        eps_chop=float(parse_number(so.get("eps_chop", "1e-8"))),
        m_max=int(parse_number(so.get("m_max", "4096"))),
        n_c=_auto(so, "n_c", lambda s: int(parse_number(s))),
        probes=probes, probe_times=probe_times, grid=grid, grid_field=grid_field,
        h_safe=_auto(so, "h_safe", lambda s: float(parse_number(s))),
        workers=_auto(so, "workers", lambda s: int(parse_number(s))))

    out = cp["output"] if cp.has_section("output") else {}

    def resolve(key):
        v = out.get(key)
        if not v:
            return None
        p = Path(v.strip())
        return p if p.is_absolute() else base / p

    if probes and probe_times and resolve("probes") is None:
        raise ConfigError("probes configured but [output] probes path missing")
    if grid is not None and grid.times and resolve("grid") is None:
        raise ConfigError("grid configured but [output] grid path missing")
    return RunConfig(sim, resolve("probes"), resolve("grid"))
