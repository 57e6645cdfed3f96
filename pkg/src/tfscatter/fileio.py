"""
Binary snapshot grids, probe tables, polylines and raster images.

GridFile layout (little-endian): b"TFWV", u32 version = 1, u64 nx, ny, nt,
f64 x0, x1, y0, y1, nt f64 times, then nt*ny*nx cells as (f64 re, f64 im),
row-major with x fastest.  Masked cells have re = 0x7FF8000000000000 and
im = 0.
"""

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"TFWV"
VERSION = 1
MASK_BITS = 0x7FF8000000000000
PROBE_HEADER = "t,x,y,re_u,im_u,re_utot,im_utot"
LOG_RANGE = (1e-11, 1e10)

_HEADER = struct.Struct("<4sIQQQdddd")


class FileFormatError(ValueError):
    """Malformed or truncated output file."""


@dataclass(eq=False)
class GridData:
    """Snapshot fields, shape (nt, ny, nx); masked cells are NaN."""

    values: np.ndarray
    bounds: tuple
    times: np.ndarray

    @property
    def mask(self):
        return np.isnan(self.values.real)


def write_grid(path, values, bounds, times):
    vals = np.ascontiguousarray(values, dtype=np.complex128)
    if vals.ndim != 3:
        raise ValueError("grid values must have shape (nt, ny, nx)")
    nt, ny, nx = vals.shape
    times = np.asarray(times, dtype="<f8")
    if times.size != nt:
        raise ValueError("times do not match the number of slices")
    cells = vals.view("<f8").reshape(-1, 2).copy()
    masked = np.isnan(cells[:, 0]) | np.isnan(cells[:, 1])
    bits = cells.view("<u8")
    bits[masked, 0] = MASK_BITS
    cells[masked, 1] = 0.0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, nx, ny, nt, *map(float, bounds)))
        fh.write(times.tobytes())
        fh.write(cells.tobytes())


def read_grid(path) -> GridData:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FileFormatError("grid file truncated in header")
    magic, version, nx, ny, nt, x0, x1, y0, y1 = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FileFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FileFormatError(f"unsupported grid version {version}")
    expect = _HEADER.size + 8 * nt + 16 * nt * ny * nx
    if len(raw) != expect:
        raise FileFormatError(f"grid payload is {len(raw)} bytes, header implies {expect}")
    off = _HEADER.size
    times = np.frombuffer(raw, "<f8", nt, off).copy()
    cells = np.frombuffer(raw, "<c16", nt * ny * nx, off + 8 * nt).copy()
    return GridData(cells.reshape(nt, ny, nx), (x0, x1, y0, y1), times)


def write_probes(path, probes, times, u, utot):
    """
    Text table sorted by (probe index, t) with 17 significant digits.

    Parameters
    ----------
    probes : ndarray of complex, shape (K,)
    times : ndarray, shape (L,)
    u, utot : ndarray of complex, shape (K, L)
    """
    probes = np.asarray(probes)
    times = np.asarray(times, dtype=float)
    order = np.argsort(times, kind="stable")
    with open(path, "w") as fh:
        fh.write(PROBE_HEADER + "\n")
        for k, p in enumerate(probes):
            for l in order:
                row = (times[l], p.real, p.imag, u[k, l].real, u[k, l].imag,
                       utot[k, l].real, utot[k, l].imag)
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_probes(path):
    """Return the table as an (N, 7) float array."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != PROBE_HEADER:
            raise FileFormatError(f"unexpected probe header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != 7:
        raise FileFormatError("probe rows must have 7 columns")
    return data.reshape(-1, 7)


def write_polyline(path, points):
    pts = np.asarray(points)
    np.savetxt(path, np.c_[pts.real, pts.imag], fmt="%.17g")


# ---------------------------------------------------------------------------
# raster
# ---------------------------------------------------------------------------

# blue - cyan - green - yellow - red
_STOPS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
_COLORS = np.array([[0, 0, 143], [0, 160, 255], [110, 220, 110], [255, 220, 0], [180, 0, 0]], float)


def colorize(x):
    """Map values in [0, 1] to RGB bytes."""
    x = np.clip(x, 0, 1)
    rgb = np.stack([np.interp(x, _STOPS, _COLORS[:, c]) for c in range(3)], axis=-1)
    return np.round(rgb).astype(np.uint8)


def scale_field(values, colormap="linear"):
    """
    Normalized display value per cell, NaN on masked cells.

    ``linear`` maps Re u symmetrically about zero (all-zero gives 0.5);
    ``log`` maps log10 |u| clipped to ``LOG_RANGE``.
    """
    v = np.asarray(values)
    masked = np.isnan(v.real)
    if colormap == "linear":
        re = np.where(masked, 0.0, v.real)
        top = np.abs(re).max()
        x = 0.5 + 0.5 * re / top if top > 0 else np.full(re.shape, 0.5)
    elif colormap == "log":
        lo, hi = np.log10(LOG_RANGE)
        with np.errstate(divide="ignore"):
            mag = np.log10(np.abs(np.where(masked, 0.0, v)))
        x = (np.clip(mag, lo, hi) - lo) / (hi - lo)
    else:
        raise ValueError(f"unknown colormap {colormap!r}")
    return np.where(masked, np.nan, x)


def write_ppm(path, values, colormap="linear"):
    """Binary PPM of one slice; row 0 of the image is the top (largest y)."""
    x = scale_field(values, colormap)
    rgb = colorize(np.nan_to_num(x))
    rgb[np.isnan(x)] = 0
    rgb = rgb[::-1]
    h, w = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(rgb.tobytes())


def read_ppm(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    # header as written above: three newline-terminated lines
    lines = raw.split(b"\n", 3)
    if len(lines) < 4 or lines[0] != b"P6":
        raise FileFormatError("not a binary PPM")
    w, h = map(int, lines[1].split())
    return np.frombuffer(lines[3][: w * h * 3], np.uint8).reshape(h, w, 3)
