"""
Scatterer boundaries: parametric gallery, panel discretization, membership.

Curves are stored in the complex plane.  Every component is oriented
counterclockwise around the scatterer material, so the unit normal
``-1j * tangent`` points away from the material into the exterior domain.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.spatial import cKDTree

from ._numeric import differentiation_matrix, matmul

logger = logging.getLogger(__name__)

GALLERY = ("disk", "c_curve", "crescents", "keyhole", "radiator")


class GeometryError(ValueError):
    """Invalid gallery name or parameters producing a bad curve."""


# ---------------------------------------------------------------------------
# curve representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """
    Smooth parametric map t -> gamma(t) on [a, b] with its derivative.

    ``corner_start`` marks a non-smooth joint with the previous piece of the
    same component.
    """

    fn: Callable
    dfn: Callable
    a: float
    b: float
    corner_start: bool = False
    label: str = ""

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self.dfn(np.asarray(t, dtype=float))

    def start(self):
        return complex(self.fn(np.array([self.a]))[0])

    def end(self):
        return complex(self.fn(np.array([self.b]))[0])

    def reversed(self):
        a, b, fn, dfn = self.a, self.b, self.fn, self.dfn
        return Piece(lambda t: fn(a + b - t), lambda t: -dfn(a + b - t), a, b, False, self.label)

    def transformed(self, scale, shift=0.0):
        fn, dfn = self.fn, self.dfn
        return Piece(lambda t: scale * fn(t) + shift, lambda t: scale * dfn(t),
                     self.a, self.b, self.corner_start, self.label)

    def arclength(self, panels=64):
        x, w = leggauss(16)
        edges = np.linspace(self.a, self.b, panels + 1)
        h = 0.5 * np.diff(edges)
        t = (0.5 * (edges[:-1] + edges[1:]))[:, None] + h[:, None] * x
        return float(np.sum(np.abs(self.dfn(t)) * w * h[:, None]))


def _reverse_component(pieces):
    """Reverse the traversal of a closed loop, moving corner flags to the new joints."""
    n = len(pieces)
    rev = [p.reversed() for p in reversed(pieces)]
    # new piece k is old piece n-1-k; its start joint is the old end joint of
    # piece n-1-k, i.e. the start joint of old piece n-k (mod n)
    flags = [pieces[(n - k) % n].corner_start for k in range(n)]
    return tuple(Piece(p.fn, p.dfn, p.a, p.b, f, p.label) for p, f in zip(rev, flags))


@dataclass(frozen=True)
class BoundaryCurve:
    """
    Closed, possibly multiply-connected scatterer boundary.

    Attributes
    ----------
    components : tuple of tuple of Piece
        Closed loops, each oriented counterclockwise around the material.
    name : str
        Gallery identifier.
    params : dict
        Parameters used to build the curve.
    reoriented : tuple of bool
        True for components whose raw parametrization was reversed to obtain
        the counterclockwise orientation.
    """

    components: tuple
    name: str = "custom"
    params: dict = field(default_factory=dict)
    reoriented: tuple = ()

    @property
    def pieces(self):
        return [p for comp in self.components for p in comp]

    @property
    def corners(self):
        """Corner points, from the piece structure."""
        return [p.start() for comp in self.components for p in comp if p.corner_start]

    @property
    def n_corners(self):
        return len(self.corners)

    def arclength(self):
        return sum(p.arclength() for p in self.pieces)

    def sample(self, n=2048):
        """Dense sampling of each component, exactly ``n`` points in total, spaced by arclength."""
        plen = [np.array([p.arclength() for p in comp]) for comp in self.components]
        flat = np.concatenate(plen)
        if n < 2 * flat.size:
            raise ValueError(f"need at least {2 * flat.size} points for {flat.size} pieces")
        share = 2 + (n - 2 * flat.size) * flat / flat.sum()
        counts = np.floor(share).astype(int)
        # largest remainders take the leftover points
        counts[np.argsort(counts - share)[: n - counts.sum()]] += 1
        out, k = [], 0
        for comp in self.components:
            pts = []
            for p in comp:
                pts.append(p(np.linspace(p.a, p.b, counts[k], endpoint=False)))
                k += 1
            out.append(np.concatenate(pts))
        return out

    def diameter(self):
        pts = np.concatenate(self.sample(1024))
        return float(np.ptp(pts.real) ** 2 + np.ptp(pts.imag) ** 2) ** 0.5

    def signed_areas(self):
        x, w = leggauss(32)
        areas = []
        for comp in self.components:
            a = 0.0
            for p in comp:
                edges = np.linspace(p.a, p.b, 65)
                h = 0.5 * np.diff(edges)
                t = (0.5 * (edges[:-1] + edges[1:]))[:, None] + h[:, None] * x
                g = p.fn(t)
                a += 0.5 * float(np.sum(np.imag(np.conj(g) * p.dfn(t)) * w * h[:, None]))
            areas.append(a)
        return areas


def _normalized(components, name, params):
    """Orient components counterclockwise and validate the result."""
    comps = [tuple(c) for c in components]
    curve = BoundaryCurve(tuple(comps), name, dict(params))
    flags = []
    out = []
    for comp, area in zip(comps, curve.signed_areas()):
        if area < 0:
            out.append(_reverse_component(comp))
            flags.append(True)
        else:
            out.append(comp)
            flags.append(False)
    curve = BoundaryCurve(tuple(out), name, dict(params), tuple(flags))
    validate_curve(curve)
    return curve


def validate_curve(curve, samples_per_piece=256):
    """
    Check closure, non-degeneracy and (heuristically) simplicity.

    Raises
    ------
    GeometryError
        With a diagnostic naming the first failed check.
    """
    diam = curve.diameter()
    if not np.isfinite(diam) or diam <= 0:
        raise GeometryError("degenerate curve (zero or non-finite extent)")
    segs_a, segs_b, owner = [], [], []
    for ci, comp in enumerate(curve.components):
        for k, p in enumerate(comp):
            nxt = comp[(k + 1) % len(comp)]
            gap = abs(p.end() - nxt.start())
            if gap > 1e-12 * diam:
                raise GeometryError(f"component {ci}: piece {k} ends {gap:.3e} away from the next piece")
            t = np.linspace(p.a, p.b, samples_per_piece + 1)
            speed = np.abs(p.dfn(0.5 * (t[:-1] + t[1:])))
            if not np.all(np.isfinite(speed)) or speed.min() <= 1e-10 * diam / (p.b - p.a):
                raise GeometryError(f"component {ci}: piece {k} has a degenerate parametrization")
            g = p.fn(t)
            if not np.all(np.isfinite(g)):
                raise GeometryError(f"component {ci}: piece {k} is not finite")
            segs_a.append(g[:-1])
            segs_b.append(g[1:])
            owner.append(np.full(samples_per_piece, ci))
    a = np.concatenate(segs_a)
    b = np.concatenate(segs_b)
    comp_id = np.concatenate(owner)
    idx = np.arange(a.size)
    # segment neighbours within each closed loop
    starts = np.r_[0, np.flatnonzero(np.diff(comp_id)) + 1]
    ends = np.r_[starts[1:], a.size]
    prev_idx = idx - 1
    next_idx = idx + 1
    for s, e in zip(starts, ends):
        prev_idx[s] = e - 1
        next_idx[e - 1] = s
    mid = 0.5 * (a + b)
    seglen = np.abs(b - a)
    tree = cKDTree(np.c_[mid.real, mid.imag])
    pairs = tree.query_pairs(seglen.max() * 1.01, output_type="ndarray")
    if pairs.size:
        i, j = pairs[:, 0], pairs[:, 1]
        keep = (j != next_idx[i]) & (j != prev_idx[i]) & (j != i)
        i, j = i[keep], j[keep]
        if i.size:
            hit = _segments_intersect(a[i], b[i], a[j], b[j])
            if np.any(hit):
                k = np.flatnonzero(hit)[0]
                raise GeometryError(f"self-intersection near {complex(a[i[k]]):.4g}")
    return True


def _segments_intersect(p1, p2, q1, q2):
    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    d1 = cross(p2 - p1, q1 - p1)
    d2 = cross(p2 - p1, q2 - p1)
    d3 = cross(q2 - q1, p1 - q1)
    d4 = cross(q2 - q1, p2 - q1)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


# ---------------------------------------------------------------------------
# gallery
# ---------------------------------------------------------------------------

def _line(a, b, scale=1.0):
    # l(t) = a + t/(2pi) * 4 * (b - a), t in [0, pi/2]
    return (lambda t: a + scale * t * (b - a),
            lambda t: scale * (b - a) + 0 * t)


def _arc(a, b, scale=1.0):
    # circ(s) = a^{1-s} b^s with principal logarithms, s = scale * t
    la, lb = np.log(a), np.log(b)
    d = lb - la
    return (lambda t: np.exp(la + scale * t * d),
            lambda t: scale * d * np.exp(la + scale * t * d))


def _disk(radius=1.0, center=(0.0, 0.0)):
    if radius <= 0:
        raise GeometryError("disk radius must be positive")
    c = complex(*center)
    piece = Piece(lambda t: c + radius * np.exp(1j * t),
                  lambda t: 1j * radius * np.exp(1j * t), 0.0, 2 * math.pi, label="circle")
    return [[piece]]


def _c_curve(a=3.0, b=2.8, c=0.1, d=1.0):
    if d <= 0 or c < 0 or c >= 3:
        raise GeometryError("c_curve requires d > 0 and 0 <= c < 3")

    def fn(t):
        return d * np.exp(1j * b * np.sin(t)) * (3 + c * np.tanh(a * np.cos(t)))

    def dfn(t):
        th = np.tanh(a * np.cos(t))
        return d * np.exp(1j * b * np.sin(t)) * (
            1j * b * np.cos(t) * (3 + c * th) - a * c * np.sin(t) * (1 - th * th))

    return [[Piece(fn, dfn, 0.0, 2 * math.pi, label="c_curve")]]


def _crescents(r=5.0, a1=0.24, a2=0.9, d=3.0, offset=(0.0, 1.0), theta=math.pi / 2):
    if r <= 0 or a2 <= a1 or a1 < 0:
        raise GeometryError("crescents require r > 0 and 0 <= a1 < a2")
    rot = r * np.exp(1j * theta)
    p = complex(*offset)

    def cres(t):
        e = np.exp(-2j * t)
        return e - a1 / (e + a2) + d / 2

    def dcres(t):
        e = np.exp(-2j * t)
        de = -2j * e
        return de + a1 * de / (e + a2) ** 2

    one = Piece(lambda t: rot * (cres(t) + p), lambda t: rot * dcres(t), 0.0, math.pi, label="crescent1")
    two = Piece(lambda t: -rot * cres(math.pi + t), lambda t: -rot * dcres(math.pi + t),
                0.0, math.pi, label="crescent2")
    return [[one], [two]]


def _keyhole(R=3.0, r=2.0, e=0.3, theta=math.pi):
    if not (R > r > 0 and e > 0):
        raise GeometryError("keyhole requires R > r > 0 and e > 0")
    if e >= r:
        raise GeometryError("keyhole requires e < r")
    c = [-R + e * 1j, -r + e * 1j, -r - e * 1j, -R - e * 1j]
    rot = np.exp(1j * (math.pi + theta))
    scale = 4 / (2 * math.pi)
    pieces = []
    for k in range(4):
        a, b = c[k], c[(k + 1) % 4]
        fn, dfn = (_line if k % 2 == 0 else _arc)(a, b, scale)
        pieces.append(Piece(fn, dfn, 0.0, math.pi / 2, corner_start=True,
                            label="line" if k % 2 == 0 else "arc").transformed(rot))
    return [pieces]


def _radiator(r=1.5, R=5.0, e=0.8, outr=0.8, deltatheta=0.15, n=5, Btheta=5 * math.pi / 4):
    if not (R > r > 0 and e > 0 and outr > 0 and n >= 1):
        raise GeometryError("radiator requires R > r > 0, e > 0, outr > 0, n >= 1")
    if e >= r:
        raise GeometryError("radiator requires e < r")
    slots = n + 1
    # petal angles 2 pi k/(n+1), those >= pi first; the petal at exactly pi
    # (2k = n+1) is dropped with an exact test on k
    ks = [k for k in range(slots) if 2 * k >= slots] + [k for k in range(slots) if 2 * k < slots]
    ks = [k for k in ks if 2 * k != slots]
    thetas = [2 * math.pi * k / slots for k in ks]
    centers = [(R + r) / 2 * np.exp(1j * th) for th in thetas]

    c = [-R - e * 1j, -r - e * 1j]
    for th, cent in zip(thetas, centers):
        c += [r * np.exp(1j * (th - deltatheta)),
              cent + outr * np.exp(1j * (th + r / outr * deltatheta + math.pi)),
              cent + outr * np.exp(1j * (th - r / outr * deltatheta + math.pi)),
              r * np.exp(1j * (th + deltatheta))]
    c += [-r + e * 1j, -R + e * 1j]
    span = 2 * math.pi / len(c)

    def line(c1, c2):
        fn, dfn = _line(c1, c2, 1.0 / span)
        return Piece(fn, dfn, 0.0, span, True, "line")

    def circ1(c1, c2):
        fn, dfn = _arc(c1, c2, 1.0 / span)
        return Piece(fn, dfn, 0.0, span, True, "arc")

    def circ2(cent, a1, a2):
        def fn(t):
            return cent + outr * np.exp(1j * ((1 - t / span) * a1 + (t / span) * a2))

        def dfn(t):
            return 1j * (a2 - a1) / span * outr * np.exp(1j * ((1 - t / span) * a1 + (t / span) * a2))

        return Piece(fn, dfn, 0.0, span, True, "cap")

    pieces = [line(c[0], c[1])]
    for k, cent in enumerate(centers):
        i = 1 + 4 * k       # zero-based position of the inner-arc start
        pieces.append(circ1(c[i], c[i + 1]))
        pieces.append(line(c[i + 1], c[i + 2]))
        a1 = np.angle(c[i + 2] - cent)
        a2 = np.angle(c[i + 3] - cent)
        if abs(a2 - a1) < math.pi:
            a2 += 2 * math.pi
        pieces.append(circ2(cent, a1, a2))
        pieces.append(line(c[i + 3], c[i + 4]))
    pieces.append(circ1(c[-3], c[-2]))
    pieces.append(line(c[-2], c[-1]))
    pieces.append(circ1(c[-1], c[0]))
    rot = np.exp(1j * (math.pi + Btheta))
    # gam(t) = rot * gam1(2 pi - t): rotate, then reverse the traversal
    return [_reverse_component([p.transformed(rot) for p in pieces])]


_BUILDERS = {
    "disk": _disk,
    "c_curve": _c_curve,
    "crescents": _crescents,
    "keyhole": _keyhole,
    "radiator": _radiator,
}


def build_scatterer(name, params=None):
    """
    Build a gallery boundary.

    Parameters
    ----------
    name : str
        One of ``GALLERY``.
    params : dict, optional
        Name-specific parameters; missing keys take the gallery defaults.

    Returns
    -------
    BoundaryCurve

    Raises
    ------
    GeometryError
        For an unknown name, bad parameters, or a self-intersecting or
        degenerate result.
    """
    if name not in _BUILDERS:
        raise GeometryError(f"unknown scatterer {name!r}; choose from {', '.join(GALLERY)}")
    params = dict(params or {})
    try:
        comps = _BUILDERS[name](**params)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for {name}: {exc}") from None
    return _normalized(comps, name, params)


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscretizedBoundary:
    """
    Composite Gauss-Legendre discretization of a BoundaryCurve.

    Node arrays have length n, panel arrays length n_panels; node ``i`` is
    reference node ``node_ref[i]`` of panel ``node_panel[i]``.
    """

    curve: BoundaryCurve
    nodes_per_panel: int
    z: np.ndarray              # complex node positions
    normal: np.ndarray         # unit normal, into the exterior domain
    weights: np.ndarray        # arclength quadrature weights
    dl_limit: np.ndarray       # diagonal limit of the Laplace double-layer kernel
    node_panel: np.ndarray
    node_ref: np.ndarray
    panel_piece: np.ndarray
    panel_component: np.ndarray
    panel_a: np.ndarray
    panel_b: np.ndarray
    panel_level: np.ndarray
    panel_prev: np.ndarray
    panel_next: np.ndarray
    panel_corner_start: np.ndarray   # joint with panel_prev is a corner
    scheme: str = "panel"

    @property
    def n(self):
        return self.z.size

    @property
    def n_panels(self):
        return self.panel_a.size

    @property
    def nodes(self):
        return np.c_[self.z.real, self.z.imag]

    @property
    def normals(self):
        return np.c_[self.normal.real, self.normal.imag]

    @cached_property
    def panel_length(self):
        return np.bincount(self.node_panel, self.weights, minlength=self.n_panels)

    @cached_property
    def panel_center(self):
        p = self.nodes_per_panel
        return self.z.reshape(-1, p).mean(axis=1)

    @cached_property
    def panel_radius(self):
        p = self.nodes_per_panel
        zz = self.z.reshape(-1, p)
        return np.abs(zz - self.panel_center[:, None]).max(axis=1)

    @cached_property
    def reference_rule(self):
        return leggauss(self.nodes_per_panel)

    def panel_points(self, panel, s):
        """Positions and parameter derivatives at reference coordinates ``s`` of ``panel``."""
        pieces = self.curve.pieces
        panel = np.asarray(panel)
        s = np.asarray(s, dtype=float)
        a = self.panel_a[panel]
        b = self.panel_b[panel]
        t = a[..., None] + 0.5 * (b - a)[..., None] * (s + 1)
        g = np.empty(t.shape, dtype=complex)
        dg = np.empty(t.shape, dtype=complex)
        pid = self.panel_piece[panel]
        for k in np.unique(pid):
            sel = pid == k
            g[sel] = pieces[k].fn(t[sel])
            dg[sel] = pieces[k].dfn(t[sel]) * (0.5 * (b - a)[sel])[..., None]
        return g, dg

    @cached_property
    def polygon(self):
        """Dense closed polylines per component for membership and distance queries."""
        s = np.linspace(-1.0, 1.0, 9)[:-1]
        loops = []
        for comp in range(len(self.curve.components)):
            sel = np.flatnonzero(self.panel_component == comp)
            order = _loop_order(sel, self.panel_next)
            g, _ = self.panel_points(order, np.broadcast_to(s, (order.size, s.size)))
            loops.append(g.ravel())
        return loops


def _loop_order(panels, nxt):
    start = panels.min()
    order = [start]
    k = nxt[start]
    while k != start:
        order.append(k)
        k = nxt[k]
    return np.array(order)


def _segment_length(piece, lo, hi):
    x, w = leggauss(16)
    h = 0.5 * (hi - lo)
    return float(np.sum(np.abs(piece.dfn(0.5 * (lo + hi) + h * x)) * w) * h)


def _split_piece(piece, count, depth, refine_start, refine_end, max_length=np.inf):
    """
    Parameter panels of one piece: ``count`` equal panels, dyadically refined toward corners.

    Panels longer than ``max_length`` in arclength are bisected in parameter,
    which matters for parametrizations with strongly varying speed.
    """
    edges = [piece.a]
    base = np.linspace(piece.a, piece.b, count + 1)
    for lo, hi in zip(base[:-1], base[1:]):
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            if _segment_length(piece, a, b) > max_length:
                stack += [(0.5 * (a + b), b), (a, 0.5 * (a + b))]
            else:
                edges.append(b)
    edges = np.array(edges)
    count = edges.size - 1
    if count == 1 and refine_start and refine_end and depth > 0:
        edges = np.array([piece.a, 0.5 * (piece.a + piece.b), piece.b])
    panels = [[lo, hi, 0] for lo, hi in zip(edges[:-1], edges[1:])]
    if depth > 0 and refine_start:
        lo, hi, _ = panels[0]
        cuts = [lo + (hi - lo) * 0.5 ** k for k in range(depth, -1, -1)]
        new = [[lo, cuts[0], depth]] + [[cuts[k], cuts[k + 1], depth - k] for k in range(depth)]
        panels = new + panels[1:]
    if depth > 0 and refine_end:
        lo, hi, _ = panels[-1]
        cuts = [hi - (hi - lo) * 0.5 ** k for k in range(0, depth + 1)]
        new = [[cuts[k], cuts[k + 1], k + 1] for k in range(depth)] + [[cuts[depth], hi, depth]]
        new[0][2] = max(new[0][2], 1)
        panels = panels[:-1] + new
    return panels


def discretize(curve, nodes_per_panel=16, base_panels=None, corner_depth=30):
    """
    Discretize a curve into composite Gauss-Legendre panels.

    Parameters
    ----------
    curve : BoundaryCurve
    nodes_per_panel : int
        Gauss-Legendre nodes per panel (>= 4).
    base_panels : int, optional
        Panels per curve before corner refinement, distributed over pieces in
        proportion to arclength (each piece gets at least one), equal in
        parameter, and bisected while longer than twice the mean panel
        length.  Defaults to one panel per unit of arclength, at least 8.
    corner_depth : int
        Number of dyadic splits of each panel touching a corner.

    Returns
    -------
    DiscretizedBoundary
    """
    if nodes_per_panel < 4:
        raise ValueError("nodes_per_panel must be >= 4")
    if corner_depth < 0:
        raise ValueError("corner_depth must be >= 0")
    pieces = curve.pieces
    lengths = np.array([p.arclength() for p in pieces])
    if base_panels is None:
        base_panels = max(8, int(math.ceil(lengths.sum())))
    counts = np.maximum(1, np.round(base_panels * lengths / lengths.sum()).astype(int))
    max_length = 2 * lengths.sum() / base_panels

    x, w = leggauss(nodes_per_panel)
    rows = []  # (piece, component, a, b, level)
    comp_of_piece = []
    corner_at_start = []
    gidx = 0
    comp_panels = []
    for ci, comp in enumerate(curve.components):
        first_row = len(rows)
        for k, p in enumerate(comp):
            nxt = comp[(k + 1) % len(comp)]
            depth = corner_depth
            split = _split_piece(p, int(counts[gidx]), depth, p.corner_start, nxt.corner_start, max_length)
            for j, (lo, hi, lev) in enumerate(split):
                rows.append((gidx, ci, lo, hi, lev))
                corner_at_start.append(bool(j == 0 and p.corner_start))
            comp_of_piece.append(ci)
            gidx += 1
        comp_panels.append((first_row, len(rows)))

    rows = np.array(rows, dtype=float)
    npan = rows.shape[0]
    panel_piece = rows[:, 0].astype(int)
    panel_component = rows[:, 1].astype(int)
    pa, pb = rows[:, 2], rows[:, 3]
    level = rows[:, 4].astype(int)
    prev = np.arange(npan) - 1
    nxt = np.arange(npan) + 1
    for lo, hi in comp_panels:
        prev[lo] = hi - 1
        nxt[hi - 1] = lo

    t = 0.5 * (pa + pb)[:, None] + 0.5 * (pb - pa)[:, None] * x
    z = np.empty(t.shape, dtype=complex)
    dz = np.empty(t.shape, dtype=complex)
    for k, p in enumerate(pieces):
        sel = panel_piece == k
        z[sel] = p.fn(t[sel])
        dz[sel] = p.dfn(t[sel]) * (0.5 * (pb - pa)[sel])[:, None]   # d gamma / d s_ref
    speed = np.abs(dz)
    tangent = dz / speed
    normal = -1j * tangent
    weights = w * speed
    # second derivative by spectral differentiation on each panel
    d2z = matmul(dz, differentiation_matrix(x).T)
    dl_limit = np.real(np.conj(normal) * d2z) / (4 * math.pi * speed ** 2)

    n = z.size
    arr = lambda a: _frozen(np.ascontiguousarray(a).ravel())
    return DiscretizedBoundary(
        curve=curve,
        nodes_per_panel=nodes_per_panel,
        z=arr(z),
        normal=arr(normal),
        weights=arr(weights),
        dl_limit=arr(dl_limit),
        node_panel=_frozen(np.repeat(np.arange(npan), nodes_per_panel)),
        node_ref=_frozen(np.tile(np.arange(nodes_per_panel), npan)),
        panel_piece=_frozen(panel_piece),
        panel_component=_frozen(panel_component),
        panel_a=_frozen(pa.copy()),
        panel_b=_frozen(pb.copy()),
        panel_level=_frozen(level),
        panel_prev=_frozen(prev),
        panel_next=_frozen(nxt),
        panel_corner_start=_frozen(np.array(corner_at_start)),
    ) if n else None


def _frozen(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def _winding(loops, pts, chunk=2048):
    total = np.zeros(pts.size)
    for loop in loops:
        a = loop
        b = np.roll(loop, -1)
        for s in range(0, pts.size, chunk):
            p = pts[s:s + chunk, None]
            # a point on a vertex gives inf/nan here; the caller marks it as boundary
            with np.errstate(divide="ignore", invalid="ignore"):
                total[s:s + chunk] += np.angle((b - p) / (a - p)).sum(axis=1)
    return total / (2 * math.pi)


def distance_to_boundary(bdy, pts, chunk=1024):
    """Distance from points to the dense boundary polyline."""
    pts = np.asarray(pts, dtype=complex).ravel()
    out = np.full(pts.size, np.inf)
    for loop in bdy.polygon:
        a = loop
        d = np.roll(loop, -1) - a
        dd = np.abs(d) ** 2
        for s in range(0, pts.size, chunk):
            p = pts[s:s + chunk, None]
            u = np.clip(np.real(np.conj(d) * (p - a)) / dd, 0.0, 1.0)
            out[s:s + chunk] = np.minimum(out[s:s + chunk], np.abs(p - a - u * d).min(axis=1))
    return out


def classify_points(bdy, pts, tol=1e-9):
    """
    Vectorized membership.

    Returns
    -------
    ndarray of int8
        1 inside the material, 0 in the exterior domain, -1 indeterminate
        (within ``tol`` of the boundary polyline).
    """
    pts = np.asarray(pts, dtype=complex).ravel()
    wind = _winding(bdy.polygon, pts)
    out = (np.abs(wind) > 0.5).astype(np.int8)
    near = distance_to_boundary(bdy, pts) < tol
    out[near] = -1
    return out


def contains(curve, point, resolution=None, tol=1e-9):
    """
    True iff ``point`` lies inside the scatterer material.

    Parameters
    ----------
    curve : BoundaryCurve or DiscretizedBoundary
    point : (2,) array_like or complex
    resolution : DiscretizedBoundary, optional
        Discretization whose polygon is used; built with defaults otherwise.

    Returns
    -------
    bool or None
        None signals an indeterminate point within ``tol`` of the boundary.
    """
    bdy = curve if isinstance(curve, DiscretizedBoundary) else (resolution or discretize(curve, corner_depth=0))
    p = complex(point) if np.ndim(point) == 0 else complex(point[0], point[1])
    flag = classify_points(bdy, np.array([p]), tol)[0]
    return None if flag < 0 else bool(flag)
