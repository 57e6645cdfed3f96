"""
Geometry-only product-integration tables for the kernel-split Nystrom scheme.

Every layer-potential kernel used here splits as

    k(x, y) = DL(x, y) + K_L(x, y) log|x - y| + K_S(x, y),

with DL the Laplace double-layer kernel (frequency independent), K_L and K_S
smooth.  For a target x close to a panel, the panel's Gauss-Legendre rule is
exact neither for log|x - y| nor for DL, so both are integrated against the
panel's Lagrange basis by adaptive, dyadically graded Gauss-Legendre
quadrature on the exact parametrization.  The results depend only on the
geometry and are reused for every frequency.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.spatial import cKDTree

from ._numeric import lagrange_basis

NEAR_FACTOR = 0.7       # panel is near when dist(target, nodes) < NEAR_FACTOR * panel length
FINE_FACTOR = 1.0       # fine interval accepted when dist >= FINE_FACTOR * its length
FINE_NODES = 12
MAX_DEPTH = 40
_CHUNK = 4000


@dataclass(frozen=True)
class NearTable:
    """
    Sparse correction data for (target, source node) pairs.

    Attributes
    ----------
    target, source : ndarray of int
        Entry indices.
    r : ndarray
        |x_target - y_source|; zero on self entries.
    g : ndarray
        nu(y_source) . (x_target - y_source) / r; zero on self entries.
    log_coef : ndarray
        Product weight of log|x - y| minus the naive weight times log r.
    dl_coef : ndarray
        Product weight of the Laplace double layer minus its naive value.
    is_self : ndarray of bool
        Entries with coincident target and source.
    """

    target: np.ndarray
    source: np.ndarray
    r: np.ndarray
    g: np.ndarray
    log_coef: np.ndarray
    dl_coef: np.ndarray
    is_self: np.ndarray

    @property
    def size(self):
        return self.target.size


def near_pairs(bdy, xt, factor=NEAR_FACTOR):
    """(target, panel) pairs with a target closer than ``factor`` panel lengths to a panel node."""
    p = bdy.nodes_per_panel
    zz = bdy.z.reshape(-1, p)
    length = bdy.panel_length
    tree = cKDTree(np.c_[xt.real, xt.imag])
    cand = tree.query_ball_point(np.c_[bdy.panel_center.real, bdy.panel_center.imag],
                                 bdy.panel_radius + factor * length)
    tgt, pan = [], []
    for k, c in enumerate(cand):
        if not c:
            continue
        c = np.asarray(c)
        d = np.abs(xt[c, None] - zz[k]).min(axis=1)
        c = c[d < factor * length[k]]
        tgt.append(c)
        pan.append(np.full(c.size, k))
    if not tgt:
        return np.zeros(0, int), np.zeros(0, int)
    tgt = np.concatenate(tgt)
    pan = np.concatenate(pan)
    order = np.lexsort((pan, tgt))
    return tgt[order], pan[order]


def product_moments(bdy, xt, panel, want_dl, rho=FINE_FACTOR, q=FINE_NODES, max_depth=MAX_DEPTH):
    """
    Integrate log|x - y| and the Laplace double layer against each basis function of a panel.

    Parameters
    ----------
    bdy : DiscretizedBoundary
    xt : ndarray of complex
        One target per pair.
    panel : ndarray of int
        One panel per pair.
    want_dl : ndarray of bool
        Pairs for which the double-layer moments are needed.

    Returns
    -------
    A, C : ndarray, shape (npairs, nodes_per_panel)
        Log and double-layer moments.
    """
    p = bdy.nodes_per_panel
    xq, wq = leggauss(q)
    xref, _ = bdy.reference_rule
    npair = xt.size
    A = np.zeros((npair, p))
    C = np.zeros((npair, p))
    pid = np.arange(npair)
    lo = -np.ones(npair)
    hi = np.ones(npair)
    depth = np.zeros(npair, dtype=int)
    # below this length positions are not resolved in double precision
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.abs(bdy.z).max()))
    while pid.size:
        half = 0.5 * (hi - lo)
        s = 0.5 * (hi + lo)[:, None] + half[:, None] * xq
        g, dg = bdy.panel_points(panel[pid], s)
        diff = xt[pid, None] - g
        r = np.maximum(np.abs(diff), 1e-300)
        speed = np.abs(dg)
        wf = wq * half[:, None] * speed
        seg = wf.sum(axis=1)
        split = (r.min(axis=1) < rho * seg) & (depth < max_depth) & (seg > floor)
        acc = np.flatnonzero(~split)
        if acc.size:
            basis = lagrange_basis(xref, s[acc]).reshape(acc.size, q, p)
            np.add.at(A, pid[acc], np.einsum("kq,kqp->kp", wf[acc] * np.log(r[acc]), basis))
            dl_rows = acc[want_dl[pid[acc]]]
            if dl_rows.size:
                nu = -1j * dg[dl_rows] / speed[dl_rows]
                dl = wf[dl_rows] * np.real(np.conj(nu) * diff[dl_rows]) / (2 * math.pi * r[dl_rows] ** 2)
                bsel = basis[want_dl[pid[acc]]]
                np.add.at(C, pid[dl_rows], np.einsum("kq,kqp->kp", dl, bsel))
        sp = np.flatnonzero(split)
        mid = 0.5 * (lo[sp] + hi[sp])
        pid = np.r_[pid[sp], pid[sp]]
        lo, hi = np.r_[lo[sp], mid], np.r_[mid, hi[sp]]
        depth = np.r_[depth[sp], depth[sp]] + 1
    return A, C


def build_near_table(bdy, xt, target_panel=None, factor=NEAR_FACTOR):
    """
    Correction table for targets ``xt``.

    Parameters
    ----------
    bdy : DiscretizedBoundary
    xt : ndarray of complex
        Target positions.
    target_panel : ndarray of int, optional
        For on-curve targets (the boundary nodes themselves) the panel
        containing each target; -1 or None for off-curve targets.

    Returns
    -------
    NearTable
    """
    xt = np.asarray(xt, dtype=complex).ravel()
    p = bdy.nodes_per_panel
    on_curve = target_panel is not None
    tgt, pan = near_pairs(bdy, xt, factor)
    if on_curve:
        own = np.asarray(target_panel)[tgt]
        smooth_prev = ~bdy.panel_corner_start[own]
        smooth_next = ~bdy.panel_corner_start[bdy.panel_next[own]]
        # same analytic piece of curve: the Laplace double layer is smooth there
        local = (pan == own) | ((pan == bdy.panel_prev[own]) & smooth_prev) | \
                ((pan == bdy.panel_next[own]) & smooth_next)
    else:
        own = np.full(tgt.size, -1)
        local = np.zeros(tgt.size, dtype=bool)
    want_dl = ~local

    A = np.empty((tgt.size, p))
    C = np.empty((tgt.size, p))
    for s in range(0, tgt.size, _CHUNK):
        sl = slice(s, s + _CHUNK)
        A[sl], C[sl] = product_moments(bdy, xt[tgt[sl]], pan[sl], want_dl[sl])

    # expand to (target, source node) entries
    src = (pan[:, None] * p + np.arange(p)).ravel()
    trg = np.repeat(tgt, p)
    dl_wanted = np.repeat(want_dl, p)
    diff = xt[trg] - bdy.z[src]
    r = np.abs(diff)
    is_self = np.zeros(src.size, dtype=bool)
    if on_curve:
        is_self = src == trg
    rs = np.where(is_self, 1.0, r)
    g = np.where(is_self, 0.0, np.real(np.conj(bdy.normal[src]) * diff) / rs)
    w = bdy.weights[src]
    log_coef = A.ravel() - np.where(is_self, 0.0, w * np.log(rs))
    dl_naive = w * g / (2 * math.pi * rs)
    dl_coef = np.where(dl_wanted, C.ravel() - dl_naive, 0.0)
    dl_coef = np.where(is_self, w * bdy.dl_limit[src], dl_coef)
    r = np.where(is_self, 0.0, r)
    return NearTable(trg, src, r, g, log_coef, dl_coef, is_self)
