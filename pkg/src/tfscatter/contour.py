"""
Rectangular contour decomposition of the inverse Fourier integral.

With I(path) = int_path U(omega) e^{-i omega t} d omega, the rectangle with
corners W1, W2, W2 + i delta, W1 + i delta is traversed as

    Gamma_0   left to right on the real axis,
    Gamma_cR  bottom to top at Re omega = W2,
    Gamma_delta left to right at Im omega = delta,
    Gamma_cL  top to bottom at Re omega = W1,

so Cauchy's theorem gives I_0 = I_delta - I_cR - I_cL whenever U is analytic
on the closed rectangle.  The vertical pieces are smooth, non-oscillatory
integrals in v = Im omega and are done by Gauss-Legendre quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._numeric import matmul

TAU_MACH = 1024
MIN_NODES = 20
MAX_NODES = 150


class ContourError(ValueError):
    """Invalid rectangle or non-finite segment data."""


def delta_limit(T):
    """
    Largest admissible rectangle height for horizon T, L(T) = 1024 ln 2/(150 T).

    It keeps every growth factor e^{v t}, v <= delta, t <= T, below
    2^(1024/150), far from overflow.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    return TAU_MACH * math.log(2) / (150 * T)


def default_delta(T):
    """min(0.8 L(T), 0.025)."""
    return min(0.8 * delta_limit(T), 0.025)


def _check_delta(delta, T):
    if delta < 0:
        raise ContourError("delta must be >= 0")
    # small slack so that delta = delta_limit(T) itself is admissible
    if delta > delta_limit(T) * (1 + 1e-12):
        raise ContourError(
            f"delta = {delta:g} exceeds delta_limit(T = {T:g}) = {delta_limit(T):.6g}")


def correction_node_count(delta, T):
    """n_c = clamp(20 + ceil(2 delta T), 20, 150)."""
    _check_delta(delta, T)
    return int(min(max(MIN_NODES + math.ceil(2 * delta * T), MIN_NODES), MAX_NODES))


@dataclass(frozen=True)
class ContourSpec:
    """Rectangle [W1, W2] x [0, delta] valid for times up to T."""

    W1: float
    W2: float
    delta: float
    T: float

    def __post_init__(self):
        if not self.W2 > self.W1:
            raise ContourError("need W2 > W1")
        if not self.T > 0:
            raise ContourError("T must be positive")
        _check_delta(self.delta, self.T)


@dataclass(frozen=True, eq=False)
class CorrectionRule:
    """
    Gauss-Legendre rule on [0, delta] for one vertical side.

    ``omega`` gives the complex frequencies W_side + i v_q where the field
    must be sampled.
    """

    side: str
    W_side: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_c(self):
        return self.nodes.size

    @property
    def omega(self):
        return self.W_side + 1j * self.nodes

    @property
    def sign(self):
        # bottom-to-top on the right, top-to-bottom on the left
        return 1.0 if self.side == "right" else -1.0


def correction_rule(side, spec: ContourSpec, n_c=None):
    """Rule for ``side`` in {"left", "right"}; n_c defaults to :func:`correction_node_count`."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if n_c is None:
        n_c = correction_node_count(spec.delta, spec.T)
    if n_c < 1:
        raise ValueError("n_c must be >= 1")
    x, w = leggauss(n_c)
    h = 0.5 * spec.delta
    W = spec.W2 if side == "right" else spec.W1
    return CorrectionRule(side, W, h * (x + 1), h * w)


def correction_term(U_segment, rule: CorrectionRule, t):
    """
    I_c,side(t) = sign * i e^{-i W_side t} sum_q mu_q U(W_side + i v_q) e^{v_q t}.

    Parameters
    ----------
    U_segment : array_like, shape (..., n_c)
        Samples at ``rule.omega``; leading axes index targets.
    t : float or array_like
        Times.

    Returns
    -------
    ndarray, shape (..., len(t)) (scalar t drops the last axis)
    """
    U = np.asarray(U_segment, dtype=complex)
    if U.shape[-1] != rule.n_c:
        raise ContourError(f"expected {rule.n_c} segment samples, got {U.shape[-1]}")
    bad = ~np.isfinite(U)
    if np.any(bad):
        q = np.argwhere(bad)[0][-1]
        raise ContourError(f"non-finite segment sample at omega = {rule.omega[q]}")
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if rule.n_c == 0 or not np.any(rule.weights):
        out = np.zeros(U.shape[:-1] + tt.shape, dtype=complex)
    else:
        E = rule.weights[:, None] * np.exp(np.outer(rule.nodes, tt))
        out = rule.sign * 1j * np.exp(-1j * rule.W_side * tt) * matmul(U, E)
    return out if np.ndim(t) else out[..., 0]


def contour_assemble(I_delta, I_cL, I_cR):
    """I_0 = I_delta - I_cR - I_cL."""
    return I_delta - I_cR - I_cL
