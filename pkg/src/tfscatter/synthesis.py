"""
From frequency samples to time values.

Samples of U(x, omega + i delta) at omega_l = W1 + P (l-1)/(2m+1) give the
trigonometric coefficients

    c_j = (1/(2m+1)) sum_l U(omega_l + i delta) e^{-2 pi i j (l-1)/(2m+1)},   |j| <= m,

approximating int_0^1 U(P y + W1 + i delta) e^{-2 pi i j y} dy.  Because the
damped field e^{-delta t} u(t) is causal, the band-limited inverse transform
is the sinc series

    u_m(t) = (P/2 pi) e^{-i t (P/2 + W1)} e^{delta t}
             sum_{j=1}^m (-1)^j c_j sinc(P t/(2 pi) - j),

with sinc(x) = sin(pi x)/(pi x).  The normalization is pinned by the closed
form of the band-limited surrogate U = e^{i omega t0}.

All transforms here are direct sums (O(N m) per target); a fast sinc
transform would slot in behind :func:`sinc_synthesize`.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._numeric import matmul
from .incident import Band

logger = logging.getLogger(__name__)

NORMALIZATION = "dft/(2m+1); c_j ~ int_0^1 U(Py+W1) e^{-2 pi i j y} dy; u = (P/2pi) sum (-1)^j c_j sinc"
OVERFLOW_EXPONENT = 600.0
CAUSALITY_TOL = 1e-6


class SynthesisError(ValueError):
    """Invalid synthesis request (e.g. exponential overflow)."""


class OracleError(RuntimeError):
    """Adaptive time oracle failed to converge."""

    def __init__(self, msg, estimate):
        super().__init__(msg)
        self.estimate = estimate


@dataclass(frozen=True, eq=False)
class FrequencyField:
    """Samples U(x_k, omega_l + i delta); rows are targets, columns frequencies."""

    samples: np.ndarray
    band: Band
    delta: float = 0.0

    def __post_init__(self):
        s = np.atleast_2d(self.samples)
        object.__setattr__(self, "samples", s)
        if s.shape[1] != self.band.num_samples:
            raise ValueError(f"expected {self.band.num_samples} columns, got {s.shape[1]}")


@dataclass(frozen=True, eq=False)
class SincExpansion:
    """
    Coefficients c_j(x_k), j = -m..m (column j + m), plus band metadata.

    ``resolved`` is False when adaptive truncation hit its cap.
    """

    coeffs: np.ndarray
    band: Band
    delta: float = 0.0
    normalization: str = NORMALIZATION
    resolved: bool = True

    @property
    def m(self):
        return self.band.m

    def coefficient(self, j):
        """Column of c_j for all targets."""
        return self.coeffs[:, j + self.m]

    def causality_ratio(self):
        """max_{j<=0}|c_j| / max_j|c_j| per target (zero for an exactly causal field)."""
        a = np.abs(self.coeffs)
        peak = a.max(axis=1)
        neg = a[:, : self.m + 1].max(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(peak > 0, neg / peak, 0.0)


def coeffs_from_samples(field: FrequencyField) -> SincExpansion:
    """FFT of each row divided by 2m+1, reordered to j = -m..m."""
    n = field.band.num_samples
    c = np.fft.fft(field.samples, axis=1) / n
    c = np.fft.fftshift(c, axes=1)
    exp = SincExpansion(c, field.band, field.delta)
    ratio = exp.causality_ratio()
    if np.any(ratio > CAUSALITY_TOL):
        logger.debug("causality diagnostic: max_{j<=0}|c_j|/max|c_j| = %.2e", float(ratio.max()))
    return exp


def sinc_matrix(band, delta, times):
    """
    Matrix S with u = c[:, 1..m] @ S.T, including the phase and growth factors.

    Shape (len(times), m).
    """
    t = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(t)):
        raise SynthesisError("times must be finite")
    if t.size and delta * np.abs(t).max() > OVERFLOW_EXPONENT:
        raise SynthesisError(
            f"delta * max(t) = {delta * np.abs(t).max():.1f} exceeds {OVERFLOW_EXPONENT:g}; "
            "choose delta below contour.delta_limit(T)")
    P, W1, m = band.P, band.W1, band.m
    j = np.arange(1, m + 1)
    S = np.sinc(P * t[:, None] / (2 * math.pi) - j) * np.where(j % 2, -1.0, 1.0)
    pre = (P / (2 * math.pi)) * np.exp(-1j * t * (P / 2 + W1) + delta * t)
    return S * pre[:, None]


def sinc_synthesize(exp: SincExpansion, times) -> np.ndarray:
    """
    Evaluate the truncated (damped) sinc series at arbitrary times.

    Returns
    -------
    ndarray, shape (targets, len(times))
    """
    S = sinc_matrix(exp.band, exp.delta, times)
    return matmul(exp.coeffs[:, exp.m + 1:], S.T)


def sinc_point(exp: SincExpansion, k, t):
    """Scalar evaluation of one target at one time by an explicit loop (audit path)."""
    P, W1, m = exp.band.P, exp.band.W1, exp.band.m
    acc = 0.0j
    x = P * t / (2 * math.pi)
    for j in range(1, m + 1):
        acc += (-1) ** j * exp.coeffs[k, m + j] * float(np.sinc(x - j))
    return (P / (2 * math.pi)) * np.exp(-1j * t * (P / 2 + W1) + exp.delta * t) * acc


def gl_rule(band, n):
    """Gauss-Legendre nodes and weights on [W1, W2]."""
    x, w = leggauss(n)
    h = 0.5 * band.P
    return band.W1 + h * (x + 1), h * w


def gl_synthesis(U_at_gl_nodes, gl_weights, gl_nodes, times):
    """
    Direct type-III sum (1/2 pi) sum_l eta_l U(omega_l) e^{-i omega_l t}.

    Returns
    -------
    ndarray, shape (targets, len(times))
    """
    U = np.atleast_2d(U_at_gl_nodes)
    t = np.asarray(times, dtype=float)
    E = np.exp(-1j * np.outer(np.asarray(gl_nodes), t)) * np.asarray(gl_weights)[:, None]
    return matmul(U, E) / (2 * math.pi)


def _chop_tail(exp):
    a = np.abs(exp.coeffs)
    m = exp.m
    j = np.arange(-m, m + 1)
    # positive tail beyond 0.9 m, plus the far negative indices where aliased
    # energy from j > m lands
    tail = a[:, (j > 0.9 * m) | (j < -0.1 * m)]
    return float(tail.max()) if tail.size else 0.0, float(a.max())


def adaptive_m(field_sampler, eps_chop=1e-8, m_max=4096, m_start=64):
    """
    Double m from ``m_start`` until the coefficient tail is below ``eps_chop`` times the peak.

    Parameters
    ----------
    field_sampler : callable
        ``field_sampler(m) -> FrequencyField``.  Grids for successive m do not
        nest, so each doubling costs a full new set of samples.

    Returns
    -------
    SincExpansion
        With ``resolved=False`` if the cap ``m_max`` was reached first.
    """
    if m_max < 16:
        raise ValueError("m_max must be >= 16")
    m = min(m_start, m_max)
    while True:
        exp = coeffs_from_samples(field_sampler(m))
        tail, peak = _chop_tail(exp)
        if peak == 0 or tail <= eps_chop * peak:
            return exp
        if 2 * m > m_max:
            logger.warning("adaptive m unresolved at m = %d (tail/peak = %.2e)", m, tail / peak)
            return replace(exp, resolved=False)
        m *= 2


# ---------------------------------------------------------------------------
# time oracle
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

KRONROD_NODES = np.r_[-_XGK[:-1], _XGK[::-1]]
KRONROD_WEIGHTS = np.r_[_WGK[:-1], _WGK[::-1]]
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:14:2] = np.r_[_WG[:-1], _WG[::-1]]


def gauss_kronrod(f, a, b, tol, max_intervals=200000, initial=None):
    """
    Globally adaptive G7-K15 quadrature of a vectorized, possibly vector-valued f.

    ``f(omega)`` takes a 1-D array and returns an array of shape (..., len(omega)).
    Intervals are bisected until each local error estimate is below
    ``tol * length / (b - a)`` or has reached the roundoff level of the
    interval's contribution.
    """
    edges = np.linspace(a, b, (initial or 1) + 1)
    lo, hi = edges[:-1], edges[1:]
    total = 0.0
    while lo.size:
        if lo.size > max_intervals:
            raise OracleError(f"time oracle exceeded {max_intervals} intervals", total)
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        x = (mid[:, None] + h[:, None] * KRONROD_NODES).ravel()
        fx = np.asarray(f(x))
        fx = fx.reshape(fx.shape[:-1] + (lo.size, 15))
        k = (fx * KRONROD_WEIGHTS).sum(axis=-1) * h
        g = (fx * GAUSS_WEIGHTS).sum(axis=-1) * h
        err = np.abs(k - g).reshape(-1, lo.size).max(axis=0)
        # roundoff floor: the estimate cannot drop below a few ulps of int |f|
        mag = ((np.abs(fx) * KRONROD_WEIGHTS).sum(axis=-1) * h).reshape(-1, lo.size).max(axis=0)
        ok = err <= np.maximum(tol * (2 * h) / (b - a), 50 * np.finfo(float).eps * mag)
        total = total + k[..., ok].sum(axis=-1)
        bad = ~ok
        if np.any(bad) and np.any(h[bad] < 1e-15 * max(abs(a), abs(b), 1.0)):
            raise OracleError("time oracle interval underflow", total + k[..., bad].sum(axis=-1))
        lo, hi = np.r_[lo[bad], mid[bad]], np.r_[mid[bad], hi[bad]]
    return total


def time_oracle(U_callable, t, tol, W1, W2):
    """
    Reference value of (1/2 pi) int_{W1}^{W2} U(omega) e^{-i omega t} d omega.

    The band is pre-split so each initial interval spans at most 1.5
    oscillation periods 2 pi/|t| (at least 10 points per period), then
    refined adaptively.  Cost grows linearly in |t|; for validation only.
    """
    period = 2 * math.pi / max(abs(t), 1e-300)
    pieces = max(1, int(math.ceil((W2 - W1) / (1.5 * period))))

    def f(w):
        return np.asarray(U_callable(w)) * np.exp(-1j * w * t)

    return gauss_kronrod(f, W1, W2, 2 * math.pi * tol, initial=pieces) / (2 * math.pi)
