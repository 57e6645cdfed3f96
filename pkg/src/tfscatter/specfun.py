"""
Hankel functions of the first kind of orders 0 and 1.

Arguments are restricted to the closed first quadrant (Re z >= 0, Im z >= 0),
which is all the solver ever needs since kappa = (omega + i delta) / c with
omega, delta >= 0.  Three regimes are used:

* ``|z| <= SERIES_RADIUS``: ascending series for J and Y.
* ``SERIES_RADIUS < |z| < ASYMPTOTIC_RADIUS``: generalized Gauss-Laguerre
  quadrature of the Laplace-type integral

      H_nu(z) = sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} / Gamma(nu + 1/2)
                * int_0^inf e^{-u} u^{nu - 1/2} (1 + iu/(2z))^{nu - 1/2} du,

  which has no cancellation anywhere in the quadrant.
* ``|z| >= ASYMPTOTIC_RADIUS``: the Hankel asymptotic expansion.

The ascending series loses roughly ``(|z| + Im z) / ln 10`` digits along the
imaginary axis, which is why it is only used inside a small disk.
"""

import math
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy.special import roots_genlaguerre

from ._numeric import matmul

SERIES_RADIUS = 2.0
ASYMPTOTIC_RADIUS = 20.0
MIN_MODULUS = 1e-8
MAX_MODULUS = 1e4

EULER_GAMMA = 0.57721566490153286061
_TWO_OVER_PI = 2.0 / math.pi
_SQRT_PI = math.sqrt(math.pi)

# (upper modulus, node count) tiers for the Laguerre regime
_LAGUERRE_TIERS = ((2.5, 40), (3.0, 30), (4.0, 24), (6.0, 20), (8.0, 14), (ASYMPTOTIC_RADIUS, 12))


def _laguerre_tables():
    nmax = max(n for _, n in _LAGUERRE_TIERS)
    bounds = np.array([b for b, _ in _LAGUERRE_TIERS])
    counts = np.array([n for _, n in _LAGUERRE_TIERS], dtype=np.int64)
    nodes = np.zeros((len(counts), nmax))
    weights = np.zeros((len(counts), nmax))
    for k, n in enumerate(counts):
        u, w = roots_genlaguerre(int(n), -0.5)
        nodes[k, :n] = u
        weights[k, :n] = w
    return bounds, counts, nodes, weights


_LAG_BOUNDS, _LAG_COUNTS, _LAG_NODES, _LAG_WEIGHTS = _laguerre_tables()


class HankelPair(NamedTuple):
    """Values of H_0^(1)(z) and H_1^(1)(z)."""

    h0: complex
    h1: complex


class DomainError(ValueError):
    """Argument outside the closed first quadrant, or z = 0."""


class RangeError(ValueError):
    """Argument modulus outside [MIN_MODULUS, MAX_MODULUS]."""


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _series(z):
    q = -0.25 * z * z
    term = 1.0 + 0.0j           # q^k / (k!)^2
    j0 = 0.0j
    j1 = 0.0j
    y0 = 0.0j
    y1 = 0.0j
    hk = 0.0                    # harmonic number H_k
    for k in range(60):
        t1 = term / (k + 1)     # q^k / (k! (k+1)!)
        hk1 = hk + 1.0 / (k + 1)
        j0 += term
        y0 -= hk * term
        j1 += t1
        y1 += (hk + hk1) * t1
        if abs(term) < 1e-18:
            break
        hk = hk1
        term *= q / ((k + 1) * (k + 1))
    half = 0.5 * z
    lg = np.log(half) + EULER_GAMMA
    j1 *= half
    Y0 = _TWO_OVER_PI * (lg * j0 + y0)
    Y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * lg * j1 - half * y1 / math.pi
    return j0 + 1j * Y0, j1 + 1j * Y1


@njit(cache=True, nogil=True)
def _phase(z):
    # sqrt(2/(pi z)) e^{i(z - pi/4)} with the exponential split into real parts
    e = math.exp(-z.imag)
    ph = z.real - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * complex(e * math.cos(ph), e * math.sin(ph))


@njit(cache=True, nogil=True, fastmath=True)
def _laguerre(z, nodes, weights, count):
    q = 0.5j / z
    s0 = 0.0j
    s1 = 0.0j
    for k in range(count):
        g = 1.0 + nodes[k] * q
        r = 1.0 / np.sqrt(g)
        s0 += weights[k] * r
        s1 += weights[k] * nodes[k] * g * r
    pre = _phase(z) / _SQRT_PI
    return pre * s0, -2.0j * pre * s1


@njit(cache=True, nogil=True, fastmath=True)
def _asymptotic(z):
    # sum_k i^k a_k(nu) / z^k for nu = 0, 1; term counts fixed per modulus band
    a = abs(z)
    nt = 22 if a < 25.0 else (16 if a < 35.0 else (12 if a < 60.0 else 9))
    w = 1.0j / (8.0 * z)
    s0 = 1.0 + 0.0j
    s1 = 1.0 + 0.0j
    a0 = 1.0 + 0.0j
    a1 = 1.0 + 0.0j
    for k in range(nt):
        c = (2 * k + 1) * (2 * k + 1)
        f = w / (k + 1)
        a0 = a0 * f * (-c)
        a1 = a1 * f * (4.0 - c)
        s0 += a0
        s1 += a1
    pre = _phase(z)
    return pre * s0, -1.0j * pre * s1


@njit(cache=True, nogil=True)
def _h01(z):
    a = abs(z)
    if a <= SERIES_RADIUS:
        return _series(z)
    if a >= ASYMPTOTIC_RADIUS:
        return _asymptotic(z)
    tier = 0
    while a > _LAG_BOUNDS[tier]:
        tier += 1
    return _laguerre(z, _LAG_NODES[tier], _LAG_WEIGHTS[tier], _LAG_COUNTS[tier])


@njit(cache=True, nogil=True)
def _j01_series(z):
    q = -0.25 * z * z
    term = 1.0 + 0.0j
    j0 = 0.0j
    j1 = 0.0j
    for k in range(80):
        j0 += term
        j1 += term / (k + 1)
        if abs(term) < 1e-18:
            break
        term *= q / ((k + 1) * (k + 1))
    return j0, 0.5 * z * j1


@njit(cache=True, nogil=True)
def _j01(z):
    # J from the series near the origin, else J = (H(z) + conj(H(conj z))) / 2;
    # the Laguerre and asymptotic branches stay valid slightly below the real axis.
    if abs(z) <= 8.0:
        return _j01_series(z)
    h0, h1 = _h01(z)
    g0, g1 = _h01(np.conj(z))
    return 0.5 * (h0 + np.conj(g0)), 0.5 * (h1 + np.conj(g1))


@njit(cache=True, nogil=True)
def _h01_many(z, h0, h1):
    for i in range(z.size):
        h0[i], h1[i] = _h01(z[i])


@njit(cache=True, nogil=True)
def _j01_many(z, j0, j1):
    for i in range(z.size):
        j0[i], j1[i] = _j01(z[i])


# ---------------------------------------------------------------------------
# public wrappers
# ---------------------------------------------------------------------------

def _check_domain(z):
    if np.any(z == 0):
        raise DomainError("H0 has a logarithmic singularity at z = 0")
    if np.any(z.real < 0) or np.any(z.imag < 0):
        bad = z[(z.real < 0) | (z.imag < 0)].ravel()[0]
        raise DomainError(f"argument {bad} outside the closed first quadrant")
    a = np.abs(z)
    if np.any(a < MIN_MODULUS) or np.any(a > MAX_MODULUS):
        bad = z[(a < MIN_MODULUS) | (a > MAX_MODULUS)].ravel()[0]
        raise RangeError(f"|z| = {abs(bad):.3g} outside [{MIN_MODULUS:g}, {MAX_MODULUS:g}]")


def hankel01(z) -> HankelPair:
    """
    Evaluate H_0^(1)(z) and H_1^(1)(z).

    Parameters
    ----------
    z : complex or array_like of complex
        Arguments in the closed first quadrant with
        ``MIN_MODULUS <= |z| <= MAX_MODULUS``.

    Returns
    -------
    HankelPair
        Scalars for scalar input, arrays of the input shape otherwise.

    Raises
    ------
    DomainError
        If ``z == 0`` or ``z`` lies outside the closed first quadrant.
    RangeError
        If ``|z|`` lies outside the supported range.
    """
    za = np.asarray(z, dtype=complex)
    _check_domain(za)
    flat = np.ascontiguousarray(za.ravel())
    h0 = np.empty_like(flat)
    h1 = np.empty_like(flat)
    _h01_many(flat, h0, h1)
    if za.ndim == 0:
        return HankelPair(complex(h0[0]), complex(h1[0]))
    return HankelPair(h0.reshape(za.shape), h1.reshape(za.shape))


def hankel01_unchecked(z):
    """Array version of :func:`hankel01` without domain checks (any z != 0 with Re z > 0)."""
    za = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(za.ravel())
    h0 = np.empty_like(flat)
    h1 = np.empty_like(flat)
    _h01_many(flat, h0, h1)
    return h0.reshape(za.shape), h1.reshape(za.shape)


def bessel_j01(z):
    """
    J_0(z) and J_1(z) for z in the right half plane.

    Used by the kernel-split quadrature corrections, where the arguments are
    kappa * r with r a short distance.
    """
    za = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(za.ravel())
    j0 = np.empty_like(flat)
    j1 = np.empty_like(flat)
    _j01_many(flat, j0, j1)
    return j0.reshape(za.shape), j1.reshape(za.shape)


def series_branch(z):
    """Evaluate with the ascending series regardless of |z| (crossover regression tests)."""
    return _series(complex(z))


def laguerre_branch(z, count=None):
    """Evaluate with the Laguerre quadrature (crossover regression tests)."""
    z = complex(z)
    tier = int(np.searchsorted(_LAG_BOUNDS, abs(z)))
    tier = min(tier, len(_LAG_COUNTS) - 1)
    n = _LAG_COUNTS[tier] if count is None else count
    if count is not None:
        u, w = roots_genlaguerre(int(count), -0.5)
        return _laguerre(z, u, w, int(count))
    return _laguerre(z, _LAG_NODES[tier], _LAG_WEIGHTS[tier], int(n))


def asymptotic_branch(z):
    """Evaluate with the asymptotic expansion (crossover regression tests)."""
    return _asymptotic(complex(z))


# ---------------------------------------------------------------------------
# tabulation along a ray
# ---------------------------------------------------------------------------

RAY_DEGREE = 20


class RayTable(NamedTuple):
    """
    Chebyshev tables of g_nu(r) = H_nu(kappa r) e^{-i kappa r} sqrt(r) on dyadic r-panels.

    Panel k covers [r0 2^k, r0 2^(k+1)] with r0 = SERIES_RADIUS/|kappa|;
    below r0 the series is used directly.
    """

    kappa: complex
    r0: float
    coef0: np.ndarray
    coef1: np.ndarray


def _cheb_nodes_and_inverse(degree):
    x = np.cos(math.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    V = np.polynomial.chebyshev.chebvander(x, degree)
    # discrete orthogonality at first-kind points gives the inverse in closed form
    scale = np.full(degree + 1, 2.0 / (degree + 1))
    scale[0] = 1.0 / (degree + 1)
    return x, scale[:, None] * V.T


_RAY_X, _RAY_VINV = _cheb_nodes_and_inverse(RAY_DEGREE)


def ray_table(kappa, rmax):
    """
    Tabulate H0(kappa r), H1(kappa r) for 0 < r <= rmax.

    The smooth factor g_nu is analytic on each panel with its only
    singularity at r = 0, three half-widths from the panel centre, so
    degree-20 interpolation is accurate to roughly 1e-15 relative.
    Building costs about 21 Hankel evaluations per panel.
    """
    kappa = complex(kappa)
    r0 = SERIES_RADIUS / abs(kappa)
    npan = max(1, int(math.ceil(math.log2(max(rmax, r0) * (1 + 1e-12) / r0))))
    a = r0 * 2.0 ** np.arange(npan)
    r = a[:, None] * (1.5 + 0.5 * _RAY_X)
    h0, h1 = hankel01_unchecked(kappa * r)
    scale = np.exp(-1j * kappa * r) * np.sqrt(r)
    coef0 = matmul(h0 * scale, _RAY_VINV.T)
    coef1 = matmul(h1 * scale, _RAY_VINV.T)
    return RayTable(kappa, r0, np.ascontiguousarray(coef0), np.ascontiguousarray(coef1))


@njit(cache=True, nogil=True, fastmath=True)
def _clenshaw2(c0, c1, x):
    b0 = 0.0j
    b1 = 0.0j
    d0 = 0.0j
    d1 = 0.0j
    x2 = 2.0 * x
    for k in range(c0.size - 1, 0, -1):
        b0, b1 = c0[k] + x2 * b0 - b1, b0
        d0, d1 = c1[k] + x2 * d0 - d1, d0
    return c0[0] + x * b0 - b1, c1[0] + x * d0 - d1


@njit(cache=True, nogil=True)
def _h01_ray(r, kappa, r0, coef0, coef1):
    if r <= r0:
        return _series(kappa * r)
    k = int(math.log2(r / r0))
    if k >= coef0.shape[0]:
        k = coef0.shape[0] - 1
    a = r0 * 2.0 ** k
    x = 2.0 * r / a - 3.0
    g0, g1 = _clenshaw2(coef0[k], coef1[k], x)
    kr = kappa * r
    e = math.exp(-kr.imag) / math.sqrt(r)
    ph = complex(e * math.cos(kr.real), e * math.sin(kr.real))
    return g0 * ph, g1 * ph


@njit(cache=True, nogil=True)
def _h01_ray_many(r, kappa, r0, coef0, coef1, h0, h1):
    for i in range(r.size):
        h0[i], h1[i] = _h01_ray(r[i], kappa, r0, coef0, coef1)


def hankel01_ray(table: RayTable, r):
    """Evaluate H0(kappa r), H1(kappa r) from a :class:`RayTable` (r > 0, r <= tabulated range)."""
    ra = np.ascontiguousarray(np.asarray(r, dtype=float).ravel())
    h0 = np.empty(ra.size, complex)
    h1 = np.empty(ra.size, complex)
    _h01_ray_many(ra, table.kappa, table.r0, table.coef0, table.coef1, h0, h1)
    shape = np.shape(r)
    return h0.reshape(shape), h1.reshape(shape)


# ---------------------------------------------------------------------------
# J0, J1 along a ray
# ---------------------------------------------------------------------------

BESSEL_PANEL = 4.0      # panel width in |kappa r|


class BesselRayTable(NamedTuple):
    """
    Chebyshev tables of J_nu(kappa r) on uniform r-panels of width BESSEL_PANEL/|kappa|.

    J0 and J1 are entire, so degree-20 interpolation on a panel of argument
    width 4 is exact to rounding relative to the local size of the functions.
    """

    h: float
    coef0: np.ndarray
    coef1: np.ndarray


def bessel_ray_table(kappa, rmax):
    """Tabulate J0(kappa r), J1(kappa r) for 0 <= r <= rmax."""
    kappa = complex(kappa)
    h = BESSEL_PANEL / abs(kappa)
    npan = max(1, int(math.ceil(rmax * (1 + 1e-12) / h)))
    r = h * (np.arange(npan)[:, None] + 0.5 * (1 + _RAY_X))
    j0, j1 = bessel_j01(kappa * r)
    return BesselRayTable(h, np.ascontiguousarray(matmul(j0, _RAY_VINV.T)),
                          np.ascontiguousarray(matmul(j1, _RAY_VINV.T)))


@njit(cache=True, nogil=True)
def _j01_ray_many(r, h, coef0, coef1, j0, j1):
    last = coef0.shape[0] - 1
    for i in range(r.size):
        k = min(int(r[i] / h), last)
        x = 2.0 * (r[i] / h - k) - 1.0
        j0[i], j1[i] = _clenshaw2(coef0[k], coef1[k], x)


def bessel_j01_ray(table: BesselRayTable, r):
    """Evaluate J0(kappa r), J1(kappa r) from a :class:`BesselRayTable` (0 <= r <= tabulated range)."""
    ra = np.ascontiguousarray(np.asarray(r, dtype=float).ravel())
    j0 = np.empty(ra.size, complex)
    j1 = np.empty(ra.size, complex)
    _j01_ray_many(ra, table.h, table.coef0, table.coef1, j0, j1)
    shape = np.shape(r)
    return j0.reshape(shape), j1.reshape(shape)
