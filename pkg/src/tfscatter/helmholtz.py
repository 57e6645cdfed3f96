"""
Combined-field integral equation for the exterior sound-soft Helmholtz problem.

The scattered field is represented as

    U(x) = int_{dOmega} (d_k(x, y) + i eta s_k(x, y)) phi(y) ds(y),
    s_k(x, y) = (i/4) H0(k r),
    d_k(x, y) = (i k/4) H1(k r) nu(y).(x - y)/r,

with nu the unit normal pointing into the exterior domain and r = |x - y|.
Letting x approach the boundary gives the second-kind equation

    phi/2 + (D + i eta S) phi = -U_inc.

The same coupling eta (default Re k) is used in the equation and in the
representation.  Discretization is Nystrom on composite Gauss-Legendre panels
with kernel-split product integration for self and near interactions.

Costs: assembly O(n^2) kernel evaluations, LU factorization O(n^3), and field
evaluation O(M n) by direct summation.  The summation backend is pluggable.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from numba import njit
from scipy import special

from . import _nearfield
from .geometry import DiscretizedBoundary, classify_points, distance_to_boundary
from .specfun import EULER_GAMMA, _h01_ray, bessel_j01_ray, bessel_ray_table, ray_table

logger = logging.getLogger(__name__)


class AssemblyError(RuntimeError):
    """Non-finite kernel value during assembly."""


class SingularOperatorError(RuntimeError):
    """LU factorization failed at a frequency."""

    def __init__(self, freq, detail=""):
        super().__init__(f"operator numerically singular at omega = {freq.omega} + {freq.delta}i {detail}")
        self.freq = freq


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexFrequency:
    """omega + i delta with wave speed c; kappa = (omega + i delta) / c."""

    omega: float
    delta: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0 (analyticity direction), got {self.delta}")
        if not self.c > 0:
            raise ValueError("wave speed must be positive")

    @property
    def kappa(self):
        return complex(self.omega, self.delta) / self.c

    @classmethod
    def from_complex(cls, w, c=1.0):
        w = complex(w)
        return cls(w.real, w.imag, c)


@dataclass(frozen=True, eq=False)
class Density:
    """Boundary density on the nodes of a discretization."""

    values: np.ndarray
    frequency: ComplexFrequency
    coupling: float
    residual: float = 0.0


class OperatorMatrix:
    """
    Dense Nystrom matrix of phi/2 + (D + i eta S) phi with a cached LU factorization.

    Attributes
    ----------
    A : ndarray, shape (n, n)
    frequency : ComplexFrequency
    coupling : float
    """

    def __init__(self, A, frequency, coupling, bdy=None):
        self.A = A
        self.frequency = frequency
        self.coupling = coupling
        self.bdy = bdy
        self._lu = None

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def factorized(self):
        return self._lu is not None

    def factor(self):
        if self._lu is None:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                try:
                    self._lu = sla.lu_factor(self.A, check_finite=False)
                except (sla.LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
                    raise SingularOperatorError(self.frequency, str(exc)) from None
        return self._lu

    def solve(self, rhs):
        return sla.lu_solve(self.factor(), rhs, check_finite=False)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _naive_matrix(z, nu, w, kappa, eta, r0, c0, c1, out):
    n = z.size
    bs = 32                                       # tiles keep the transposed writes in cache
    for i in range(n):
        out[i, i] = 0.0
    for ib in range(0, n, bs):
        for jb in range(ib, n, bs):
            for i in range(ib, min(ib + bs, n)):
                for j in range(max(jb, i + 1), min(jb + bs, n)):
                    d = z[i] - z[j]
                    r = abs(d)
                    h0, h1 = _h01_ray(r, kappa, r0, c0, c1)
                    s = -0.25 * eta * h0          # i eta (i/4) H0
                    t = 0.25j * kappa * h1 / r
                    gi = nu[j].real * d.real + nu[j].imag * d.imag
                    gj = -(nu[i].real * d.real + nu[i].imag * d.imag)
                    out[i, j] = (t * gi + s) * w[j]
                    out[j, i] = (t * gj + s) * w[i]


@njit(cache=True, nogil=True)
def _direct_sum_kernel(src, nu, wphi, targets, kappa, eta, r0, c0, c1, out):
    for m in range(targets.size):
        acc = 0.0j
        x = targets[m]
        for j in range(src.size):
            d = x - src[j]
            r = abs(d)
            h0, h1 = _h01_ray(r, kappa, r0, c0, c1)
            g = nu[j].real * d.real + nu[j].imag * d.imag
            acc += (0.25j * kappa * h1 * g / r - 0.25 * eta * h0) * wphi[j]
        out[m] = acc


def direct_sum(src, normal, wphi, targets, kappa, eta):
    """
    Default summation backend: naive Gauss-Legendre layer potential, O(M n).

    A fast-multipole backend would implement the same signature.
    """
    out = np.empty(targets.size, dtype=complex)
    tab = ray_table(kappa, _max_distance(src, targets))
    _direct_sum_kernel(np.ascontiguousarray(src), np.ascontiguousarray(normal),
                       np.ascontiguousarray(wphi, dtype=complex), np.ascontiguousarray(targets),
                       tab.kappa, float(eta), tab.r0, tab.coef0, tab.coef1, out)
    return out


def _max_distance(a, b):
    # upper bound on |x - y| for x in a, y in b
    c = a.mean()
    return float(np.abs(a - c).max() + np.abs(b - c).max()) * (1 + 1e-12) + 1e-300


def _split_coefficients(table, kappa, eta):
    """Per-entry correction K_L * log_coef + dl_coef (+ smooth self term)."""
    j0, j1 = bessel_j01_ray(bessel_ray_table(kappa, float(table.r.max(initial=0.0))), table.r)
    kl = -(kappa / (2 * math.pi)) * j1 * table.g - 1j * eta * j0 / (2 * math.pi)
    return kl * table.log_coef + table.dl_coef


def _self_smooth(kappa, eta):
    # smooth part of i eta (i/4) H0(k r) at r = 0, after removing -J0 log r/(2 pi)
    return 1j * eta * (0.25j - (np.log(kappa / 2) + EULER_GAMMA) / (2 * math.pi))


def self_near_table(bdy):
    """Near-interaction table of the boundary with itself, cached on the discretization."""
    cache = bdy.__dict__.setdefault("_tfs_cache", {})
    if "self" not in cache:
        cache["self"] = _nearfield.build_near_table(bdy, bdy.z, bdy.node_panel)
    return cache["self"]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def default_coupling(freq):
    return float(freq.kappa.real)


def assemble_cfie(bdy: DiscretizedBoundary, freq: ComplexFrequency, coupling=None) -> OperatorMatrix:
    """
    Assemble phi/2 + (D + i eta S) on the Nystrom nodes.

    Parameters
    ----------
    bdy : DiscretizedBoundary
    freq : ComplexFrequency
    coupling : float, optional
        eta > 0; defaults to Re(kappa).

    Returns
    -------
    OperatorMatrix
    """
    if freq.delta < 0:
        raise ValueError("delta must be >= 0")
    eta = default_coupling(freq) if coupling is None else float(coupling)
    if not eta > 0:
        raise ValueError("coupling must be positive")
    kappa = freq.kappa
    n = bdy.n
    A = np.empty((n, n), dtype=complex)
    # every pair lies on the ray kappa * r: tabulate the Hankel pair once per frequency
    tab = ray_table(kappa, _max_distance(bdy.z, bdy.z))
    _naive_matrix(bdy.z, bdy.normal, bdy.weights, tab.kappa, eta, tab.r0, tab.coef0, tab.coef1, A)
    table = self_near_table(bdy)
    corr = _split_coefficients(table, kappa, eta)
    corr[table.is_self] += _self_smooth(kappa, eta) * bdy.weights[table.source[table.is_self]]
    A[table.target, table.source] += corr          # (target, source) pairs are unique
    A[np.diag_indices(n)] += 0.5
    if not np.all(np.isfinite(A)):
        i, j = np.argwhere(~np.isfinite(A))[0]
        raise AssemblyError(f"non-finite kernel value for node pair ({i}, {j}) at kappa = {kappa}")
    return OperatorMatrix(A, freq, eta, bdy)


def solve_density(A: OperatorMatrix, rhs) -> Density:
    """
    Solve the discretized equation for the density by LU with partial pivoting.

    The factorization is cached on ``A`` for later right-hand sides.
    The relative residual ||A phi - rhs|| / ||rhs|| is recorded.
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape[0] != A.n:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match n = {A.n}")
    nrm = np.linalg.norm(rhs)
    if nrm == 0:
        return Density(np.zeros_like(rhs), A.frequency, A.coupling, 0.0)
    phi = A.solve(rhs)
    res = float(np.linalg.norm(A.A @ phi - rhs) / nrm)
    return Density(phi, A.frequency, A.coupling, res)


def default_h_safe(bdy):
    """Masking distance for field targets (near evaluation is corrected down to this scale)."""
    return 1e-6 * bdy.curve.diameter()


class FieldEvaluator:
    """
    Layer-potential evaluation at a fixed target set.

    Masking and near-field product tables are computed once; ``evaluate`` may
    then be called for densities at any frequency.

    Parameters
    ----------
    bdy : DiscretizedBoundary
    targets : array_like
        Complex points or an (M, 2) array.
    h_safe : float, optional
        Targets closer than this to the boundary are masked.
    backend : callable, optional
        ``backend(src, normal, w*phi, targets, kappa, eta) -> values``;
        defaults to :func:`direct_sum`.
    """

    def __init__(self, bdy, targets, h_safe=None, backend=None):
        self.bdy = bdy
        self.targets = _as_complex_points(targets)
        self.h_safe = default_h_safe(bdy) if h_safe is None else float(h_safe)
        self.backend = backend or direct_sum
        flag = classify_points(bdy, self.targets) if self.targets.size else np.zeros(0, np.int8)
        dist = distance_to_boundary(bdy, self.targets) if self.targets.size else np.zeros(0)
        self.mask = (flag != 0) | (dist < self.h_safe)
        self.active = np.flatnonzero(~self.mask)
        if np.any(self.mask):
            logger.info("%d of %d targets masked", int(self.mask.sum()), self.targets.size)

    @cached_property
    def near(self):
        return _nearfield.build_near_table(self.bdy, self.targets[self.active])

    def evaluate(self, density: Density):
        out = np.full(self.targets.size, complex(np.nan, 0.0))
        if self.active.size == 0:
            return out
        phi = np.asarray(density.values)
        kappa = density.frequency.kappa
        eta = density.coupling
        vals = self.backend(self.bdy.z, self.bdy.normal, self.bdy.weights * phi,
                            self.targets[self.active], kappa, eta)
        t = self.near
        if t.size:
            corr = _split_coefficients(t, kappa, eta) * phi[t.source]
            vals = vals + np.bincount(t.target, corr.real, self.active.size) \
                + 1j * np.bincount(t.target, corr.imag, self.active.size)
        out[self.active] = vals
        return out


def _as_complex_points(pts):
    pts = np.asarray(pts)
    if np.iscomplexobj(pts):
        return pts.ravel().astype(complex)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return pts[:, 0] + 1j * pts[:, 1]


def evaluate_field(bdy, phi, targets, h_safe=None, backend=None):
    """
    Scattered field at exterior targets from a density.

    Targets inside the scatterer or within ``h_safe`` of the boundary come
    back as NaN (masked), never as zeros.
    """
    return FieldEvaluator(bdy, targets, h_safe, backend).evaluate(phi)


# ---------------------------------------------------------------------------
# validation references
# ---------------------------------------------------------------------------

def plane_wave(freq, direction, pts):
    """e^{i kappa x.d} at complex points."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    x = _as_complex_points(pts)
    return np.exp(1j * freq.kappa * (x.real * d[0] + x.imag * d[1]))


def point_source(freq, source, pts):
    """(i/4) H0(kappa |x - x_s|), via scipy (independent of specfun)."""
    x = _as_complex_points(pts)
    xs = complex(*source) if np.ndim(source) else complex(source)
    return 0.25j * special.hankel1(0, freq.kappa * np.abs(x - xs))


def disk_series_reference(radius, freq, incident_direction, targets, n_terms=None, max_terms=500):
    """
    Scattered field of a unit plane wave by a sound-soft disk centred at the origin.

    u_s(r, theta) = -sum_n eps_n i^n J_n(k a)/H_n(k a) H_n(k r) cos(n theta'),
    with theta' measured from the incident direction.

    Parameters
    ----------
    n_terms : int, optional
        Fixed truncation; otherwise terms are added until five consecutive
        orders are below 1e-16 in magnitude.

    Raises
    ------
    RuntimeError
        If the tail test is not met within ``max_terms`` orders.
    """
    x = _as_complex_points(targets)
    kappa = freq.kappa
    d = np.asarray(incident_direction, dtype=float)
    th = np.angle(x) - math.atan2(d[1], d[0])
    rr = np.abs(x)
    total = np.zeros(x.size, dtype=complex)
    small = 0
    limit = n_terms if n_terms is not None else max_terms
    for n in range(limit + 1):
        ratio = special.jv(n, kappa * radius) / special.hankel1(n, kappa * radius)
        term = -(1 if n == 0 else 2) * (1j ** n) * ratio * special.hankel1(n, kappa * rr) * np.cos(n * th)
        term = np.where(np.isfinite(term), term, 0.0)
        total += term
        if n_terms is None:
            small = small + 1 if np.abs(term).max() < 1e-16 else 0
            if small >= 5:
                return total
    if n_terms is None:
        raise RuntimeError(f"disk series tail did not converge within {max_terms} terms")
    return total
