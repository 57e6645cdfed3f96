"""
Self-checks behind ``tfscatter validate`` and the trapping comparison experiment.

Each suite returns a list of :class:`Check` records; a suite passes when all
of its checks do.  References are independent of the code under test where
possible: scipy special functions for the disk series, an extended-precision
table for the Hankel functions, and closed forms or adaptive quadrature for
time integrals.
"""

import json
import math
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import contour, helmholtz, synthesis
from .geometry import build_scatterer, discretize
from .incident import Band, WavePacket, min_delay, select_band
from .pipeline import FrequencySolver, ScattererSpec, SimConfig, run_simulation, verify_assembly
from .specfun import asymptotic_branch, hankel01, laguerre_branch, series_branch


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<48s} {self.value:10.3e}  (limit {self.limit:.1e}, {self.seconds:.1f}s)"


def _check(name, fn, limit, cmp="le"):
    t = time.perf_counter()
    v = float(fn())
    ok = v <= limit if cmp == "le" else v > limit
    return Check(name, v, limit, bool(ok), time.perf_counter() - t)


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def hankel_reference():
    """Frozen extended-precision table: (z, h0, h1) arrays."""
    raw = json.loads(resources.files("tfscatter").joinpath("data/hankel_reference.json").read_text())
    v = np.array(raw["values"])
    return v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3], v[:, 4] + 1j * v[:, 5]


def hankel_table_error():
    z, h0, h1 = hankel_reference()
    a0, a1 = hankel01(z)
    return max(np.max(np.abs(a0 - h0) / np.abs(h0)), np.max(np.abs(a1 - h1) / np.abs(h1)))


def _crossover_jump(radius, left, right):
    worst = 0.0
    for th in np.linspace(0, math.pi / 2, 9):
        z = radius * complex(math.cos(th), math.sin(th))
        a, b = left(z), right(z)
        worst = max(worst, abs(a[0] - b[0]) / abs(a[0]), abs(a[1] - b[1]) / abs(a[1]))
    return worst


def _wronskian_error():
    # J1 Y0 - J0 Y1 = 2/(pi z); with H = J + iY this is Im(conj-free form) below
    z = np.geomspace(1e-2, 90, 60) * np.exp(0.4j)
    h0, h1 = hankel01(z)
    from .specfun import bessel_j01
    j0, j1 = bessel_j01(z)
    y0, y1 = (h0 - j0) / 1j, (h1 - j1) / 1j
    w = j1 * y0 - j0 * y1
    return np.max(np.abs(w * math.pi * z / 2 - 1))


def suite_specfun():
    return [
        _check("hankel01 vs extended-precision table", hankel_table_error, 1e-12),
        _check("series/Laguerre agreement at |z| = 2",
               lambda: _crossover_jump(2.0, series_branch, laguerre_branch), 1e-13),
        _check("Laguerre/asymptotic agreement at |z| = 20",
               lambda: _crossover_jump(20.0, laguerre_branch, asymptotic_branch), 1e-13),
        _check("Wronskian identity", _wronskian_error, 1e-12),
    ]


# ---------------------------------------------------------------------------
# Helmholtz solver
# ---------------------------------------------------------------------------

def disk_error(kappa, n=256, radius=2.0, n_targets=16):
    bdy = discretize(build_scatterer("disk", {}), 16, n // 16)
    f = helmholtz.ComplexFrequency.from_complex(kappa)
    A = helmholtz.assemble_cfie(bdy, f)
    dens = helmholtz.solve_density(A, -helmholtz.plane_wave(f, (1.0, 0.0), bdy.z))
    tg = radius * np.exp(2j * np.pi * np.arange(n_targets) / n_targets)
    u = helmholtz.evaluate_field(bdy, dens, tg)
    ref = helmholtz.disk_series_reference(1.0, f, (1.0, 0.0), tg)
    return np.max(np.abs(u - ref)) / np.max(np.abs(ref))


def interior_source_error(name="keyhole", kappa=4 + 0.02j, source=(0.0, 2.5), corner_depth=30,
                          base_panels=None, n_probes=20, min_distance=0.5):
    """
    Impose the field of a point source inside the scatterer and compare outside.

    Probes are placed on circles around the scatterer and kept only where
    they are at least ``min_distance`` from the boundary.
    """
    curve = build_scatterer(name, {})
    bdy = discretize(curve, 16, base_panels, corner_depth)
    f = helmholtz.ComplexFrequency.from_complex(kappa)
    A = helmholtz.assemble_cfie(bdy, f)
    dens = helmholtz.solve_density(A, helmholtz.point_source(f, source, bdy.z))
    probes = probe_ring(bdy, n_probes, min_distance)
    u = helmholtz.evaluate_field(bdy, dens, probes)
    ref = helmholtz.point_source(f, source, probes)
    return np.max(np.abs(u - ref)) / np.max(np.abs(ref)), bdy, probes


def probe_ring(bdy, count, min_distance):
    """``count`` exterior points at distance >= ``min_distance`` from the boundary."""
    from .geometry import classify_points, distance_to_boundary
    c = bdy.z.mean()
    R = np.abs(bdy.z - c).max()
    pts = []
    for rad in np.linspace(0.2 * R, 2 * R, 12):
        ring = c + rad * np.exp(2j * np.pi * (np.arange(4 * count) + 0.5) / (4 * count))
        ok = (classify_points(bdy, ring) == 0) & (distance_to_boundary(bdy, ring) >= min_distance)
        pts.extend(ring[ok])
    pts = np.asarray(pts)
    if pts.size < count:
        raise RuntimeError("not enough exterior probes")
    return pts[np.linspace(0, pts.size - 1, count).astype(int)]


def suite_helmholtz():
    return [
        _check("disk kappa = 5 vs series", lambda: disk_error(5.0), 1e-8),
        _check("disk kappa = 5 + 0.02i vs series", lambda: disk_error(5 + 0.02j), 1e-8),
        _check("keyhole interior source, kappa = 4 + 0.02i", lambda: interior_source_error()[0], 1e-6),
    ]


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def surrogate_exact(band, t0, t):
    """Inverse transform of e^{i omega t0} restricted to the band, (1/2 pi) normalized."""
    P, W1 = band.P, band.W1
    t = np.asarray(t, dtype=float)
    return (P / (2 * math.pi)) * np.exp(-1j * (W1 + P / 2) * (t - t0)) * np.sinc(P * (t - t0) / (2 * math.pi))


def surrogate_shift(band, k):
    """A shift t0 = 2 pi k/P for which the surrogate is exactly band-limited on the sinc grid."""
    return 2 * math.pi * k / band.P


def surrogate_sinc_error(band=Band(3.0, 14.0), k=40):
    t0 = surrogate_shift(band, k)
    tmax = t0 + 40 * math.pi / band.P
    m = int(math.ceil(band.P * tmax / (2 * math.pi))) + 10
    b = band.with_m(m)
    exp = synthesis.coeffs_from_samples(synthesis.FrequencyField(np.exp(1j * b.frequencies() * t0), b))
    t = np.linspace(0, tmax, 400)
    return np.max(np.abs(synthesis.sinc_synthesize(exp, t)[0] - surrogate_exact(band, t0, t))) / (band.P / (2 * math.pi))


def surrogate_gl_error(band=Band(3.0, 14.0), k=40, nodes=50, lag=400 * math.pi):
    t0 = surrogate_shift(band, k)
    t = t0 + lag / band.P
    x, w = synthesis.gl_rule(band, nodes)
    u = synthesis.gl_synthesis(np.exp(1j * x * t0), w, x, [t])[0, 0]
    return abs(u - surrogate_exact(band, t0, t)) / (band.P / (2 * math.pi))


def surrogate_late_sinc_error(band=Band(3.0, 14.0), k=40, lag=400 * math.pi):
    t0 = surrogate_shift(band, k)
    t = t0 + lag / band.P
    m = int(math.ceil(band.P * t / (2 * math.pi))) + 10
    b = band.with_m(m)
    exp = synthesis.coeffs_from_samples(synthesis.FrequencyField(np.exp(1j * b.frequencies() * t0), b))
    return abs(synthesis.sinc_synthesize(exp, [t])[0, 0] - surrogate_exact(band, t0, t)) / (band.P / (2 * math.pi))


def interpolation_identity_error(m=30, band=Band(2.0, 9.0), seed=1):
    rng = np.random.default_rng(seed)
    b = band.with_m(m)
    c = rng.standard_normal((1, 2 * m + 1)) + 1j * rng.standard_normal((1, 2 * m + 1))
    exp = synthesis.SincExpansion(c, b)
    j = np.arange(1, m + 1)
    t = 2 * math.pi * j / b.P
    u = synthesis.sinc_synthesize(exp, t)[0]
    # the phase e^{-i t (P/2 + W1)} contributes (-1)^j at these times, cancelling the sign in the sum
    expect = (b.P / (2 * math.pi)) * np.exp(-2j * math.pi * j * b.W1 / b.P) * c[0, m + 1:]
    return np.max(np.abs(u - expect))


def suite_synthesis():
    return [
        _check("sinc surrogate closed form", surrogate_sinc_error, 1e-10),
        _check("sinc interpolation identity", interpolation_identity_error, 1e-13),
        _check("late-time sinc surrogate", surrogate_late_sinc_error, 1e-8),
        _check("late-time Gauss-Legendre (50 nodes) must fail", surrogate_gl_error, 0.1, cmp="gt"),
    ]


# ---------------------------------------------------------------------------
# contour
# ---------------------------------------------------------------------------

POLE = 5 - 0.01j


def rational(w):
    return 1.0 / (np.asarray(w) - POLE)


def contour_identity(f, t, delta, W1=3.0, W2=14.0, T=200.0, tol=1e-13):
    """
    (I_0, I_delta - I_cR - I_cL) for an analytic f, all unnormalized.

    I_0 and I_delta come from the adaptive time oracle on the real and
    shifted lines; the corrections from the Gauss-Legendre side rules.
    """
    I0 = 2 * math.pi * synthesis.time_oracle(f, t, tol, W1, W2)
    if delta == 0:
        return I0, I0
    Id = 2 * math.pi * math.exp(delta * t) * synthesis.time_oracle(
        lambda w: f(np.asarray(w) + 1j * delta), t, tol, W1, W2)
    spec = contour.ContourSpec(W1, W2, delta, T)
    L, R = (contour.correction_rule(s, spec) for s in ("left", "right"))
    I_cL = contour.correction_term(f(L.omega), L, t)
    I_cR = contour.correction_term(f(R.omega), R, t)
    return I0, contour.contour_assemble(Id, I_cL, I_cR)


def rational_identity_error(delta=0.02, times=(10.0, 50.0, 200.0)):
    worst = 0.0
    for t in times:
        I0, asm = contour_identity(rational, t, delta)
        worst = max(worst, abs(I0 - asm) / abs(I0))
    return worst


def delta_independence_error(times=(10.0, 50.0, 200.0)):
    worst = 0.0
    for t in times:
        a = contour_identity(rational, t, 0.01)[1]
        b = contour_identity(rational, t, 0.02)[1]
        worst = max(worst, abs(a - b) / abs(a))
    return worst


def entire_identity_error():
    worst = 0.0
    for f in (lambda w: np.exp(1j * 7.0 * np.asarray(w)), lambda w: np.asarray(w) ** 3 - 2 * np.asarray(w)):
        for t in (5.0, 40.0):
            I0, asm = contour_identity(f, t, 0.02)
            worst = max(worst, abs(I0 - asm) / abs(I0))
    return worst


def suite_contour():
    return [
        _check("rational Cauchy identity, delta = 0.02", rational_identity_error, 1e-8),
        _check("delta independence 0.01 vs 0.02", delta_independence_error, 1e-8),
        _check("entire functions Cauchy identity", entire_identity_error, 1e-9),
        _check("|delta_limit(200) - 0.0237|", lambda: abs(contour.delta_limit(200) - 0.0237), 1e-3),
        _check("|delta_limit(500) - 0.0095|", lambda: abs(contour.delta_limit(500) - 0.0095), 1e-3),
    ]


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def disk_config(delta=0.0, T=40.0, probes=((2.0, 0.0), (-3.0, 0.5), (0.0, 4.0)), times=None,
                packet=None, workers=1, m=None):
    packet = packet or WavePacket(sigma=1.0, omega0=6.0, t0=10.0)
    times = tuple(np.linspace(0, T, 81)) if times is None else tuple(times)
    return SimConfig(scatterer=ScattererSpec("disk", {}, 16, 16), packet=packet, T=T,
                     delta=delta, probes=probes, probe_times=times, workers=workers, m=m)


def disk_pipeline_error(sol, every=8, tol=1e-12):
    """Max error of a disk run against the time oracle fed with exact series values."""
    p = sol.meta["packet"]
    W1, W2 = sol.meta["band"]
    worst = peak = 0.0
    for k, x in enumerate(sol.probes):
        def U(w, x=x):
            vals = np.array([helmholtz.disk_series_reference(
                1.0, helmholtz.ComplexFrequency(wi, 0.0, p.c), p.z0, [x])[0] for wi in w])
            return p.amplitude * vals * np.exp(1j * w * p.t0 - 0.5 * p.sigma ** 2 * (w - p.omega0) ** 2)
        for l in range(0, sol.probe_times.size, every):
            ref = synthesis.time_oracle(U, sol.probe_times[l], tol, W1, W2)
            worst = max(worst, abs(ref - sol.probe_u[k, l]))
            peak = max(peak, abs(ref))
    return worst / peak


def suite_pipeline():
    out = []
    t = time.perf_counter()
    sol0 = run_simulation(disk_config(0.0))
    sol1 = run_simulation(disk_config(None))
    secs = time.perf_counter() - t
    out.append(_check("disk run (delta = 0) vs series oracle", lambda: disk_pipeline_error(sol0), 1e-6))
    out.append(_check("disk run (damped) vs series oracle", lambda: disk_pipeline_error(sol1), 1e-6))
    out.append(_check("damped vs undamped agreement (disk)",
                      lambda: np.nanmax(np.abs(sol0.probe_u - sol1.probe_u)), 1e-7))
    out.append(_check("assembly audit", lambda: verify_assembly(sol1)["max_discrepancy"], 1e-12))
    sol2 = run_simulation(disk_config(None, workers=2))
    out.append(_check("worker-count independence (max |diff|)",
                      lambda: np.max(np.abs(sol1.probe_u - sol2.probe_u)), 0.0))
    out[0] = Check(out[0].name, out[0].value, out[0].limit, out[0].passed, out[0].seconds + secs)
    return out


# ---------------------------------------------------------------------------
# trapping comparison
# ---------------------------------------------------------------------------

@dataclass
class TrappingResult:
    m_values: tuple
    errors: dict          # method -> list of relative l2 errors per m
    reference_m: int
    delta: float
    n_nodes: int
    n_solves: int
    seconds: float


def trapping_comparison(m_values=(100, 200, 400, 800), ref_factor=4, T=150.0, base_panels=32,
                        n_probes=20, times=None, workers=1, delta=None, progress=None):
    """
    Gauss-Legendre, undamped sinc and damped sinc with corrections on the C-curve cavity.

    A packet with omega0 = 6, sigma = 1.5 enters the opening of the C-curve;
    probes sit on the unit circle inside the cavity.  Each method is run at
    matched resolution (2m+1 frequency samples, or 2m+1 Gauss-Legendre
    nodes) and compared in relative l2 norm over all probes and times with a
    damped run at ``ref_factor * max(m_values)``.
    """
    t_start = time.perf_counter()
    packet = WavePacket(sigma=1.5, omega0=6.0, t0=math.ceil(min_delay(1.5, 3.1)), z0=(1.0, 0.0))
    band = select_band(packet)
    bdy = discretize(build_scatterer("c_curve", {}), 16, base_panels)
    probes = np.exp(2j * np.pi * np.arange(n_probes) / n_probes)
    solver = FrequencySolver(bdy, packet, probes, workers=workers)
    times = np.linspace(5.0, T, 146) if times is None else np.asarray(times)
    delta = 0.8 * contour.delta_limit(T) if delta is None else delta
    spec = contour.ContourSpec(band.W1, band.W2, delta, T)
    rules = [contour.correction_rule(s, spec) for s in ("left", "right")]
    seg = [solver.sample(r.omega) for r in rules]
    I_cL = contour.correction_term(seg[0], rules[0], times)
    I_cR = contour.correction_term(seg[1], rules[1], times)

    def damped(m):
        exp = synthesis.coeffs_from_samples(solver.field_sampler(band, delta)(m))
        I_d = 2 * math.pi * synthesis.sinc_synthesize(exp, times)
        return contour.contour_assemble(I_d, I_cL, I_cR) / (2 * math.pi)

    def undamped(m):
        return synthesis.sinc_synthesize(
            synthesis.coeffs_from_samples(solver.field_sampler(band, 0.0)(m)), times)

    def gauss(m):
        x, w = synthesis.gl_rule(band, 2 * m + 1)
        return synthesis.gl_synthesis(solver.sample(x), w, x, times)

    ref = damped(ref_factor * max(m_values))
    nref = np.linalg.norm(ref)
    errors = {"gauss_legendre": [], "undamped": [], "damped": []}
    for m in m_values:
        for name, fn in (("gauss_legendre", gauss), ("undamped", undamped), ("damped", damped)):
            errors[name].append(float(np.linalg.norm(fn(m) - ref) / nref))
            if progress:
                progress(name, m, errors[name][-1])
    return TrappingResult(tuple(m_values), errors, ref_factor * max(m_values), delta, bdy.n,
                          len(solver.cache), time.perf_counter() - t_start)


def first_reaching(ms, errs, tol):
    """Smallest m whose error is <= tol, or None."""
    for m, e in zip(ms, errs):
        if e <= tol:
            return m
    return None


def suite_trapping():
    """Reduced trapping comparison (two resolutions, 2x reference) for a quick sanity check."""
    t = time.perf_counter()
    res = trapping_comparison(m_values=(100, 200), ref_factor=2, T=60.0, base_panels=24)
    secs = time.perf_counter() - t
    e = res.errors
    return [
        Check("damped beats undamped at m = 200 (ratio)", e["damped"][1] / e["undamped"][1], 1.0,
              e["damped"][1] < e["undamped"][1], secs),
        Check("undamped beats Gauss-Legendre at m = 200 (ratio)",
              e["undamped"][1] / e["gauss_legendre"][1], 1.0,
              e["undamped"][1] < e["gauss_legendre"][1]),
    ]


SUITES = {
    "specfun": suite_specfun,
    "helmholtz": suite_helmholtz,
    "synthesis": suite_synthesis,
    "contour": suite_contour,
    "pipeline": suite_pipeline,
    "trapping": suite_trapping,
}


def run_suite(name):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name]()
