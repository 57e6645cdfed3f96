import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tfscatter import helmholtz
from tfscatter.incident import Band, WavePacket, packet_transform, select_band
from tfscatter.synthesis import (GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS, FrequencyField,
                                 OracleError, SincExpansion, SynthesisError, adaptive_m,
                                 coeffs_from_samples, gauss_kronrod, gl_rule, gl_synthesis,
                                 sinc_point, sinc_synthesize, time_oracle)
from tfscatter.validation import (interpolation_identity_error, surrogate_exact, surrogate_gl_error,
                                  surrogate_late_sinc_error, surrogate_shift, surrogate_sinc_error)

BAND = Band(3.0, 14.0)


def grid_y(band):
    n = band.num_samples
    return np.arange(n) / n


def expansion(values, band, delta=0.0):
    return coeffs_from_samples(FrequencyField(np.atleast_2d(values), band, delta))


# -- coefficients -----------------------------------------------------------

@pytest.mark.parametrize("k", [-7, 0, 3, 7])
def test_single_fourier_mode(k):
    b = BAND.with_m(7)
    exp = expansion(np.exp(2j * math.pi * k * grid_y(b)), b)
    expect = np.zeros(15, complex)
    expect[k + 7] = 1
    assert np.max(np.abs(exp.coeffs[0] - expect)) < 1e-14


def test_constant_samples():
    b = BAND.with_m(5)
    exp = expansion(np.ones(b.num_samples), b)
    assert abs(exp.coefficient(0)[0] - 1) < 1e-15
    assert np.max(np.abs(np.delete(exp.coeffs[0], 5))) < 1e-15


def test_coefficients_match_quadrature_of_packet_transform():
    # wide band so the edges are ~1e-20 and the DFT is spectrally accurate
    p = WavePacket(sigma=1.0, omega0=10.0, t0=5.0)
    band = select_band(p, 1e-20).with_m(64)
    x = 0.3 + 0.2j
    exp = expansion(packet_transform(p, x, band.frequencies()), band)

    def coef(j):
        f = lambda y: packet_transform(p, x, band.P * y + band.W1) * np.exp(-2j * math.pi * j * y)
        re = quad(lambda y: f(y).real, 0, 1, epsabs=1e-14, limit=400)[0]
        im = quad(lambda y: f(y).imag, 0, 1, epsabs=1e-14, limit=400)[0]
        return re + 1j * im

    for j in (-3, 0, 5, 10, 15, 20, 30):
        assert abs(exp.coefficient(j)[0] - coef(j)) < 1e-10


def test_frequency_field_shape_checked():
    with pytest.raises(ValueError):
        FrequencyField(np.ones((2, 6)), BAND.with_m(3))


def test_causality_ratio_of_causal_field():
    b = BAND.with_m(16)
    y = grid_y(b)
    exp = expansion(np.exp(2j * math.pi * 3 * y) + 0.5 * np.exp(2j * math.pi * 9 * y), b)
    assert exp.causality_ratio()[0] < 1e-14
    anti = expansion(np.exp(-2j * math.pi * 3 * y), b)
    assert anti.causality_ratio()[0] == pytest.approx(1.0)


# -- synthesis --------------------------------------------------------------

@pytest.mark.parametrize("delta", [0.0, 0.02])
def test_single_coefficient_at_its_sample_time(delta):
    b = BAND.with_m(10)
    k = 4
    c = np.zeros((1, 21), complex)
    c[0, 10 + k] = 1
    t = 2 * math.pi * k / b.P
    u = sinc_synthesize(SincExpansion(c, b, delta), [t])[0, 0]
    expect = (b.P / (2 * math.pi)) * (-1) ** k * np.exp(-1j * t * (b.P / 2 + b.W1)) * math.exp(delta * t)
    assert abs(u - expect) < 1e-14


def test_zero_coefficients_give_zero():
    b = BAND.with_m(8)
    u = sinc_synthesize(SincExpansion(np.zeros((3, 17), complex), b, 0.01), np.linspace(0, 30, 50))
    assert u.shape == (3, 50) and not np.any(u)


def test_surrogate_closed_form():
    assert surrogate_sinc_error() <= 1e-10


def test_interpolation_identity():
    assert interpolation_identity_error() <= 1e-13


def test_sinc_point_matches_vectorized():
    rng = np.random.default_rng(0)
    b = BAND.with_m(12)
    exp = SincExpansion(rng.standard_normal((2, 25)) + 1j * rng.standard_normal((2, 25)), b, 0.015)
    t = np.array([0.0, 0.3, 7.1, 40.0])
    u = sinc_synthesize(exp, t)
    for k in range(2):
        for i, ti in enumerate(t):
            assert abs(sinc_point(exp, k, ti) - u[k, i]) < 1e-13 * max(1.0, abs(u[k, i]))


def test_overflow_guard():
    exp = SincExpansion(np.ones((1, 9), complex), BAND.with_m(4), 0.5)
    with pytest.raises(SynthesisError, match="delta_limit"):
        sinc_synthesize(exp, [1300.0])
    with pytest.raises(SynthesisError):
        sinc_synthesize(exp, [np.nan])


def test_gauss_legendre_zero_field():
    x, w = gl_rule(BAND, 20)
    assert not np.any(gl_synthesis(np.zeros((2, 20)), w, x, [0.0, 5.0]))


def test_gauss_legendre_at_shift():
    t0 = surrogate_shift(BAND, 40)
    x, w = gl_rule(BAND, 200)
    u = gl_synthesis(np.exp(1j * x * t0), w, x, [t0])[0, 0]
    assert abs(u - BAND.P / (2 * math.pi)) < 1e-10


def test_gauss_legendre_fails_late_while_sinc_holds():
    assert surrogate_gl_error() > 0.1
    assert surrogate_late_sinc_error() <= 1e-8


def test_gauss_legendre_and_sinc_agree_at_early_times():
    t0 = surrogate_shift(BAND, 10)
    t = np.linspace(0, t0 + 10, 60)
    x, w = gl_rule(BAND, 300)
    gl = gl_synthesis(np.exp(1j * x * t0), w, x, t)[0]
    b = BAND.with_m(200)
    sinc = sinc_synthesize(expansion(np.exp(1j * b.frequencies() * t0), b), t)[0]
    assert np.max(np.abs(gl - sinc)) < 1e-8


def test_oscillation_scaling():
    # GL error at fixed nodes grows with the lag t - t0; sinc error at fixed m stays
    # bounded for t <= 2 pi m/P
    t0 = surrogate_shift(BAND, 5)
    x, w = gl_rule(BAND, 60)
    b = BAND.with_m(500)
    exp = expansion(np.exp(1j * b.frequencies() * t0), b)
    ts = t0 + np.array([4.0, 40.0, 200.0, 800.0]) * math.pi / BAND.P + 0.37
    assert ts.max() <= 2 * math.pi * b.m / b.P
    exact = surrogate_exact(BAND, t0, ts)
    gl_err = np.abs(gl_synthesis(np.exp(1j * x * t0), w, x, ts)[0] - exact)
    sinc_err = np.abs(sinc_synthesize(exp, ts)[0] - exact)
    assert gl_err[0] < 1e-10 and gl_err[-1] > 0.05 and gl_err[-1] > 1e6 * gl_err[1]
    assert sinc_err.max() < 1e-12


# -- adaptive truncation ----------------------------------------------------

def mode_sampler(K, band=BAND):
    rng = np.random.default_rng(K)
    a = rng.uniform(0.5, 1.0, K)

    def sampler(m):
        b = band.with_m(m)
        y = grid_y(b)
        j = np.arange(1, K + 1)
        return FrequencyField((a[:, None] * np.exp(2j * math.pi * j[:, None] * y)).sum(axis=0), b)
    return sampler


@pytest.mark.parametrize("K", [50, 100, 200])
def test_adaptive_m_finite_bandwidth(K):
    exp = adaptive_m(mode_sampler(K))
    assert exp.resolved and K <= exp.m <= 2 * K


def test_adaptive_m_loose_tolerance_stops_at_first_iteration():
    calls = []
    p = WavePacket(sigma=1.0, omega0=6.0, t0=8.0)
    band = select_band(p)

    def sampler(m):
        calls.append(m)
        b = band.with_m(m)
        return FrequencyField(packet_transform(p, 0j, b.frequencies()), b)
    assert adaptive_m(sampler, eps_chop=0.5).m == 64
    assert calls == [64]


def test_adaptive_m_unresolved_flag():
    exp = adaptive_m(mode_sampler(500), m_max=256)
    assert not exp.resolved and exp.m == 256
    with pytest.raises(ValueError):
        adaptive_m(mode_sampler(5), m_max=8)


def test_adaptive_m_tracks_packet_bandwidth():
    # coefficients of e^{i omega t0} e^{-sigma^2 (omega-omega0)^2/2} concentrate near j = P t0/(2 pi)
    p = WavePacket(sigma=1.0, omega0=6.0, t0=40.0)
    band = select_band(p)

    def sampler(m):
        b = band.with_m(m)
        return FrequencyField(packet_transform(p, 0j, b.frequencies()), b)
    exp = adaptive_m(sampler, eps_chop=1e-8)
    estimate = band.P * (p.t0 + 6 * p.sigma) / (2 * math.pi)
    assert exp.resolved and estimate / 2 <= exp.m <= 2 * estimate


# -- time oracle ------------------------------------------------------------

def test_oracle_zero_and_shift():
    assert time_oracle(lambda w: np.zeros_like(w, dtype=complex), 7.0, 1e-12, 3.0, 14.0) == 0
    t0 = 12.3
    v = time_oracle(lambda w: np.exp(1j * w * t0), t0, 1e-13, 3.0, 14.0)
    assert abs(v - 11.0 / (2 * math.pi)) < 1e-13


def test_oracle_rational_self_consistent():
    f = lambda w: 1.0 / (w - (5 - 0.01j))
    a = time_oracle(f, 50.0, 1e-11, 3.0, 14.0)
    b = time_oracle(f, 50.0, 5e-12, 3.0, 14.0)
    assert abs(a - b) < 1e-11


def test_oracle_reports_nonconvergence():
    with pytest.raises(OracleError) as info:
        time_oracle(lambda w: 1.0 / (w - (5 - 1e-9j)), 3.0, 1e-14, 3.0, 14.0)
    assert np.isfinite(info.value.estimate)


def test_kronrod_tables():
    assert abs(KRONROD_WEIGHTS.sum() - 2) < 1e-15
    assert abs(GAUSS_WEIGHTS.sum() - 2) < 1e-15
    for d in range(0, 24):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        k = (KRONROD_WEIGHTS * KRONROD_NODES ** d).sum()
        g = (GAUSS_WEIGHTS * KRONROD_NODES ** d).sum()
        if d <= 22:
            assert abs(k - exact) < 1e-15
        if d <= 13:
            assert abs(g - exact) < 1e-15
    assert abs((GAUSS_WEIGHTS * KRONROD_NODES ** 14).sum() - 2 / 15) > 1e-8


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=8), st.floats(-3, 1), st.floats(0.1, 4))
def test_gauss_kronrod_polynomials(coef, a, width):
    b = a + width
    poly = np.polynomial.Polynomial(coef)
    exact = poly.integ()(b) - poly.integ()(a)
    assert abs(gauss_kronrod(poly, a, b, 1e-13) - exact) < 1e-12


# -- convergence in m on the disk -------------------------------------------

def test_disk_error_decreases_with_m():
    p = WavePacket(sigma=1.0, omega0=6.0, t0=8.0)
    band = select_band(p)
    x = 2.0 + 0.0j

    def U(w):
        w = np.atleast_1d(w)
        vals = np.array([helmholtz.disk_series_reference(
            1.0, helmholtz.ComplexFrequency(wi, 0.0, 1.0), p.z0, [x])[0] for wi in w])
        return vals * packet_transform(p, x, w)

    times = np.linspace(0, 60, 13)
    ref = np.array([time_oracle(U, t, 1e-10, band.W1, band.W2) for t in times])
    errs = []
    for m in (8, 16, 32, 64):
        b = band.with_m(m)
        u = sinc_synthesize(expansion(U(b.frequencies()), b), times)[0]
        errs.append(np.max(np.abs(u - ref)))
    assert all(e1 <= 3 * e0 for e0, e1 in zip(errs, errs[1:]))
    # the finest level sits at the band-truncation floor (edge envelope e^-18)
    assert errs[-1] < 1e-6 * np.max(np.abs(ref))
    assert errs[0] > 1e3 * errs[-1]
