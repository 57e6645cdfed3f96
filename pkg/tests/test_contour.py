import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfscatter.contour import (ContourError, ContourSpec, contour_assemble, correction_node_count,
                               correction_rule, correction_term, default_delta, delta_limit)
from tfscatter.validation import (contour_identity, delta_independence_error, entire_identity_error,
                                  rational, rational_identity_error)

SPEC = ContourSpec(3.0, 14.0, 0.02, 200.0)


def test_delta_limit_values():
    assert abs(delta_limit(200) - 0.0237) < 1e-3
    assert abs(delta_limit(500) - 0.0095) < 1e-3
    assert abs(delta_limit(100) - 0.0473) < 1e-4
    assert delta_limit(100) == pytest.approx(2 * delta_limit(200), rel=1e-15)
    with pytest.raises(ValueError):
        delta_limit(0.0)


def test_default_delta():
    assert default_delta(100.0) == 0.025
    assert default_delta(500.0) == pytest.approx(0.8 * delta_limit(500.0))


def test_node_count():
    assert correction_node_count(0.02, 200) == 28
    assert correction_node_count(0.0, 200) == 20
    assert correction_node_count(1e-9, 10) == 21
    with pytest.raises(ContourError):
        correction_node_count(0.0473, 1000)
    n = [correction_node_count(delta_limit(T), T) for T in np.geomspace(1, 5000, 50)]
    assert min(n) >= 20 and max(n) <= 150


def test_spec_validation():
    with pytest.raises(ContourError):
        ContourSpec(5.0, 4.0, 0.01, 100.0)
    with pytest.raises(ContourError):
        ContourSpec(3.0, 14.0, -0.01, 100.0)
    ContourSpec(3.0, 14.0, delta_limit(100.0), 100.0)


def test_rule_orientation():
    L, R = correction_rule("left", SPEC), correction_rule("right", SPEC)
    assert L.sign == -1 and R.sign == 1
    assert np.allclose(L.omega.real, 3.0) and np.allclose(R.omega.real, 14.0)
    assert 0 < L.nodes.min() and L.nodes.max() < 0.02
    assert abs(R.weights.sum() - 0.02) < 1e-16
    with pytest.raises(ValueError):
        correction_rule("top", SPEC)


def test_constant_integrand_at_time_zero():
    R, L = correction_rule("right", SPEC), correction_rule("left", SPEC)
    assert abs(correction_term(np.ones(R.n_c), R, 0.0) - 0.02j) < 1e-14
    assert abs(correction_term(np.ones(L.n_c), L, 0.0) + 0.02j) < 1e-14


def test_zero_segment_and_shapes():
    R = correction_rule("right", SPEC)
    assert correction_term(np.zeros(R.n_c), R, 50.0) == 0
    out = correction_term(np.ones((3, R.n_c)), R, np.array([0.0, 1.0]))
    assert out.shape == (3, 2)


def test_nonfinite_segment_names_node():
    R = correction_rule("right", SPEC)
    U = np.ones(R.n_c, complex)
    U[4] = np.nan
    with pytest.raises(ContourError, match="omega"):
        correction_term(U, R, 10.0)
    with pytest.raises(ContourError):
        correction_term(np.ones(R.n_c + 1), R, 10.0)


def test_exact_segment_integral():
    # int_0^delta e^{v (t + a)} dv for U = e^{i omega a}-like growth, closed form
    R = correction_rule("right", SPEC)
    a, t = 3.0, 120.0
    U = np.exp(R.nodes * a)
    s = t + a
    exact = 1j * np.exp(-1j * 14.0 * t) * (math.exp(0.02 * s) - 1) / s
    assert abs(correction_term(U, R, t) - exact) < 1e-14 * abs(exact) * 10


def test_doubling_nodes_is_converged():
    for side in ("left", "right"):
        r1 = correction_rule(side, SPEC)
        r2 = correction_rule(side, SPEC, 2 * r1.n_c)
        t = np.array([10.0, 100.0, 200.0])
        a = correction_term(rational(r1.omega), r1, t)
        b = correction_term(rational(r2.omega), r2, t)
        assert np.max(np.abs(a - b) / np.abs(b)) <= 1e-10


def test_growth_factor_bounded():
    T = 500.0
    spec = ContourSpec(3.0, 14.0, delta_limit(T), T)
    R = correction_rule("right", spec)
    worst = np.max(R.nodes) * T
    assert worst <= 1024 * math.log(2) / 150 + 1e-12
    out = correction_term(np.ones(R.n_c), R, np.linspace(0, T, 11))
    assert np.all(np.isfinite(out)) and np.max(np.abs(out)) < spec.delta * math.exp(4.74)


def test_assemble():
    assert contour_assemble(2.0 + 1j, 0.0, 0.0) == 2.0 + 1j
    assert contour_assemble(5.0, 1.0, 2.0) == 2.0


def test_degenerate_rectangle():
    I0, asm = contour_identity(rational, 30.0, 0.0)
    assert I0 == asm
    spec = ContourSpec(3.0, 14.0, 0.0, 100.0)
    R = correction_rule("right", spec)
    assert correction_term(rational(R.omega), R, 30.0) == 0


def test_rational_identity():
    assert rational_identity_error() <= 1e-8


def test_delta_independence():
    assert delta_independence_error() <= 1e-8


def test_entire_identity():
    assert entire_identity_error() <= 1e-9


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2.0), min_size=1, max_size=5),
       st.floats(1.0, 30.0), st.floats(0.002, 0.02))
def test_polynomial_cauchy(coef, t, delta):
    c = np.array(coef, dtype=complex)
    if not np.any(np.abs(c) > 0.1):
        c[0] = 1.0
    f = lambda w: np.polyval(c, np.asarray(w) - 8.0)
    I0, asm = contour_identity(f, t, delta)
    scale = np.sum(np.abs(c) * 6.0 ** np.arange(c.size)[::-1]) * 11.0
    assert abs(I0 - asm) <= 1e-9 * max(abs(I0), 1e-3 * scale)
