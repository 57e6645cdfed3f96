import math
import time

import numpy as np
import pytest

from tfscatter.geometry import build_scatterer, discretize
from tfscatter.helmholtz import (ComplexFrequency, Density, OperatorMatrix, SingularOperatorError,
                                 assemble_cfie, disk_series_reference, evaluate_field, plane_wave,
                                 point_source, solve_density)
from tfscatter.validation import disk_error, interior_source_error, probe_ring


@pytest.fixture(scope="module")
def disk():
    return discretize(build_scatterer("disk"), 16, 16)


def disk_solve(bdy, kappa):
    f = ComplexFrequency.from_complex(kappa)
    A = assemble_cfie(bdy, f)
    return A, solve_density(A, -plane_wave(f, (1.0, 0.0), bdy.z))


@pytest.mark.parametrize("kappa", [5.0, 5 + 0.02j])
def test_disk_matches_series(kappa):
    assert disk_error(kappa) <= 1e-8


def test_disk_single_target(disk):
    f = ComplexFrequency(5.0)
    _, dens = disk_solve(disk, 5.0)
    u = evaluate_field(disk, dens, [(2.0, 0.0)])
    ref = disk_series_reference(1.0, f, (1.0, 0.0), [(2.0, 0.0)])
    assert abs(u[0] - ref[0]) <= 1e-8 * abs(ref[0])


def test_series_satisfies_dirichlet_condition():
    for kappa in (5.0, 5 + 0.02j, 12.0):
        f = ComplexFrequency.from_complex(kappa)
        x = np.exp(1j * np.linspace(0, 2 * math.pi, 37))
        total = disk_series_reference(1.0, f, (0.6, 0.8), x) + plane_wave(f, (0.6, 0.8), x)
        assert np.max(np.abs(total)) <= 1e-10


def test_residual_is_small(disk):
    _, dens = disk_solve(disk, 5.0)
    assert dens.residual <= 1e-12


def test_factorization_reproduces_matrix(disk):
    A, _ = disk_solve(disk, 5.0)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(A.n) + 1j * rng.standard_normal(A.n)
    b = A.A @ x
    assert np.linalg.norm(A.solve(b) - x) <= 1e-12 * np.linalg.norm(x) * 10


def test_zero_data_gives_zero_density(disk):
    A, _ = disk_solve(disk, 5.0)
    dens = solve_density(A, np.zeros(A.n))
    assert not np.any(dens.values)
    u = evaluate_field(disk, dens, [(3.0, 0.0), (0.0, -4.0)])
    assert not np.any(u)


def test_rhs_length_checked(disk):
    A, _ = disk_solve(disk, 5.0)
    with pytest.raises(ValueError):
        solve_density(A, np.ones(A.n + 1))


def test_factorization_reused():
    bdy = discretize(build_scatterer("disk"), 16, 32)
    f = ComplexFrequency(5.0)
    A = assemble_cfie(bdy, f)
    rhs = -plane_wave(f, (1.0, 0.0), bdy.z)
    t = time.perf_counter()
    solve_density(A, rhs)
    first = time.perf_counter() - t
    assert A.factorized
    second = min(_timed(lambda: solve_density(A, 2 * rhs)) for _ in range(5))
    assert second * 10 <= first


def _timed(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


def test_singular_operator_reports_frequency():
    f = ComplexFrequency(7.0, 0.01)
    A = OperatorMatrix(np.zeros((4, 4), complex), f, 7.0)
    with pytest.raises(SingularOperatorError, match="7.0"):
        solve_density(A, np.ones(4))


def test_negative_damping_rejected():
    with pytest.raises(ValueError):
        ComplexFrequency(5.0, -0.1)
    with pytest.raises(ValueError):
        ComplexFrequency(0.0)


def test_masked_targets_are_nan(disk):
    _, dens = disk_solve(disk, 5.0)
    u = evaluate_field(disk, dens, [(0.2, 0.1), (1.0 + 1e-9, 0.0), (2.0, 0.0)])
    assert np.isnan(u[0]) and np.isnan(u[1]) and np.isfinite(u[2])


def test_near_boundary_targets_are_accurate(disk):
    f = ComplexFrequency(5.0)
    _, dens = disk_solve(disk, 5.0)
    x = (1 + np.array([1e-3, 1e-2, 0.1])) * np.exp(0.3j)
    ref = disk_series_reference(1.0, f, (1.0, 0.0), x)
    assert np.max(np.abs(evaluate_field(disk, dens, x) - ref)) <= 1e-8


def test_keyhole_interior_source():
    err, _, probes = interior_source_error()
    assert probes.size == 20
    assert err <= 1e-6


def test_crescents_interior_source():
    # the tips of the crescents need the long-panel bisection of the default discretization
    err, _, _ = interior_source_error("crescents", 3 + 0.01j, source=(-1.5, 12.0), corner_depth=0)
    assert err <= 1e-7


def test_c_curve_interior_source():
    # the source sits mid-band, only 0.1 from the boundary
    err, _, _ = interior_source_error("c_curve", 6 + 0.02j, source=(3.0, 0.0), corner_depth=0)
    assert err <= 1e-6


def test_coupling_mismatch_is_detected():
    bdy = discretize(build_scatterer("c_curve"))
    f = ComplexFrequency(4.0, 0.02)
    A = assemble_cfie(bdy, f)
    dens = solve_density(A, point_source(f, (3.0, 0.0), bdy.z))
    probes = probe_ring(bdy, 20, 0.1)
    ref = point_source(f, (3.0, 0.0), probes)
    good = evaluate_field(bdy, dens, probes)
    bad = evaluate_field(bdy, Density(dens.values, f, dens.coupling / 2), probes)
    assert np.max(np.abs(good - ref)) < 1e-5 * np.max(np.abs(ref))
    assert np.max(np.abs(bad - ref)) > 1e-3 * np.max(np.abs(ref))


def test_damped_solves_are_well_posed(disk):
    _, base = disk_solve(disk, 5.0)
    for delta in (0.01, 0.05, 0.1):
        _, dens = disk_solve(disk, 5 + 1j * delta)
        u = evaluate_field(disk, dens, [(2.5, 1.0)])
        assert np.all(np.isfinite(u))
        assert dens.residual <= 10 * max(base.residual, 1e-16)


def test_keyhole_self_convergence():
    # doubling the panel count moves far-field values by no more than 10x the
    # interior-source error estimate at the coarse level
    kappa = 4.0
    err, coarse, probes = interior_source_error("keyhole", kappa, base_panels=24)
    fine = discretize(build_scatterer("keyhole"), 16, 48)
    f = ComplexFrequency.from_complex(kappa)
    far = 6.0 * np.exp(2j * math.pi * np.arange(8) / 8)

    def field(bdy):
        A = assemble_cfie(bdy, f)
        dens = solve_density(A, -plane_wave(f, (1.0, 0.0), bdy.z))
        return evaluate_field(bdy, dens, far)
    a, b = field(coarse), field(fine)
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) <= 10 * max(err, 1e-12)
