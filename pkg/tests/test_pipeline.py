import math
from dataclasses import replace

import numpy as np
import pytest

from tfscatter.contour import delta_limit
from tfscatter.incident import WavePacket
from tfscatter.pipeline import (ConfigError, GridSpec, ScattererSpec, SimConfig, inject_fault,
                                run_simulation, verify_assembly)
from tfscatter.validation import disk_config, disk_pipeline_error


@pytest.fixture(scope="module")
def undamped():
    return run_simulation(disk_config(0.0))


@pytest.fixture(scope="module")
def damped():
    return run_simulation(disk_config(0.8 * delta_limit(40.0)))


def test_zero_amplitude_gives_zero_field():
    cfg = disk_config(None, packet=WavePacket(amplitude=0.0), m=32)
    sol = run_simulation(cfg)
    assert not np.any(sol.probe_u)
    assert not sol.flagged


def test_undamped_matches_series_oracle(undamped):
    assert undamped.meta["delta"] == 0 and undamped.meta["n_c"] == 0
    assert disk_pipeline_error(undamped) <= 1e-6


def test_damped_matches_series_oracle(damped):
    assert damped.meta["n_c"] >= 20
    assert disk_pipeline_error(damped) <= 1e-6


def test_damped_and_undamped_agree(undamped, damped):
    assert np.max(np.abs(undamped.probe_u - damped.probe_u)) <= 1e-7


def test_metadata(damped):
    meta = damped.meta
    assert meta["resolved"] and not meta["flags"]
    assert meta["max_residual"] <= 1e-8
    assert meta["n_solves"] == 2 * meta["m"] + 1 + 2 * meta["n_c"] or meta["n_solves"] > 2 * meta["m"]
    assert set(meta["timings"]) >= {"geometry", "horizontal", "vertical", "synthesis", "total"}


def test_audit_passes(damped, undamped):
    rep = verify_assembly(damped, spot_checks=10)
    assert rep["passed"] and rep["max_discrepancy"] <= 1e-12 and len(rep["checks"]) == 10
    assert not rep["corrections_zero"]
    rep0 = verify_assembly(undamped)
    assert rep0["passed"] and rep0["corrections_zero"]


@pytest.mark.parametrize("term", ["I_delta", "I_cR", "u"])
def test_audit_catches_corruption(term):
    sol = run_simulation(disk_config(0.02, m=48, T=40.0))
    assert verify_assembly(sol)["passed"]
    inject_fault(sol, term, size=1e-8)
    assert not verify_assembly(sol)["passed"]


def test_worker_count_independence(damped):
    sol = run_simulation(disk_config(0.8 * delta_limit(40.0), workers=3))
    assert sol.meta["workers"] == 3
    assert damped.probe_u.tobytes() == sol.probe_u.tobytes()


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("TFSCATTER_WORKERS", "2")
    assert disk_config(0.0, workers=1).resolved_workers() == 2


def test_masked_probes_are_nan():
    cfg = disk_config(0.0, probes=((0.0, 0.0), (3.0, 0.0)), m=32)
    sol = run_simulation(cfg)
    assert np.all(np.isnan(sol.probe_u[0].real)) and np.all(sol.probe_u[0].imag == 0)
    assert np.all(np.isfinite(sol.probe_u[1]))


def test_grid_snapshot_total_field():
    grid = GridSpec(-3.0, 3.0, -2.0, 2.0, 13, 9, (20.0, 30.0))
    cfg = replace(disk_config(0.0, m=48), grid=grid)
    sol = run_simulation(cfg)
    assert sol.grid_u.shape == (2, 9, 13)
    centre = sol.grid_u[:, 4, 6]
    assert np.all(np.isnan(centre.real))
    assert np.isfinite(sol.grid_u[:, 0, 0]).all()
    scat = run_simulation(replace(cfg, grid_field="scattered"))
    inc = sol.grid_u - scat.grid_u
    ok = np.isfinite(inc)
    assert np.max(np.abs(inc[ok])) > 0


@pytest.mark.parametrize("kwargs", [
    {"delta": 0.2, "T": 40.0},
    {"T": -1.0},
    {"m": 0},
    {"probe_times": (50.0,), "T": 40.0},
    {"grid_field": "phase"},
])
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        SimConfig(**kwargs)


def test_causality_before_arrival(damped):
    # first arrival at a probe: the packet reaches the disk near x = -1 at time t0 - 1,
    # and the scattered wave needs |x + 1| more
    p = damped.meta["packet"]
    for k, x in enumerate(damped.probes):
        t_first = p.t0 - 1 + abs(x - (-1.0)) - 6 * p.sigma
        u = np.abs(damped.probe_u[k])
        early = damped.probe_times < t_first
        assert np.max(u[early], initial=0.0) <= 1e-4 * np.max(u)


def test_scaled_crescents_damping_helps():
    # two small crescents; damped and undamped runs at the same m against a
    # 4x-resolved damped reference
    T = 60.0
    packet = WavePacket(sigma=1.5, omega0=5.0, t0=12.0, z0=(0.0, -1.0))
    base = SimConfig(scatterer=ScattererSpec("crescents", {"r": 1.0}, 16, None, 0), packet=packet,
                     T=T, probes=((0.0, 0.3), (0.0, 4.0)), probe_times=tuple(np.linspace(0, T, 61)))
    m = 100
    damped = run_simulation(replace(base, delta=0.02, m=m))
    plain = run_simulation(replace(base, delta=0.0, m=m))
    ref = run_simulation(replace(base, delta=0.02, m=4 * m))
    ed = np.max(np.abs(damped.probe_u - ref.probe_u))
    eu = np.max(np.abs(plain.probe_u - ref.probe_u))
    assert ed < eu
    assert np.max(np.abs(damped.probe_u - plain.probe_u)) > 0
