import numpy as np
import pytest

from hyperflow import flow, monitors, shapes
from hyperflow.flow import (AzimuthalFilter, FlowConfig, FlowDegenerateError,
                            FlowEngine, initial_graph, predicted_T_star)
from hyperflow.grid import PolarGrid
from hyperflow.hyperbolic import DomainError


def small_cfg(**kw):
    base = dict(grid_radial=24, grid_angular=48, t_max=0.05)
    base.update(kw)
    return FlowConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(cfl_sigma=0.0)
    with pytest.raises(ValueError):
        FlowConfig(cfl_sigma=0.6)
    with pytest.raises(ValueError):
        FlowConfig(mode="level_set")
    with pytest.raises(ValueError):
        FlowConfig(initial="torus")
    with pytest.raises(ValueError):
        FlowConfig(t_max=-1.0)


def test_predicted_T_star():
    const = monitors.constants(2, 1.0)
    assert predicted_T_star(const.lam / np.e, const) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        predicted_T_star(const.lam, const)


def test_azimuthal_filter_axis_cut():
    g = PolarGrid(24, 48)
    filt = AzimuthalFilter(g)
    # high azimuthal mode survives at the rim, dies near the axis
    f = np.cos(20.0 * g.theta)[None, :] * np.ones((g.nr + 1, 1))
    out = filt(f)
    assert np.max(np.abs(out[0])) < 1e-12
    assert np.allclose(out[-1], f[-1], atol=1e-12)
    # low modes pass everywhere
    low = np.cos(g.theta)[None, :] * np.ones((g.nr + 1, 1))
    assert np.allclose(filt(low), low, atol=1e-12)


def test_neumann_enforcement_residual():
    eng = FlowEngine(small_cfg())
    rng = np.random.default_rng(0)
    u = 2.0 + 0.01 * rng.standard_normal((eng.grid.nr + 1, eng.grid.nt))
    u = eng.enforce_neumann(u)
    du = eng.grid.d_s(u)
    assert np.max(np.abs(du[-1])) < 1e-10


def test_zero_step_is_identity():
    eng = FlowEngine(small_cfg())
    u = eng.enforce_neumann(initial_graph(eng.config, eng.grid))
    un, geo = eng.step(u, 0.0, 0.0)
    assert np.array_equal(un, u)
    assert geo.time == 0.0


def test_single_step_area_growth_imcf():
    # d(area)/dt = area under IMCF: one step matches e^dt to O(dt^2)
    eng = FlowEngine(small_cfg())
    u = eng.enforce_neumann(initial_graph(eng.config, eng.grid))
    if eng.filter is not None:
        u = eng.filter(u)
    _, geo0 = eng.rhs(u, 0.0)
    dt = 1e-3
    u1, _ = eng.step(u, 0.0, dt)
    _, geo1 = eng.rhs(u1, dt)
    growth = geo1.area() / geo0.area()
    assert growth == pytest.approx(np.exp(dt), abs=5e-7)


def test_step_is_second_order_in_time():
    eng = FlowEngine(small_cfg())
    u = eng.enforce_neumann(initial_graph(eng.config, eng.grid))
    if eng.filter is not None:
        u = eng.filter(u)
    dt = 2e-3
    u_full, _ = eng.step(u, 0.0, dt)
    u_half, _ = eng.step(u, 0.0, dt / 2)
    u_half, _ = eng.step(u_half, dt / 2, dt / 2)
    err = np.max(np.abs(u_full - u_half))
    dt = dt / 2
    u_full2, _ = eng.step(u, 0.0, dt)
    u_half2, _ = eng.step(u, 0.0, dt / 2)
    u_half2, _ = eng.step(u_half2, dt / 2, dt / 2)
    err2 = np.max(np.abs(u_full2 - u_half2))
    # local error ratio ~ 2^3 for a second-order one-step method
    assert err / err2 > 5.0


def test_degenerate_initial_data_raises():
    cfg = small_cfg(initial="disk", mode="imcf")
    with pytest.raises(FlowDegenerateError):
        flow.run(cfg)


def test_disk_is_mcf_stationary():
    traj = flow.run(small_cfg(initial="disk", mode="mcf", t_max=0.02))
    assert np.max(np.abs(traj.final.u - 1.0)) < 1e-12
    assert traj.final.area() == pytest.approx(traj.records[0].area, rel=1e-12)


def test_t_max_zero_single_record():
    traj = flow.run(small_cfg(t_max=0.0))
    assert traj.stop_reason == "t_max"
    assert traj.steps == 0
    assert len(traj.records) == 1
    assert len(traj.snapshots) == 1


def test_short_run_records_and_snapshots():
    traj = flow.run(small_cfg(t_max=0.05, snapshot_every=0.02))
    t_rec = np.array([r.t for r in traj.records])
    assert np.all(np.diff(t_rec) > 0.0)
    assert t_rec[-1] == pytest.approx(0.05, abs=1e-12)
    assert len(traj.snapshots) >= 3
    # areas grow like e^t along the run
    a = np.array([r.area for r in traj.records])
    assert np.allclose(a / a[0], np.exp(t_rec), rtol=1e-4)


def test_mcf_area_decreases():
    traj = flow.run(small_cfg(mode="mcf", t_max=0.02))
    a = np.array([r.area for r in traj.records])
    assert np.all(np.diff(a) < 0.0)


def test_probe_bracketing():
    traj = flow.run(small_cfg(t_max=0.05, probe_times=(0.02,)))
    assert len(traj.probes) == 1
    p = traj.probes[0]
    assert p.times.shape == (3,)
    assert np.all(np.diff(p.times) > 0.0)
    assert p.times[1] >= 0.02
    assert p.us.shape == (3, 25, 48)


def test_h_min_stop():
    cfg = small_cfg(t_max=10.0, h_min_stop=0.9)
    traj = flow.run(cfg)
    assert traj.stop_reason == "h_min"
    assert np.min(traj.final.H) < 0.9


def test_area_target_stop():
    const = monitors.constants(2, 1.0)
    cfg = small_cfg(t_max=10.0, h_min_stop=1e-6, area_stop_tol=0.2)
    traj = flow.run(cfg)
    assert traj.stop_reason == "area_target"
    assert traj.final.area() >= 0.8 * const.lam
