import numpy as np
import pytest

from hyperflow import flow, monitors, shapes
from hyperflow.flow import FlowConfig
from hyperflow.geometry import build_graph_geometry
from hyperflow.grid import PolarGrid


def test_constants_closed_forms():
    c = monitors.constants(2, 1.0)
    assert c.omega == pytest.approx(2.0 * np.pi)
    assert c.lam == pytest.approx(2.0 * np.pi * (np.cosh(1.0) - 1.0), rel=1e-12)
    assert c.Lam == pytest.approx(2.0 / np.tanh(1.0), rel=1e-12)
    # q(disk) = -4 lam + Lam 2 pi sinh(1) = 4 pi (2 - cosh(1))
    assert c.willmore_rhs == pytest.approx(4.0 * np.pi * (2.0 - np.cosh(1.0)),
                                           rel=1e-12)
    assert c.lam == pytest.approx(3.41227626528, rel=1e-10)
    assert c.willmore_rhs == pytest.approx(5.74181808378, rel=1e-10)


def test_constants_n3():
    c = monitors.constants(3, 0.7)
    assert c.omega == pytest.approx(4.0 * np.pi)
    # closed form of int sinh^2 = (sinh(2r)/2 - r)/2
    integral = (np.sinh(1.4) / 2.0 - 0.7) / 2.0
    assert c.lam == pytest.approx(4.0 * np.pi * integral, rel=1e-10)
    with pytest.raises(ValueError):
        monitors.constants(1, 1.0)


def test_disk_attains_willmore_equality(ball, grid):
    const = monitors.constants(2, 1.0)
    geo = build_graph_geometry(grid, shapes.totally_geodesic_disk(grid), ball)
    q = monitors.willmore_q(geo, const)
    assert q == pytest.approx(const.willmore_rhs, rel=1e-2)


def test_caps_exceed_willmore_bound(ball, grid):
    const = monitors.constants(2, 1.0)
    for lam_c in (1.5, 2.0, 3.0):
        geo = build_graph_geometry(grid, shapes.cap_graph(lam_c, grid), ball)
        assert monitors.willmore_q(geo, const) > const.willmore_rhs


def test_record_fields(ball, grid):
    const = monitors.constants(2, 1.0)
    geo = build_graph_geometry(grid, shapes.cap_graph(2.0, grid), ball)
    rec = monitors.record_from_geometry(geo, const)
    assert rec.t == 0.0
    assert rec.min_H > 0.0
    assert rec.min_H <= rec.max_H
    assert rec.area > 0.0
    assert rec.min_kappa > 0.0
    assert len(monitors.TimeSeriesRecord.CSV_FIELDS) == 13


def test_static_suite_green_on_cap_and_disk(ball, grid):
    for u in (shapes.cap_graph(2.0, grid), shapes.totally_geodesic_disk(grid)):
        checks = monitors.static_identity_suite(build_graph_geometry(grid, u, ball))
        failed = [c.name for c in checks if not c.passed]
        assert failed == []


def test_static_suite_strict_signs_on_cap(ball, grid):
    geo = build_graph_geometry(grid, shapes.cap_graph(2.0, grid), ball)
    assert np.all(geo.nu0 < 0.0)
    assert np.all(geo.z1[:-1] > 0.0)
    assert np.all(geo.nu1 < 0.0)


def test_static_suite_residuals_refine(ball):
    names = ("laplacian_z", "grad_eta_log_z0", "grad_eta_zi")
    res = {}
    for nr, nt in ((24, 48), (48, 96)):
        g = PolarGrid(nr, nt)
        checks = monitors.static_identity_suite(
            build_graph_geometry(g, shapes.cap_graph(2.0, g), ball))
        res[nr] = {c.name: c.residual for c in checks}
    for name in names:
        assert res[48][name] < res[24][name]


def test_monotone_violation():
    assert monitors.monotone_violation(np.array([3.0, 2.0, 1.0]), 0.0) < 0.0
    assert monitors.monotone_violation(np.array([1.0, 2.0]), 0.0) == 1.0
    assert monitors.monotone_violation(np.array([1.0]), 0.0) == 0.0


def test_fit_totally_geodesic_disk_exact(ball, grid):
    geo = build_graph_geometry(grid, shapes.totally_geodesic_disk(grid), ball)
    w, proxy = monitors.fit_totally_geodesic(geo)
    assert proxy < 1e-12
    # plane normal is the axis direction of the ball coordinates
    assert abs(abs(w[0]) - 1.0) < 1e-10


def test_fit_totally_geodesic_cap_negative_control(ball, grid):
    geo = build_graph_geometry(grid, shapes.cap_graph(2.0, grid), ball)
    _, proxy = monitors.fit_totally_geodesic(geo)
    assert proxy > 0.05 * ball.r0


def test_flow_identity_suite_on_short_run():
    cfg = FlowConfig(grid_radial=24, grid_angular=48, t_max=0.05)
    traj = flow.run(cfg)
    const = monitors.constants(2, 1.0)
    checks = monitors.flow_identity_suite(traj, const)
    names = {c.name for c in checks}
    assert {"q_decreasing", "zeta_bounded", "area_growth", "convexity"} <= names
    failed = [c.name for c in checks if not c.passed and c.name != "int_H2_decay"]
    assert failed == []


def test_evolution_residuals_small_on_flow():
    cfg = FlowConfig(grid_radial=24, grid_angular=48, t_max=0.03,
                     probe_times=(0.02,))
    traj = flow.run(cfg)
    assert traj.probes
    p = traj.probes[0]
    from hyperflow.flow import AzimuthalFilter
    res = monitors.evolution_residuals(
        traj.grid, traj.final.cfg, p.times, p.us,
        smooth=AzimuthalFilter(traj.grid))
    assert res.z0 < 0.05
    assert res.z1 < 0.05
    assert res.log_H < 0.5
    assert res.t == pytest.approx(p.times[1])
