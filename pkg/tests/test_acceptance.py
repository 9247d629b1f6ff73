"""Acceptance gate: every primary criterion, one pass/fail line each.

Reference configuration: n = 2, rho0 = 1, grid 48x96, initial cap
lambda_c = 2, explicit RK2, cfl_sigma 0.25.  The reference run stops on
the area target at 99.99% of the limiting disk area (h_min_stop 0.015):
the plane-fit criterion measures distance to the limit shape and is only
meaningful near the end of the maximal existence interval.
"""

import numpy as np
import pytest

from hyperflow import cli, flow, monitors, shapes
from hyperflow.flow import AzimuthalFilter, FlowConfig
from hyperflow.geometry import build_graph_geometry, mean_curvature_chart
from hyperflow.grid import PolarGrid
from hyperflow.hyperbolic import BallConfig

BALL = BallConfig(2, 1.0)
CONST = monitors.constants(2, 1.0)


def criterion(name: str, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    assert passed, f"{name}: {detail}"


def deep_config(nr: int, nt: int) -> FlowConfig:
    return FlowConfig(grid_radial=nr, grid_angular=nt, initial="cap",
                      lambda_c=2.0, mode="imcf", cfl_sigma=0.25,
                      h_min_stop=0.015, area_stop_tol=1e-4, t_max=10.0,
                      snapshot_every=0.05, probe_times=(0.02,))


@pytest.fixture(scope="session")
def reference_run():
    return flow.run(deep_config(48, 96))


@pytest.fixture(scope="session")
def coarse_run():
    return flow.run(deep_config(24, 48))


def test_kernel_accuracy():
    H_exact = 2.0 / np.tanh(0.5)
    errs = []
    for nr, nt in ((16, 24), (32, 48), (64, 96)):
        geo = shapes.geodesic_sphere_patch(0.5, PolarGrid(nr, nt), BALL)
        errs.append(float(np.max(np.abs(geo.H - H_exact)) / H_exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    criterion("kernel_accuracy",
              errs[-1] < 1e-3 and np.all(orders >= 1.8),
              f"rel H error {errs[-1]:.2e} at 64x96, orders "
              f"{orders[0]:.2f}/{orders[1]:.2f}")


def test_cross_implementation():
    errs = []
    for nr, nt in ((24, 48), (48, 96)):
        g = PolarGrid(nr, nt)
        u = shapes.cap_graph(2.0, g)
        geo = build_graph_geometry(g, u, BALL)
        Hc = mean_curvature_chart(g, u, BALL)
        errs.append(float(np.max(np.abs(Hc - geo.H) / np.abs(geo.H))))
    order = float(np.log2(errs[0] / errs[1]))
    criterion("cross_implementation",
              errs[-1] < 1e-3 and order >= 1.8,
              f"chart vs embedding rel diff {errs[-1]:.2e}, order {order:.2f}")


def test_umbilicity():
    devs = []
    for nr, nt in ((48, 96), (96, 192)):
        g = PolarGrid(nr, nt)
        geo = build_graph_geometry(g, shapes.cap_graph(2.0, g), BALL)
        devs.append(float(np.max((geo.kappa2 - geo.kappa1) / geo.H)))
    criterion("umbilicity",
              devs[0] < 1e-2 and devs[1] < 0.5 * devs[0],
              f"cap principal-curvature spread {devs[0]:.2e} -> {devs[1]:.2e}")


def test_static_identities():
    conv_names = ("laplacian_z", "grad_eta_log_z0", "grad_eta_zi",
                  "boundary_A_X_eta", "conformal_killing")
    worst = []
    ok = True
    for build in (shapes.cap_graph, lambda _, g: shapes.totally_geodesic_disk(g)):
        res = {}
        for nr, nt in ((24, 48), (48, 96)):
            g = PolarGrid(nr, nt)
            u = build(2.0, g)
            checks = monitors.static_identity_suite(build_graph_geometry(g, u, BALL))
            res[nr] = {c.name: c for c in checks}
        for name in conv_names:
            coarse, fine = res[24][name].residual, res[48][name].residual
            ok &= res[48][name].passed
            # exact-to-roundoff residuals are exempt from the decrease test
            ok &= fine <= coarse or fine < 1e-9
            worst.append(fine)
    # strict sign / position-normal conditions on the convex cap fixture
    g = PolarGrid(48, 96)
    geo = build_graph_geometry(g, shapes.cap_graph(2.0, g), BALL)
    cap_checks = {c.name: c for c in monitors.static_identity_suite(geo)}
    signs = all(cap_checks[k].passed
                for k in ("nu0_negative", "position_normal", "z1_positive"))
    ok &= signs and bool(np.all(geo.nu0 < 0.0))
    criterion("static_identities", ok,
              f"worst refined residual {max(worst):.2e}, signs strict: {signs}")


def test_flow_area_growth(reference_run):
    recs = reference_run.records
    t = np.array([r.t for r in recs])
    a = np.array([r.area for r in recs])
    T_star = flow.predicted_T_star(a[0], CONST)
    sel = t <= 0.9 * T_star
    ratio = a[sel] * np.exp(-t[sel]) / a[0]
    criterion("flow_area_growth",
              bool(np.all((ratio > 0.99) & (ratio < 1.01))),
              f"area e^-t / area0 in [{ratio.min():.5f}, {ratio.max():.5f}] "
              f"for t <= 0.9 T*")


def test_flow_stop_time(reference_run):
    a0 = reference_run.records[0].area
    T_star = flow.predicted_T_star(a0, CONST)
    t_stop = reference_run.final.time
    criterion("flow_stop_time",
              abs(t_stop - T_star) <= 0.1 * T_star,
              f"stopped ({reference_run.stop_reason}) at t = {t_stop:.4f}, "
              f"T* = {T_star:.4f}")


def test_flow_limit_shape(reference_run):
    w, proxy = monitors.fit_totally_geodesic(reference_run.final)
    criterion("flow_limit_shape", proxy < 0.02 * BALL.r0,
              f"plane-fit proxy {proxy / BALL.r0:.4f} r0 < 0.02 r0")


def test_flow_willmore_monotone(reference_run):
    q = np.array([r.q for r in reference_run.records])
    viol = monitors.monotone_violation(q, 0.0)
    criterion("flow_willmore_monotone",
              bool(np.all(np.diff(q) < 0.0)) or viol <= 1e-3,
              f"worst q increase {viol:.2e} (slack 1e-3)")


def test_flow_zeta_monotone(reference_run):
    z = np.array([r.zeta_max for r in reference_run.records])
    viol = monitors.monotone_violation(z, 0.0)
    criterion("flow_zeta_monotone", viol <= 1e-3,
              f"worst max-zeta increase {viol:.2e} (slack 1e-3)")


def test_flow_int_H2_decay(reference_run):
    recs = reference_run.records
    ratio = recs[-1].int_H2 / recs[0].int_H2
    criterion("flow_int_H2_decay", ratio <= 0.05,
              f"int H^2 at stop is {100.0 * ratio:.2f}% of initial")


def test_flow_stahl_boundary(reference_run, coarse_run):
    def midflow_stahl(traj):
        recs = traj.records
        t_mid = 0.5 * traj.final.time
        k = int(np.argmin([abs(r.t - t_mid) for r in recs]))
        return recs[k].stahl_res

    fine, coarse = midflow_stahl(reference_run), midflow_stahl(coarse_run)
    criterion("flow_stahl_boundary", fine <= 0.05 and fine < coarse,
              f"mid-flow Stahl residual {fine:.2e} (coarse {coarse:.2e})")


def test_flow_convexity(reference_run):
    kmin = min(r.min_kappa for r in reference_run.records)
    criterion("flow_convexity", kmin > 0.0,
              f"min principal curvature along the run {kmin:.4f} > 0 "
              "(strict-mode abort never tripped)")


def test_willmore_inequality():
    g = PolarGrid(48, 96)
    qs = []
    fixtures = [shapes.cap_graph(2.0, g)]
    for eps, mode in ((0.05, "radial"), (-0.05, "radial"), (0.1, "radial"),
                      (0.05, "angular"), (0.1, "angular")):
        fixtures.append(shapes.perturbed_cap(2.0, eps, g, mode=mode))
    for u in fixtures:
        geo = build_graph_geometry(g, u, BALL)
        qs.append(monitors.willmore_q(geo, CONST))
    geo_disk = build_graph_geometry(g, shapes.totally_geodesic_disk(g), BALL)
    q_disk = monitors.willmore_q(geo_disk, CONST)
    eq_rel = abs(q_disk - CONST.willmore_rhs) / CONST.willmore_rhs
    criterion("willmore_inequality",
              all(q > CONST.willmore_rhs for q in qs) and eq_rel < 1e-2,
              f"min fixture q {min(qs):.4f} > {CONST.willmore_rhs:.4f}, "
              f"disk equality rel err {eq_rel:.2e}")


def test_evolution_residuals(reference_run, coarse_run):
    def residuals(traj):
        p = traj.probes[0]
        return monitors.evolution_residuals(
            traj.grid, traj.final.cfg, p.times, p.us,
            smooth=AzimuthalFilter(traj.grid))

    rc, rf = residuals(coarse_run), residuals(reference_run)
    factors = (rc.z0 / rf.z0, rc.z1 / rf.z1, rc.log_H / rf.log_H)
    criterion("evolution_residuals",
              all(f >= 3.0 for f in factors),
              "z0/z1/logH residual factors per refinement "
              f"{factors[0]:.1f}/{factors[1]:.1f}/{factors[2]:.1f} >= 3")


def test_mcf_strictification():
    g = PolarGrid(48, 96)
    u0, eps = shapes.weakly_convex_fixture(2.0, g, BALL, mode="radial")
    k0 = shapes.min_principal_curvature(g, u0, BALL)
    assert 0.0 <= k0 <= 1e-4
    cfg = FlowConfig(grid_radial=48, grid_angular=96, initial="perturbed",
                     lambda_c=2.0, eps=eps, perturb_mode="radial",
                     mode="mcf", t_max=0.01, record_stride=1)
    traj = flow.run(cfg)
    k_end = float(np.min(traj.final.kappa1))
    t = np.array([r.t for r in traj.records])
    a = np.array([r.area for r in traj.records])
    ih2 = np.array([r.int_H2 for r in traj.records])
    area_monotone = bool(np.all(np.diff(a) < 0.0))
    drop = a[-1] - a[0]
    predicted = -np.trapezoid(ih2, t)
    rel = abs(drop - predicted) / abs(predicted)
    criterion("mcf_strictification",
              k_end >= 1e-3 and area_monotone and rel < 0.05,
              f"min kappa {k0:.1e} -> {k_end:.3f}, area change {drop:.3e} vs "
              f"-int H^2 {predicted:.3e} (rel {rel:.2%})")


def test_determinism(tmp_path):
    text = ("grid_radial = 24\ngrid_angular = 48\ninitial = cap\n"
            "lambda_c = 2.0\nmode = imcf\nt_max = 0.05\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert cli.main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append((out / "series.csv").read_bytes())
    criterion("determinism", outs[0] == outs[1],
              f"two runs, {len(outs[0])} bytes of series.csv, byte-identical")
