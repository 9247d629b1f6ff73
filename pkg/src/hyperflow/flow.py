"""Explicit time integration of the graphical flow PDE.

Inverse mean curvature flow of a free-boundary graph lambda = u(xi, t)
in the Moebius chart: du/dt = -v/H with a homogeneous Neumann condition
d_s u = 0 on the boundary circle.  A mean curvature flow mode
(du/dt = +v H) is included for the short-time convexity strictification
experiment.  Stepping is explicit RK2 (midpoint) with an adaptive CFL
time step; a standard polar-grid azimuthal spectral filter removes the
otherwise crippling time-step restriction of the rings near the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import monitors, shapes
from .geometry import SurfaceGeometry, build_graph_geometry
from .grid import PolarGrid, fd_weights
from .hyperbolic import BallConfig, DomainError
from .monitors import Constants, TimeSeriesRecord


class FlowDegenerateError(RuntimeError):
    """IMCF speed 1/H undefined: the mean curvature lost positivity."""


class FlowAbortError(RuntimeError):
    """Step failure (NaN/Inf or convexity loss in strict mode)."""

    def __init__(self, message: str, snapshot: dict | None = None):
        super().__init__(message)
        self.snapshot = snapshot


@dataclass(frozen=True)
class FlowConfig:
    n: int = 2
    rho0: float = 1.0
    grid_radial: int = 48
    grid_angular: int = 96
    initial: str = "cap"            # cap | perturbed | disk
    lambda_c: float = 2.0
    eps: float = 0.0
    perturb_mode: str = "angular"
    mode: str = "imcf"              # imcf | mcf
    cfl_sigma: float = 0.25
    h_min_stop: float = 0.05
    t_max: float = 10.0
    max_steps: int = 10_000_000
    area_stop_tol: float = 0.01
    snapshot_every: float = 0.05
    record_stride: int = 10
    convexity_policy: str = "strict"   # strict | monitor
    polar_filter: bool = True
    probe_times: tuple[float, ...] = ()

    def __post_init__(self):
        if not (0.0 < self.cfl_sigma <= 0.5):
            raise ValueError("cfl_sigma must lie in (0, 0.5]")
        if self.h_min_stop <= 0.0 or self.t_max < 0.0 or self.max_steps <= 0:
            raise ValueError("stop thresholds must be positive")
        if self.mode not in ("imcf", "mcf"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.initial not in ("cap", "perturbed", "disk"):
            raise ValueError(f"unknown initial data {self.initial!r}")
        if self.convexity_policy not in ("strict", "monitor"):
            raise ValueError(f"unknown convexity policy {self.convexity_policy!r}")


@dataclass
class Probe:
    """Three consecutive states bracketing a probe time, for discrete
    time-derivative residuals of the evolution identities."""

    times: np.ndarray       # (3,)
    us: np.ndarray          # (3, nr+1, nt)


@dataclass
class Trajectory:
    config: FlowConfig
    grid: PolarGrid
    records: list[TimeSeriesRecord]
    snapshots: list[dict]
    probes: list[Probe]
    stop_reason: str
    steps: int
    final: SurfaceGeometry


def predicted_T_star(area0: float, const: Constants) -> float:
    """Maximal existence time log(lambda / |M_0|) of the graphical flow."""
    if area0 >= const.lam:
        raise DomainError("initial area must be below the disk volume bound")
    return math.log(const.lam / area0)


def initial_graph(cfg: FlowConfig, grid: PolarGrid) -> np.ndarray:
    if cfg.initial == "cap":
        return shapes.cap_graph(cfg.lambda_c, grid)
    if cfg.initial == "disk":
        return shapes.totally_geodesic_disk(grid)
    return shapes.perturbed_cap(cfg.lambda_c, cfg.eps, grid, mode=cfg.perturb_mode)


class AzimuthalFilter:
    """Spectral cutoff equalizing azimuthal and radial resolution.

    On a polar grid the innermost rings support azimuthal wavenumbers far
    beyond what their arc spacing can propagate stably; smooth fields
    carry only O(s^k) energy in mode k near the axis, so modes above
    k_cut(s) ~ s/ds are pure stiffness.  They are removed after every
    right-hand-side evaluation.
    """

    def __init__(self, grid: PolarGrid):
        kmax = grid.nt // 2
        kcut = np.floor(grid.s / grid.ds).astype(int)
        self.kcut = np.clip(kcut, 1, kmax)
        self.rows = np.nonzero(self.kcut < kmax)[0]
        self.nt = grid.nt

    def __call__(self, f: np.ndarray) -> np.ndarray:
        if self.rows.size == 0:
            return f
        out = f.copy()
        spec = np.fft.rfft(out[self.rows], axis=-1)
        k = np.arange(spec.shape[-1])
        spec[k[None, :] > self.kcut[self.rows][:, None]] = 0.0
        out[self.rows] = np.fft.irfft(spec, n=self.nt, axis=-1)
        return out


class FlowEngine:
    def __init__(self, config: FlowConfig):
        self.config = config
        self.grid = PolarGrid(config.grid_radial, config.grid_angular)
        self.ball = BallConfig(config.n, config.rho0)
        self.const = monitors.constants(config.n, config.rho0)
        self.filter = AzimuthalFilter(self.grid) if config.polar_filter else None
        # boundary value from d_s u = 0 using the one-sided 5-point stencil
        w = fd_weights(self.grid.s[-5:], 1.0, 1)[1]
        self._neumann_w = -w[:4] / w[4]
        # spatial stiffness scale: radial 5-point plus retained azimuthal modes
        kcut = (self.filter.kcut if self.filter is not None
                else np.full(self.grid.nr + 1, self.grid.nt // 2))
        self._eig = 6.0 / self.grid.ds ** 2 + (kcut / self.grid.s) ** 2

    def enforce_neumann(self, u: np.ndarray) -> np.ndarray:
        u = u.copy()
        u[-1] = self._neumann_w @ u[-5:-1]
        return u

    def rhs(self, u: np.ndarray, t: float):
        """Right-hand side field and the geometry it was computed from."""
        geo = build_graph_geometry(self.grid, u, self.ball, time=t)
        if not np.all(np.isfinite(geo.H)):
            raise FlowAbortError("non-finite mean curvature", geo.to_snapshot())
        if self.config.mode == "imcf":
            if np.min(geo.H) <= 0.0:
                raise FlowDegenerateError(
                    f"min H = {np.min(geo.H):.3e} <= 0: IMCF speed undefined")
            f = -geo.v / geo.H
        else:
            f = geo.v * geo.H
        if self.filter is not None:
            f = self.filter(f)
        return f, geo

    def cfl_dt(self, geo: SurfaceGeometry) -> float:
        """Largest stable explicit step, scaled by cfl_sigma.

        The principal symbol of the flow linearization is D = 1/(H^2
        phi2^2) (imcf) or 1/phi2^2 (mcf) times the flat Laplacian in chart
        coordinates; RK2 requires dt * D * eig <= 2, and cfl_sigma = 0.5
        sits exactly at that bound.
        """
        phi2_sq = geo.g_tt / np.maximum(self.grid.s ** 2, 1e-300)[:, None]
        if self.config.mode == "imcf":
            diff = 1.0 / (geo.H ** 2 * phi2_sq)
        else:
            diff = 1.0 / phi2_sq
        dt = 4.0 * self.config.cfl_sigma / np.max(diff * self._eig[:, None])
        return float(dt)

    def step(self, u: np.ndarray, t: float, dt: float):
        """One RK2 midpoint step; returns (u_new, geometry at (u, t))."""
        f1, geo = self.rhs(u, t)
        if dt == 0.0:
            return u.copy(), geo
        um = self.enforce_neumann(u + 0.5 * dt * f1)
        f2, _ = self.rhs(um, t + 0.5 * dt)
        un = self.enforce_neumann(u + dt * f2)
        if not np.all(np.isfinite(un)):
            raise FlowAbortError("non-finite graph after step", geo.to_snapshot())
        return un, geo

    def run(self) -> Trajectory:
        cfg = self.config
        u = self.enforce_neumann(initial_graph(cfg, self.grid))
        if self.filter is not None:
            u = self.filter(u)
        t = 0.0
        records: list[TimeSeriesRecord] = []
        snapshots: list[dict] = []
        probes: list[Probe] = []
        pending = sorted(cfg.probe_times)
        history: list[tuple[float, np.ndarray]] = []
        next_snap = 0.0
        steps = 0
        stop = "t_max"
        geo = None
        while True:
            f, geo = self.rhs(u, t)
            if steps % cfg.record_stride == 0:
                records.append(monitors.record_from_geometry(geo, self.const))
            if t >= next_snap:
                snapshots.append(geo.to_snapshot())
                next_snap += cfg.snapshot_every
            if cfg.mode == "imcf" and cfg.convexity_policy == "strict" \
                    and np.min(geo.kappa1) <= 0.0:
                raise FlowAbortError(
                    f"convexity lost at t = {t:.6f}", geo.to_snapshot())
            # stopping conditions
            if cfg.mode == "imcf" and np.min(geo.H) < cfg.h_min_stop:
                stop = "h_min"
                break
            if t >= cfg.t_max:
                stop = "t_max"
                break
            if cfg.mode == "imcf" \
                    and geo.area() >= (1.0 - cfg.area_stop_tol) * self.const.lam:
                stop = "area_target"
                break
            if steps >= cfg.max_steps:
                stop = "max_steps"
                break
            dt = min(self.cfl_dt(geo), cfg.t_max - t)
            try:
                um = self.enforce_neumann(u + 0.5 * dt * f)
                f2, _ = self.rhs(um, t + 0.5 * dt)
                u = self.enforce_neumann(u + dt * f2)
            except (FlowDegenerateError, FlowAbortError):
                stop = "step_failure"
                break
            if not np.all(np.isfinite(u)):
                stop = "step_failure"
                break
            t += dt
            steps += 1
            # keep a short history to bracket requested probe times
            history.append((t, u))
            if len(history) > 3:
                history.pop(0)
            if pending and len(history) == 3 and history[1][0] >= pending[0]:
                probes.append(Probe(
                    times=np.array([h[0] for h in history]),
                    us=np.stack([h[1] for h in history])))
                pending.pop(0)
        final = geo if geo is not None else self.rhs(u, t)[1]
        if not records or records[-1].t < final.time:
            records.append(monitors.record_from_geometry(final, self.const))
        if not snapshots or snapshots[-1]["t"] < final.time:
            snapshots.append(final.to_snapshot())
        return Trajectory(config=cfg, grid=self.grid, records=records,
                          snapshots=snapshots, probes=probes,
                          stop_reason=stop, steps=steps, final=final)


def run(config: FlowConfig) -> Trajectory:
    return FlowEngine(config).run()
