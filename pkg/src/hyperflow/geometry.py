"""Discrete surface geometry via the Minkowski embedding.

Curvature comes from the ambient Weingarten relation: with z the embedding
into the hyperboloid and nu the unit normal, h_ij = -<d_i d_j z, nu> in
parameter coordinates.  Tangential and position contributions of the full
Hessian drop out because nu is Minkowski-orthogonal to z and to the
tangents, so no surface Christoffels are ever needed.

A second, structurally independent computation of the mean curvature of a
graph works entirely in chart coordinates with the diagonal metric
phi1^2 dlambda^2 + phi2^2 delta and its Christoffel symbols; it exists as
a cross-check on the embedding kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import PolarGrid
from .hyperbolic import BallConfig, hyperboloid_to_ball, minkowski_inner, sphere_outward_normal
from . import moebius

_KAPPA_TINY = 1e-14


class SingularGeometryError(RuntimeError):
    """Degenerate tangents or normal; surface data is not an immersion."""


def _mink(a, b):
    # unrolled for the common 4-vector case; this sits on the hot path
    if a.shape[-1] == 4 and b.shape[-1] == 4:
        return (-a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
                + a[..., 2] * b[..., 2] + a[..., 3] * b[..., 3])
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


@dataclass
class SurfaceGeometry:
    """Per-node geometric fields of a discrete free-boundary surface."""

    grid: PolarGrid
    cfg: BallConfig
    z: np.ndarray          # (nr+1, nt, 4) hyperboloid embedding
    z_s: np.ndarray
    z_t: np.ndarray
    g_ss: np.ndarray
    g_st: np.ndarray
    g_tt: np.ndarray
    det_g: np.ndarray
    sqrt_g: np.ndarray
    gi_ss: np.ndarray
    gi_st: np.ndarray
    gi_tt: np.ndarray
    nu: np.ndarray
    h_ss: np.ndarray
    h_st: np.ndarray
    h_tt: np.ndarray
    H: np.ndarray
    kappa1: np.ndarray     # min principal curvature
    kappa2: np.ndarray     # max principal curvature
    A2: np.ndarray         # |A|^2
    u: np.ndarray | None = None
    v: np.ndarray | None = None   # graphical speed factor (graphs only)
    time: float = 0.0

    @property
    def z0(self) -> np.ndarray:
        return self.z[..., 0]

    @property
    def z1(self) -> np.ndarray:
        return self.z[..., 1]

    @property
    def nu0(self) -> np.ndarray:
        return self.nu[..., 0]

    @property
    def nu1(self) -> np.ndarray:
        return self.nu[..., 1]

    @property
    def Htilde(self) -> np.ndarray:
        """Sum of reciprocal principal curvatures; +inf where any kappa = 0."""
        out = np.full_like(self.H, np.inf)
        ok = np.abs(self.kappa1) > _KAPPA_TINY
        out[ok] = 1.0 / self.kappa1[ok] + 1.0 / self.kappa2[ok]
        return out

    # -- integrals ------------------------------------------------------

    def integrate(self, f: np.ndarray | float = 1.0) -> float:
        wf = f * self.sqrt_g * self.grid.cell_weight[:, None]
        return float(np.sum(wf))

    def area(self) -> float:
        return self.integrate(1.0)

    def boundary_length(self) -> float:
        return float(np.sum(np.sqrt(self.g_tt[-1])) * self.grid.dtheta)

    def int_H_pow(self, p: float) -> float:
        return self.integrate(self.H ** p)

    # -- differential operators ----------------------------------------

    def grad_sq(self, f: np.ndarray) -> np.ndarray:
        """|grad f|^2 = g^{ij} d_i f d_j f."""
        fs = self.grid.d_s(f)
        ft = self.grid.d_theta(f)
        return self.gi_ss * fs * fs + 2.0 * self.gi_st * fs * ft + self.gi_tt * ft * ft

    def laplace_beltrami(self, f: np.ndarray) -> np.ndarray:
        """(1/sqrt g) d_i (sqrt g g^{ij} d_j f) with the kernel's stencils."""
        fs = self.grid.d_s(f)
        ft = self.grid.d_theta(f)
        flux_s = self.sqrt_g * (self.gi_ss * fs + self.gi_st * ft)
        flux_t = self.sqrt_g * (self.gi_st * fs + self.gi_tt * ft)
        # Across the axis reflection (s, theta) -> (-s, theta + pi) the
        # smooth continuation of sqrt_g is odd and of the radial flux
        # component is odd, so their product extends evenly.
        div = self.grid.d_s(flux_s, parity=1) + self.grid.d_theta(flux_t)
        return div / self.sqrt_g

    # -- boundary quantities -------------------------------------------

    def boundary_conormal_coeffs(self):
        """Coefficients (a, c) so that grad_eta f = a (d_s f - c d_theta f) at s=1."""
        g_ss = self.g_ss[-1]
        g_st = self.g_st[-1]
        g_tt = self.g_tt[-1]
        c = g_st / g_tt
        a = 1.0 / np.sqrt(g_ss - g_st * c)
        return a, c

    def boundary_normal_derivative(self, f: np.ndarray) -> np.ndarray:
        """Derivative along the outward unit conormal of the boundary ring."""
        a, c = self.boundary_conormal_coeffs()
        fs = self.grid.d_s(f)[-1]
        ft = self.grid.d_theta(f)[-1]
        return a * (fs - c * ft)

    def boundary_cross_curvature(self) -> np.ndarray:
        """A(X, eta) for unit boundary tangent X and outward conormal eta."""
        a, c = self.boundary_conormal_coeffs()
        num = self.h_st[-1] - c * self.h_tt[-1]
        return a * num / np.sqrt(self.g_tt[-1])

    def free_boundary_residual(self) -> np.ndarray:
        """|<nu, outward sphere normal>| on the boundary ring."""
        eta_sph = sphere_outward_normal(self.z[-1])
        return np.abs(_mink(self.nu[-1], eta_sph))

    # -- serialization --------------------------------------------------

    def to_snapshot(self) -> dict:
        snap = {
            "t": self.time,
            "rho0": self.cfg.rho0,
            "n": self.cfg.n,
            "grid": {"radial": self.grid.nr, "angular": self.grid.nt},
            "u": [] if self.u is None else self.u.ravel().tolist(),
            "derived": {
                "H": self.H.ravel().tolist(),
                "kappa_min": self.kappa1.ravel().tolist(),
                "z1": self.z1.ravel().tolist(),
            },
        }
        return snap


def embed(grid: PolarGrid, u: np.ndarray, cfg: BallConfig) -> np.ndarray:
    """Hyperboloid embedding of the graph lambda = u(xi)."""
    return moebius.chart_to_hyperboloid(grid.xi, u, cfg.r0)


def fundamental_forms(
    grid: PolarGrid,
    z: np.ndarray,
    cfg: BallConfig,
    orient_against: np.ndarray,
) -> SurfaceGeometry:
    """Metric, normal and second fundamental form of an embedded surface.

    orient_against fixes the normal sign: nu satisfies <nu, orient_against> < 0.
    For graphs this is the pushforward of d/d lambda (the flow convention).
    """
    z_s = grid.d_s(z)
    z_t = grid.d_theta(z)
    z_ss = grid.d_ss(z)
    z_tt = grid.d_theta2(z)
    z_st = grid.d_stheta(z)

    g_ss = _mink(z_s, z_s)
    g_st = _mink(z_s, z_t)
    g_tt = _mink(z_t, z_t)
    det_g = g_ss * g_tt - g_st * g_st
    if np.any(det_g <= 0.0) or np.any(g_ss <= 0.0):
        raise SingularGeometryError("induced metric is not positive definite")

    # Minkowski Gram-Schmidt: orthonormalize {z, z_s, z_t}, project the
    # orientation seed off that span, normalize.
    e1 = z_s + _mink(z_s, z)[..., None] * z
    e1 = e1 / np.sqrt(_mink(e1, e1))[..., None]
    e2 = z_t + _mink(z_t, z)[..., None] * z
    e2 = e2 - _mink(e2, e1)[..., None] * e1
    e2 = e2 / np.sqrt(_mink(e2, e2))[..., None]

    w = orient_against
    nu = w + _mink(w, z)[..., None] * z
    nu = nu - _mink(nu, e1)[..., None] * e1
    nu = nu - _mink(nu, e2)[..., None] * e2
    nn = _mink(nu, nu)
    if np.any(nn <= 0.0):
        raise SingularGeometryError("normal is not spacelike")
    nu = nu / np.sqrt(nn)[..., None]
    nu = -np.sign(_mink(nu, w))[..., None] * nu

    h_ss = -_mink(z_ss, nu)
    h_st = -_mink(z_st, nu)
    h_tt = -_mink(z_tt, nu)

    gi_ss = g_tt / det_g
    gi_st = -g_st / det_g
    gi_tt = g_ss / det_g

    H = gi_ss * h_ss + 2.0 * gi_st * h_st + gi_tt * h_tt
    det_h = h_ss * h_tt - h_st * h_st
    det_S = det_h / det_g
    disc = np.sqrt(np.maximum(H * H - 4.0 * det_S, 0.0))
    kappa1 = 0.5 * (H - disc)
    kappa2 = 0.5 * (H + disc)
    A2 = kappa1 * kappa1 + kappa2 * kappa2

    return SurfaceGeometry(
        grid=grid, cfg=cfg, z=z, z_s=z_s, z_t=z_t,
        g_ss=g_ss, g_st=g_st, g_tt=g_tt, det_g=det_g, sqrt_g=np.sqrt(det_g),
        gi_ss=gi_ss, gi_st=gi_st, gi_tt=gi_tt,
        nu=nu, h_ss=h_ss, h_st=h_st, h_tt=h_tt,
        H=H, kappa1=kappa1, kappa2=kappa2, A2=A2,
    )


def cartesian_graph_derivatives(grid: PolarGrid, u: np.ndarray):
    """First and second xi-derivatives of u in Cartesian chart coordinates."""
    ur = grid.d_s(u)
    ut = grid.d_theta(u)
    urr = grid.d_ss(u)
    urt = grid.d_stheta(u)
    utt = grid.d_theta2(u)

    s = grid.s[:, None]
    c = np.cos(grid.theta)[None, :]
    sn = np.sin(grid.theta)[None, :]

    ux = c * ur - sn / s * ut
    uy = sn * ur + c / s * ut
    uxx = (
        c * c * urr - 2.0 * c * sn / s * urt + sn * sn / (s * s) * utt
        + sn * sn / s * ur + 2.0 * c * sn / (s * s) * ut
    )
    uyy = (
        sn * sn * urr + 2.0 * c * sn / s * urt + c * c / (s * s) * utt
        + c * c / s * ur - 2.0 * c * sn / (s * s) * ut
    )
    uxy = (
        c * sn * urr + (c * c - sn * sn) / s * urt - c * sn / (s * s) * utt
        - c * sn / s * ur - (c * c - sn * sn) / (s * s) * ut
    )
    du = np.stack([ux, uy], axis=-1)
    d2u = np.stack([uxx, uxy, uxy, uyy], axis=-1).reshape(u.shape + (2, 2))
    return du, d2u


def build_graph_geometry(
    grid: PolarGrid, u: np.ndarray, cfg: BallConfig, time: float = 0.0
) -> SurfaceGeometry:
    """Full geometry of the graph lambda = u, including the speed factor."""
    z = embed(grid, u, cfg)
    w = moebius.chart_lambda_tangent(grid.xi, u, cfg.r0)
    geom = fundamental_forms(grid, z, cfg, orient_against=w)
    du, _ = cartesian_graph_derivatives(grid, u)
    geom.u = u
    geom.v = moebius.speed_factor_v(grid.xi, u, du, cfg.r0)
    geom.time = time
    return geom


# -- independent chart-coordinate mean curvature ------------------------

_FD_STEP = 1e-5


def _chart_metric_factors(xi_flat: np.ndarray, lam_flat: np.ndarray, r0: float):
    """(A, B) = (phi2^2, phi1^2) at chart points, vectorized."""
    _, phi1, phi2 = moebius.chart_metric(xi_flat, lam_flat, r0)
    return phi2 * phi2, phi1 * phi1


def mean_curvature_chart(grid: PolarGrid, u: np.ndarray, cfg: BallConfig) -> np.ndarray:
    """Mean curvature of the graph computed purely in chart coordinates.

    Uses the diagonal ambient metric diag(A, A, B) with A = phi2^2,
    B = phi1^2 on coordinates (xi1, xi2, lambda), ambient Christoffel
    symbols from small central differences of the analytic metric factors,
    and the graph normal with negative lambda-component.  Shares nothing
    with the Minkowski-embedding route beyond the chart definition.
    """
    r0 = cfg.r0
    xi = grid.xi
    du, d2u = cartesian_graph_derivatives(grid, u)

    A, B = _chart_metric_factors(xi, u, r0)

    # ambient partials of A and B w.r.t. (xi1, xi2, lambda)
    dA = np.empty(u.shape + (3,))
    dB = np.empty(u.shape + (3,))
    for a in range(2):
        shift = np.zeros(2)
        shift[a] = _FD_STEP
        Ap, Bp = _chart_metric_factors(xi + shift, u, r0)
        Am, Bm = _chart_metric_factors(xi - shift, u, r0)
        dA[..., a] = (Ap - Am) / (2.0 * _FD_STEP)
        dB[..., a] = (Bp - Bm) / (2.0 * _FD_STEP)
    Ap, Bp = _chart_metric_factors(xi, u + _FD_STEP, r0)
    Am, Bm = _chart_metric_factors(xi, u - _FD_STEP, r0)
    dA[..., 2] = (Ap - Am) / (2.0 * _FD_STEP)
    dB[..., 2] = (Bp - Bm) / (2.0 * _FD_STEP)

    diag = np.stack([A, A, B], axis=-1)
    ddiag = np.stack([dA, dA, dB], axis=-2)  # (..., coord a, partial b)

    # Gamma^a_{bc} for a diagonal metric
    gamma = np.zeros(u.shape + (3, 3, 3))
    for a in range(3):
        for b in range(3):
            for c in range(3):
                t = 0.0
                if c == a:
                    t = t + ddiag[..., a, b]
                if b == a:
                    t = t + ddiag[..., a, c]
                if b == c:
                    t = t - ddiag[..., b, a]
                gamma[..., a, b, c] = 0.5 * t / diag[..., a]

    # graph tangents t_i^a and induced metric
    t_vec = np.zeros(u.shape + (2, 3))
    t_vec[..., 0, 0] = 1.0
    t_vec[..., 1, 1] = 1.0
    t_vec[..., 0, 2] = du[..., 0]
    t_vec[..., 1, 2] = du[..., 1]
    g = A[..., None, None] * np.eye(2) + B[..., None, None] * (
        du[..., :, None] * du[..., None, :]
    )
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    ginv = np.empty_like(g)
    ginv[..., 0, 0] = g[..., 1, 1] / det
    ginv[..., 1, 1] = g[..., 0, 0] / det
    ginv[..., 0, 1] = -g[..., 0, 1] / det
    ginv[..., 1, 0] = -g[..., 1, 0] / det

    # downward covariant normal (u_1, u_2, -1), normalized in the chart metric
    n_cov = np.concatenate([du, -np.ones(u.shape + (1,))], axis=-1)
    n_norm = np.sqrt((du * du).sum(-1) / A + 1.0 / B)
    nu_cov = n_cov / n_norm[..., None]

    # D_{t_i} t_j = u_ij e_lambda + Gamma^a_{bc} t_i^b t_j^c
    sec = np.einsum("...abc,...ib,...jc->...ija", gamma, t_vec, t_vec)
    sec[..., 2] += d2u
    h = -np.einsum("...ija,...a->...ij", sec, nu_cov)
    return np.einsum("...ij,...ij->...", ginv, h)


def ball_positions(geom: SurfaceGeometry) -> np.ndarray:
    return hyperboloid_to_ball(geom.z)


def orthonormality_residuals(geom: SurfaceGeometry) -> dict:
    """Max deviations of the normal's defining relations."""
    return {
        "nu_unit": float(np.max(np.abs(_mink(geom.nu, geom.nu) - 1.0))),
        "nu_z": float(np.max(np.abs(_mink(geom.nu, geom.z)))),
        "nu_zs": float(np.max(np.abs(_mink(geom.nu, geom.z_s)))),
        "nu_zt": float(np.max(np.abs(_mink(geom.nu, geom.z_t)))),
        "z_on_hyperboloid": float(np.max(np.abs(_mink(geom.z, geom.z) + 1.0))),
    }
