"""Analytic and semi-analytic fixture surfaces.

Geodesic sphere patches (exact umbilic oracle for the curvature kernel),
constant-height caps, the totally geodesic disk and Neumann-compatible
perturbations used as initial data and in the verification suites.
"""

from __future__ import annotations

import numpy as np

from .geometry import SurfaceGeometry, build_graph_geometry, fundamental_forms
from .grid import PolarGrid
from .hyperbolic import BallConfig


def geodesic_sphere_patch(
    rho_c: float, grid: PolarGrid, cfg: BallConfig, cap_angle: float = np.pi / 3.0
) -> SurfaceGeometry:
    """Patch of the geodesic sphere of radius rho_c about the centre.

    z(s,theta) = e0 cosh(rho_c) + omega sinh(rho_c) with omega sweeping a
    polar cap of the unit direction sphere.  Exact curvature: every
    principal curvature equals coth(rho_c), so H = n coth(rho_c); the
    orientation seed makes the normal point away from the centre.
    """
    if rho_c <= 0.0:
        raise ValueError("sphere radius must be positive")
    alpha = cap_angle * grid.s[:, None]
    ct, st = np.cos(grid.theta)[None, :], np.sin(grid.theta)[None, :]
    omega = np.empty((grid.nr + 1, grid.nt, 3))
    omega[..., 0] = np.cos(alpha) * np.ones_like(ct)
    omega[..., 1] = np.sin(alpha) * ct
    omega[..., 2] = np.sin(alpha) * st

    z = np.empty((grid.nr + 1, grid.nt, 4))
    z[..., 0] = np.cosh(rho_c)
    z[..., 1:] = np.sinh(rho_c) * omega

    # outward normal is e0 sinh + omega cosh; seed with its negative
    seed = np.empty_like(z)
    seed[..., 0] = -np.sinh(rho_c)
    seed[..., 1:] = -np.cosh(rho_c) * omega
    return fundamental_forms(grid, z, cfg, orient_against=seed)


def cap_graph(lambda_c: float, grid: PolarGrid) -> np.ndarray:
    """Constant-height graph u = lambda_c (umbilic free-boundary cap)."""
    if lambda_c <= 1.0:
        raise ValueError("cap height must exceed 1")
    return np.full((grid.nr + 1, grid.nt), float(lambda_c))


def totally_geodesic_disk(grid: PolarGrid) -> np.ndarray:
    """u = 1: the flat equatorial disk, H = 0, the flow's limit shape."""
    return np.ones((grid.nr + 1, grid.nt))


def radial_profile(s: np.ndarray) -> np.ndarray:
    """Smooth bump (1-s^2)^2: flat at the rim (Neumann) and even in s."""
    return (1.0 - s * s) ** 2


def perturbed_cap(
    lambda_c: float, eps: float, grid: PolarGrid, mode: str = "radial"
) -> np.ndarray:
    """Cap plus a Neumann-compatible perturbation.

    mode "radial": u = lambda_c + eps (1-s^2)^2 (axisymmetric).
    mode "angular": u = lambda_c + eps (1-s^2)^2 s cos(theta), smooth at the
    axis because s cos(theta) is the Cartesian coordinate xi^1.
    """
    p = radial_profile(grid.s)[:, None]
    if mode == "radial":
        bump = p * np.ones(grid.nt)[None, :]
    elif mode == "angular":
        bump = p * grid.s[:, None] * np.cos(grid.theta)[None, :]
    else:
        raise ValueError(f"unknown perturbation mode: {mode!r}")
    return lambda_c + eps * bump


def min_principal_curvature(grid: PolarGrid, u: np.ndarray, cfg: BallConfig) -> float:
    return float(np.min(build_graph_geometry(grid, u, cfg).kappa1))


def weakly_convex_fixture(
    lambda_c: float,
    grid: PolarGrid,
    cfg: BallConfig,
    mode: str = "radial",
    band: tuple[float, float] = (0.0, 1e-4),
    max_iter: int = 200,
) -> tuple[np.ndarray, float]:
    """Bisect the perturbation size until min kappa lands in the given band.

    Scans eps upward (both signs) to bracket the loss of convexity, then
    bisects.  Returns (u, eps).
    """
    lo_k, hi_k = band

    def f(eps: float) -> float:
        return min_principal_curvature(grid, perturbed_cap(lambda_c, eps, grid, mode), cfg)

    base = f(0.0)
    if base <= hi_k:
        raise RuntimeError("unperturbed cap is not strictly convex")

    bracket = None
    for sign in (1.0, -1.0):
        eps = 0.01 * sign
        prev = 0.0
        for _ in range(40):
            if f(eps) < lo_k:
                bracket = (prev, eps)
                break
            prev = eps
            eps *= 2.0
        if bracket is not None:
            break
    if bracket is None:
        raise RuntimeError("could not bracket loss of convexity")

    a, b = bracket  # f(a) > hi_k possible; f(b) < lo_k
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        k = f(mid)
        if lo_k <= k <= hi_k:
            return perturbed_cap(lambda_c, mid, grid, mode), mid
        if k > hi_k:
            a = mid
        else:
            b = mid
    raise RuntimeError("bisection failed to land in the convexity band")
