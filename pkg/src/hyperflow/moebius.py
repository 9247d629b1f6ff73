"""Scaled Moebius coordinates on the pointed half ball.

The chart psi(xi, lambda) maps the unit disk D (coordinates xi in R^n)
times [1, inf) onto the half of the ball-model ball of radius r0 that is
pointed at the axis direction.  Ball coordinates are ordered so that
component 0 is the axis direction and components 1..n carry xi.  In these
coordinates the ball metric is diagonal, b = phi1^2 dlambda^2 + phi2^2
delta, which is what turns the flow into a scalar graph PDE.
"""

from __future__ import annotations

import numpy as np

from .hyperbolic import DomainError, ball_to_hyperboloid


def _phi(xi2: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return (1.0 + lam) ** 2 + (1.0 - lam) ** 2 * xi2


def chart_to_ball(xi: np.ndarray, lam: np.ndarray, r0: float) -> np.ndarray:
    """psi(xi, lambda) = r0 (4 lam xi + (1+|xi|^2)(lam^2-1) axis) / phi."""
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    xi2 = np.sum(xi * xi, axis=-1)
    phi = _phi(xi2, lam)
    x = np.empty(xi.shape[:-1] + (xi.shape[-1] + 1,))
    x[..., 0] = r0 * (1.0 + xi2) * (lam * lam - 1.0) / phi
    x[..., 1:] = r0 * 4.0 * lam[..., None] * xi / phi[..., None]
    return x


def chart_f_sq(xi: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """|f|^2 of the unscaled chart map; equals |psi|^2 / r0^2."""
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    xi2 = np.sum(xi * xi, axis=-1)
    phi = _phi(xi2, lam)
    num = 16.0 * lam * lam * xi2 + (1.0 + xi2) ** 2 * (lam * lam - 1.0) ** 2
    return num / (phi * phi)


def chart_metric(xi: np.ndarray, lam: np.ndarray, r0: float):
    """Diagonal metric factors (phi, phi1, phi2) of the chart.

    phi1 scales dlambda, phi2 scales the flat xi-directions:
    phi1 = 4 r0 (1+|xi|^2) / (phi (1-r0^2 |f|^2)),
    phi2 = 8 r0 lambda     / (phi (1-r0^2 |f|^2)).

    Both factors carry the overall scale r0 of the chart, as a
    finite-difference pullback of the conformal ball metric confirms.
    """
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    xi2 = np.sum(xi * xi, axis=-1)
    phi = _phi(xi2, lam)
    f2 = chart_f_sq(xi, lam)
    conf = 1.0 - r0 * r0 * f2
    if np.any(conf <= 0.0):
        raise DomainError("chart evaluated at or beyond the puncture")
    phi1 = 4.0 * r0 * (1.0 + xi2) / (phi * conf)
    phi2 = 8.0 * r0 * lam / (phi * conf)
    return phi, phi1, phi2


def speed_factor_v(xi: np.ndarray, lam: np.ndarray, du: np.ndarray, r0: float) -> np.ndarray:
    """Graphical speed factor v of the flow PDE.

    v = sqrt(1/phi1^2 + |du|^2/phi2^2)
      = phi (1-r0^2|f|^2)/(4 r0) sqrt(1/(1+|xi|^2)^2 + |du|^2/(4 lam^2)),
    where du is the flat xi-gradient of the graph function.  This is the
    reciprocal of |<nu, d psi/d lambda>| for the downward unit normal.
    """
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    du = np.asarray(du, dtype=float)
    xi2 = np.sum(xi * xi, axis=-1)
    phi = _phi(xi2, lam)
    conf = 1.0 - r0 * r0 * chart_f_sq(xi, lam)
    du2 = np.sum(du * du, axis=-1)
    rad = 1.0 / (1.0 + xi2) ** 2 + du2 / (4.0 * lam * lam)
    return 0.25 * phi * conf * np.sqrt(rad) / r0


def chart_to_hyperboloid(xi: np.ndarray, lam: np.ndarray, r0: float) -> np.ndarray:
    """Composition of the chart with the ball-to-hyperboloid map."""
    return ball_to_hyperboloid(chart_to_ball(xi, lam, r0))


def chart_lambda_tangent_ball(xi: np.ndarray, lam: np.ndarray, r0: float) -> np.ndarray:
    """d psi/d lambda in ball coordinates (analytic)."""
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    xi2 = np.sum(xi * xi, axis=-1)
    phi = _phi(xi2, lam)
    dphi = 2.0 * (1.0 + lam) - 2.0 * (1.0 - lam) * xi2
    num = np.empty(xi.shape[:-1] + (xi.shape[-1] + 1,))
    num[..., 0] = (1.0 + xi2) * (lam * lam - 1.0)
    num[..., 1:] = 4.0 * lam[..., None] * xi
    dnum = np.empty_like(num)
    dnum[..., 0] = 2.0 * lam * (1.0 + xi2)
    dnum[..., 1:] = 4.0 * xi
    return r0 * (dnum * phi[..., None] - num * dphi[..., None]) / (phi * phi)[..., None]


def chart_lambda_tangent(xi: np.ndarray, lam: np.ndarray, r0: float) -> np.ndarray:
    """Pushforward of d/d lambda to the hyperboloid (Minkowski 4-vector field).

    Used to fix the orientation of graph normals: the flow normal nu
    satisfies <nu, d psi/d lambda> < 0 (nu points down in lambda).
    """
    x = chart_to_ball(xi, lam, r0)
    dx = chart_lambda_tangent_ball(xi, lam, r0)
    r2 = np.sum(x * x, axis=-1)
    xdx = np.sum(x * dx, axis=-1)
    denom = 1.0 - r2
    out = np.empty(x.shape[:-1] + (x.shape[-1] + 1,))
    out[..., 0] = 4.0 * xdx / (denom * denom)
    out[..., 1:] = 2.0 * dx / denom[..., None] + 4.0 * x * (xdx / (denom * denom))[..., None]
    return out
