"""Minkowski linear algebra and the hyperboloid / Poincare ball models.

Points of hyperbolic space H^{n+1} are rows of length n+2 living on the
upper hyperboloid sheet {<z,z> = -1, z^0 > 0} of Minkowski space with
signature (-,+,...,+).  All functions broadcast over leading axes, so a
field of points is just an array of shape (..., n+2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HYPERBOLOID_TOL = 1e-12


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


def minkowski_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Lorentzian bilinear form -a^0 b^0 + sum_i a^i b^i."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}"
        )
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def is_hyperboloid_point(z: np.ndarray, tol: float = HYPERBOLOID_TOL) -> bool:
    z = np.asarray(z, dtype=float)
    return bool(
        np.all(np.abs(minkowski_inner(z, z) + 1.0) <= tol)
        and np.all(z[..., 0] >= 1.0 - tol)
    )


def ball_to_hyperboloid(x: np.ndarray) -> np.ndarray:
    """Inverse stereographic projection of the Poincare ball into the hyperboloid.

    z^0 = (1+|x|^2)/(1-|x|^2), z^i = 2 x^i/(1-|x|^2).
    """
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 >= 1.0):
        raise DomainError("ball point must satisfy |x| < 1")
    denom = 1.0 - r2
    z = np.empty(x.shape[:-1] + (x.shape[-1] + 1,))
    z[..., 0] = (1.0 + r2) / denom
    z[..., 1:] = 2.0 * x / denom[..., None]
    return z


def hyperboloid_to_ball(z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Stereographic projection x^i = z^i/(1+z^0)."""
    z = np.asarray(z, dtype=float)
    q = minkowski_inner(z, z)
    if np.any(np.abs(q + 1.0) > tol) or np.any(z[..., 0] <= 0.0):
        raise DomainError("input is not on the upper hyperboloid sheet")
    return z[..., 1:] / (1.0 + z[..., 0])[..., None]


def _stable_arccosh(c: np.ndarray) -> np.ndarray:
    # log1p form stays accurate for c close to 1
    e = c - 1.0
    return np.log1p(e + np.sqrt(e * (c + 1.0)))


def geodesic_distance(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Hyperbolic distance arccosh(-<z,w>) between hyperboloid points."""
    c = -minkowski_inner(z, w)
    if np.any(c < 1.0 - 1e-9):
        raise DomainError("arguments are not a valid hyperboloid pair")
    return _stable_arccosh(np.maximum(c, 1.0))


def distance_to_origin(z: np.ndarray) -> np.ndarray:
    """Distance to the base point e_0; cosh(rho) = z^0."""
    z = np.asarray(z, dtype=float)
    return _stable_arccosh(np.maximum(z[..., 0], 1.0))


def ball_radius_of_geodesic_ball(rho0: float) -> float:
    """Euclidean ball-model radius r0 with (1+r0^2)/(1-r0^2) = cosh(rho0)."""
    if rho0 <= 0.0:
        raise DomainError("geodesic radius must be positive")
    return float(np.tanh(rho0 / 2.0))


def signed_distance_to_subspace(z: np.ndarray, y_tilde: np.ndarray) -> np.ndarray:
    """Signed distance to the hyperbolic subspace {<.,y_tilde> = 0}.

    y_tilde must be a unit spacelike vector; the sign is positive on the
    side y_tilde points into, and sinh(d) = <z, y_tilde>.
    """
    norm = minkowski_inner(y_tilde, y_tilde)
    if np.any(np.abs(norm - 1.0) > 1e-9):
        raise ValueError("subspace normal must be a unit spacelike vector")
    return np.arcsinh(minkowski_inner(z, y_tilde))


def sphere_outward_normal(z: np.ndarray) -> np.ndarray:
    """Outward unit normal of the geodesic sphere through z, centred at e_0.

    grad rho = (1/sinh rho) (-e_0 + z^0 z); singular at z = e_0.
    """
    z = np.asarray(z, dtype=float)
    z0 = z[..., 0]
    sinh_rho = np.sqrt(np.maximum(z0 * z0 - 1.0, 0.0))
    if np.any(sinh_rho == 0.0):
        raise DomainError("sphere normal undefined at the centre e_0")
    eta = z0[..., None] * z
    eta[..., 0] -= 1.0
    return eta / sinh_rho[..., None]


def ball_christoffel(x: np.ndarray) -> np.ndarray:
    """Christoffel symbols Gamma^k_ij of the conformal ball metric at x.

    Gamma^k_ij = delta^k_i z^j + delta^k_j z^i - delta_ij z^k with
    z^i = 2 x^i/(1-|x|^2).  Returned with index order [k, i, j].
    """
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 >= 1.0):
        raise DomainError("ball point must satisfy |x| < 1")
    zi = 2.0 * x / (1.0 - r2)[..., None]
    m = x.shape[-1]
    eye = np.eye(m)
    gamma = (
        eye[..., :, :, None] * zi[..., None, None, :]
        + eye[..., :, None, :] * zi[..., None, :, None]
        - eye[..., None, :, :] * zi[..., :, None, None]
    )
    return gamma


@dataclass(frozen=True)
class BallConfig:
    """Problem geometry: hypersurface dimension n and ball radius rho0."""

    n: int
    rho0: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("hypersurface dimension must be >= 2")
        if self.rho0 <= 0.0:
            raise ValueError("geodesic radius must be positive")

    @property
    def r0(self) -> float:
        return ball_radius_of_geodesic_ball(self.rho0)

    @property
    def cosh_rho0(self) -> float:
        return float(np.cosh(self.rho0))
