"""Staggered polar grid on the unit disk with finite-difference operators.

Radial nodes sit at s_j = (j+1/2) ds, so no node coincides with the polar
origin; a single extra ring at s = 1 carries the boundary.  Ghost rings at
negative s are filled by reflection through the origin: a field value at
(-s, theta) is the value at (s, theta+pi) times the field's parity (+1 for
ordinary scalars, -1 for radial-derivative-like quantities).

Radial derivatives use 5-point Fornberg weights on the (mildly nonuniform)
extended node set, which keeps one-sided boundary stencils at second order
or better.  Angular derivatives use 5-point centred periodic stencils.
"""

from __future__ import annotations

import numpy as np

NGHOST = 2
STENCIL = 5


def fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at x0 from nodes x.

    Fornberg's recursive algorithm; returns array (m+1, len(x)).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    w = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - x0
    w[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((x[i] - x0) * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = (x[i] - x0) * w[0, j] / c3
        c1 = c2
    return w


class PolarGrid:
    """Polar discretization of the unit disk (n = 2 solver grid)."""

    def __init__(self, radial_count: int, angular_count: int):
        if radial_count < 8:
            raise ValueError("radial_count must be >= 8")
        if angular_count < 16 or angular_count % 2:
            raise ValueError("angular_count must be even and >= 16")
        self.nr = radial_count
        self.nt = angular_count
        self.ds = 1.0 / radial_count
        self.dtheta = 2.0 * np.pi / angular_count
        self.s = np.concatenate([(np.arange(radial_count) + 0.5) * self.ds, [1.0]])
        self.theta = np.arange(angular_count) * self.dtheta
        self.s_ext = np.concatenate([[-1.5 * self.ds, -0.5 * self.ds], self.s])

        nrow = radial_count + 1
        self._start = np.clip(np.arange(nrow), 0, radial_count - NGHOST)
        self._idx = self._start[:, None] + np.arange(STENCIL)[None, :]
        self._w1 = np.empty((nrow, STENCIL))
        self._w2 = np.empty((nrow, STENCIL))
        for j in range(nrow):
            pts = self.s_ext[self._idx[j]]
            w = fd_weights(pts, self.s[j], 2)
            self._w1[j] = w[1]
            self._w2[j] = w[2]

        # polar-coordinate node positions xi = s (cos, sin)
        self.xi = np.empty((nrow, angular_count, 2))
        self.xi[..., 0] = np.outer(self.s, np.cos(self.theta))
        self.xi[..., 1] = np.outer(self.s, np.sin(self.theta))

        # quadrature: interior rings are midpoints of radial cells of width ds
        self.cell_weight = np.zeros(nrow)
        self.cell_weight[:-1] = self.ds * self.dtheta

    # -- extension and radial derivatives -------------------------------

    def extend(self, field: np.ndarray, parity: int = 1) -> np.ndarray:
        """Prepend reflection ghost rings; field shape (nr+1, nt, ...)."""
        half = self.nt // 2
        out = np.empty((field.shape[0] + NGHOST,) + field.shape[1:])
        out[NGHOST:] = field
        out[1] = parity * np.roll(field[0], half, axis=0)
        out[0] = parity * np.roll(field[1], half, axis=0)
        return out

    def _apply_radial(self, w: np.ndarray, field: np.ndarray, parity: int) -> np.ndarray:
        ext = self.extend(field, parity)
        gathered = ext[self._idx]  # (nr+1, STENCIL, nt, ...)
        return np.einsum("jm,jm...->j...", w, gathered)

    def d_s(self, field: np.ndarray, parity: int = 1) -> np.ndarray:
        return self._apply_radial(self._w1, field, parity)

    def d_ss(self, field: np.ndarray, parity: int = 1) -> np.ndarray:
        return self._apply_radial(self._w2, field, parity)

    # -- angular derivatives (5-point periodic) -------------------------

    def d_theta(self, field: np.ndarray) -> np.ndarray:
        f = field
        r = lambda k: np.roll(f, -k, axis=1)
        return (r(-2) - 8.0 * r(-1) + 8.0 * r(1) - r(2)) / (12.0 * self.dtheta)

    def d_theta2(self, field: np.ndarray) -> np.ndarray:
        f = field
        r = lambda k: np.roll(f, -k, axis=1)
        return (-r(-2) + 16.0 * r(-1) - 30.0 * f + 16.0 * r(1) - r(2)) / (
            12.0 * self.dtheta ** 2
        )

    def d_stheta(self, field: np.ndarray, parity: int = 1) -> np.ndarray:
        return self.d_s(self.d_theta(field), parity)
