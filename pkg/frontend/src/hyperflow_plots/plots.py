"""Figure builders for flow-run artifacts.

plot_series renders the time-series diagnostics; plot_profiles renders
meridian sections of surface snapshots in the ball model, overlaid with
the supporting circle of radius r0 and the flat-disk limit line.
"""

from __future__ import annotations

import logging
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .artifacts import RunArtifacts, willmore_rhs

log = logging.getLogger(__name__)


def plot_series(art: RunArtifacts, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    s = art.series
    t = s["t"]
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, s["q"], "o-", ms=2, label="q(t)")
    rhs = willmore_rhs(art.n, art.rho0)
    ax.axhline(rhs, color="crimson", ls="--",
               label=f"equality value {rhs:.4f}")
    ax.set_xlabel("t")
    ax.set_ylabel("Willmore quantity q")
    ax.legend()
    fig.tight_layout()
    p = out_dir / "q_vs_t.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, s["area"], "o-", ms=2, label="area(t)")
    ax.plot(t, s["area"][0] * np.exp(t), "k--", lw=1,
            label="area(0) e^t")
    ax.set_xlabel("t")
    ax.set_ylabel("area")
    ax.legend()
    fig.tight_layout()
    p = out_dir / "area_growth.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, s["min_H"], label="min H")
    ax.plot(t, s["max_H"], label="max H")
    ax.plot(t, s["max_A"], label="max |A|")
    ax.plot(t, s["min_kappa"], label="min kappa")
    ax.set_xlabel("t")
    ax.set_ylabel("curvature")
    ax.legend()
    fig.tight_layout()
    p = out_dir / "curvature_extrema.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)
    return written


def _meridian(snapshot: dict, r0: float):
    """Axis coordinate vs signed distance from the axis along theta = 0, pi.

    Evaluates the chart map x = r0 (4 lam xi + (1+|xi|^2)(lam^2-1) e_axis)
    / ((1+lam)^2 + (1-lam)^2 |xi|^2) on the two meridian columns of the
    stored graph function; this is coordinate plumbing, not geometry.
    """
    nr = snapshot["grid"]["radial"]
    nt = snapshot["grid"]["angular"]
    u = np.asarray(snapshot["u"], dtype=float).reshape(nr + 1, nt)
    s = np.concatenate([(np.arange(nr) + 0.5) / nr, [1.0]])

    def column(lam, sign):
        xi2 = s * s
        phi = (1.0 + lam) ** 2 + (1.0 - lam) ** 2 * xi2
        axis = r0 * (1.0 + xi2) * (lam * lam - 1.0) / phi
        perp = sign * r0 * 4.0 * lam * s / phi
        return perp, axis

    p_r, a_r = column(u[:, 0], +1.0)
    p_l, a_l = column(u[:, nt // 2], -1.0)
    perp = np.concatenate([p_l[::-1], p_r])
    axis = np.concatenate([a_l[::-1], a_r])
    return perp, axis


def plot_profiles(art: RunArtifacts, out_dir: str | Path) -> list[Path]:
    if not art.snapshots:
        warnings.warn("no snapshots found; skipping profile plot")
        log.warning("no snapshots in %s; nothing to plot", art.run_dir)
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    r0 = art.r0

    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    cmap = plt.get_cmap("viridis")
    n_snap = len(art.snapshots)
    for k, snap in enumerate(art.snapshots):
        perp, axis = _meridian(snap, r0)
        color = cmap(k / max(n_snap - 1, 1))
        ax.plot(perp, axis, color=color, lw=1.2,
                label=f"t = {snap['t']:.3f}")
    th = np.linspace(0.0, 2.0 * np.pi, 361)
    ax.plot(r0 * np.cos(th), r0 * np.sin(th), "k-", lw=0.8,
            label="supporting sphere")
    ax.axhline(0.0, color="crimson", ls="--", lw=0.8, label="flat disk")
    ax.set_aspect("equal")
    ax.set_xlabel("signed distance from the axis")
    ax.set_ylabel("axis coordinate")
    if n_snap <= 10:
        ax.legend(fontsize=7)
    fig.tight_layout()
    p = Path(out_dir) / "profiles.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    return [p]
