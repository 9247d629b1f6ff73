#!/usr/bin/env python3
"""Grid-refinement table for the curvature kernel and the chart cross-check."""

import numpy as np

from hyperflow import shapes
from hyperflow.geometry import build_graph_geometry, mean_curvature_chart
from hyperflow.grid import PolarGrid
from hyperflow.hyperbolic import BallConfig


def main() -> None:
    ball = BallConfig(2, 1.0)
    H_exact = 2.0 / np.tanh(0.5)
    print("geodesic sphere patch, H vs 2 coth(0.5)")
    prev = None
    for nr, nt in ((16, 24), (32, 48), (64, 96), (128, 192)):
        geo = shapes.geodesic_sphere_patch(0.5, PolarGrid(nr, nt), ball)
        err = np.max(np.abs(geo.H - H_exact)) / H_exact
        rate = "" if prev is None else f"  order {np.log2(prev / err):.2f}"
        print(f"  {nr:4d}x{nt:<4d} rel err {err:.3e}{rate}")
        prev = err

    print("cap fixture, chart-route vs embedding-route H")
    prev = None
    for nr, nt in ((16, 32), (32, 64), (64, 128)):
        g = PolarGrid(nr, nt)
        u = shapes.cap_graph(2.0, g)
        geo = build_graph_geometry(g, u, ball)
        err = np.max(np.abs(mean_curvature_chart(g, u, ball) - geo.H) / geo.H)
        rate = "" if prev is None else f"  order {np.log2(prev / err):.2f}"
        print(f"  {nr:4d}x{nt:<4d} rel diff {err:.3e}{rate}")
        prev = err


if __name__ == "__main__":
    main()
