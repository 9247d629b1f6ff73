import json

import numpy as np
import pytest

HEADER = ("t,area,boundary_length,q,min_H,max_H,max_A,int_H2,"
          "zeta_max,stahl_res,fb_res,min_z1,min_kappa")


def make_series(nrows: int) -> str:
    rng = np.random.default_rng(0)
    lines = [HEADER]
    for k in range(nrows):
        t = 0.01 * k
        row = [t, 2.5 * np.exp(t), 5.9, 9.6 - 0.1 * k, 1.2, 1.3, 0.9,
               4.0 * np.exp(-t), 0.68, 1e-3, 1e-7, 0.3, 0.6]
        lines.append(",".join("%.17g" % v for v in row))
    return "\n".join(lines) + "\n"


def make_snapshot(t: float, nr: int = 8, nt: int = 16, lam: float = 2.0):
    u = np.full((nr + 1) * nt, lam)
    return {
        "t": t,
        "rho0": 1.0,
        "n": 2,
        "grid": {"radial": nr, "angular": nt},
        "u": u.tolist(),
        "derived": {
            "H": np.full((nr + 1) * nt, 1.27).tolist(),
            "kappa_min": np.full((nr + 1) * nt, 0.63).tolist(),
            "z1": np.full((nr + 1) * nt, 0.3).tolist(),
        },
    }


@pytest.fixture
def run_dir(tmp_path):
    (tmp_path / "series.csv").write_text(make_series(6))
    for k, (t, lam) in enumerate(((0.0, 2.0), (0.1, 1.5), (0.2, 1.1))):
        (tmp_path / f"snapshot_{k:04d}.json").write_text(
            json.dumps(make_snapshot(t, lam=lam)))
    (tmp_path / "manifest.json").write_text(json.dumps(
        {"config": {}, "resolved": {"n": 2, "rho0": 1.0}}))
    return tmp_path
