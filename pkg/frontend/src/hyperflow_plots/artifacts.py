"""Run-directory loading: series.csv, snapshot JSON files, manifest.

Pure consumer of the solver's documented file formats; nothing here
recomputes geometry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

REQUIRED_COLUMNS = ("t", "area", "boundary_length", "q", "min_H", "max_H",
                    "max_A", "int_H2", "zeta_max", "stahl_res", "fb_res",
                    "min_z1", "min_kappa")


@dataclass
class RunArtifacts:
    run_dir: Path
    series: dict[str, np.ndarray]
    snapshots: list[dict] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    @property
    def rho0(self) -> float:
        return float(self.manifest.get("resolved", {}).get("rho0", 1.0))

    @property
    def n(self) -> int:
        return int(self.manifest.get("resolved", {}).get("n", 2))

    @property
    def r0(self) -> float:
        return float(np.tanh(self.rho0 / 2.0))


def read_series(path: Path) -> dict[str, np.ndarray]:
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError("empty series file")
    header = lines[0].split(",")
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise ValueError(f"missing column {col}")
    rows = [line.split(",") for line in lines[1:] if line]
    if not rows:
        raise ValueError("series file has no data rows")
    data = np.array(rows, dtype=float)
    return {name: data[:, k] for k, name in enumerate(header)}


def load_run(run_dir: str | Path) -> RunArtifacts:
    run_dir = Path(run_dir)
    series = read_series(run_dir / "series.csv")
    snapshots = []
    for p in sorted(run_dir.glob("snapshot_*.json")):
        try:
            snapshots.append(json.loads(p.read_text()))
        except json.JSONDecodeError:
            continue  # missing or garbled snapshots are tolerated
    manifest = {}
    mp = run_dir / "manifest.json"
    if mp.exists():
        manifest = json.loads(mp.read_text())
    return RunArtifacts(run_dir=run_dir, series=series,
                        snapshots=snapshots, manifest=manifest)


def willmore_rhs(n: int, rho0: float) -> float:
    """Equality value q(disk) = -n^2 lam^(2/n) + Lam omega sinh^(n-1)(rho0)."""
    s = np.linspace(0.0, rho0, 20001)
    omega = 2.0 * np.pi ** (n / 2.0) / math.gamma(n / 2.0)
    lam = omega * np.trapezoid(np.sinh(s) ** (n - 1), s)
    Lam = 2.0 / np.tanh(rho0) * lam ** ((2.0 - n) / n)
    return float(-n * n * lam ** (2.0 / n)
                 + Lam * omega * np.sinh(rho0) ** (n - 1))
