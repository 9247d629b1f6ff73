#!/usr/bin/env python3
"""Run the reference flow to the area target and verify the trajectory.

Writes series.csv, snapshots, manifest.json and report.json into the
output directory; exit code 1 if any trajectory check fails.
"""

import argparse
import json
import sys
from pathlib import Path

from hyperflow import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/reference")
    ap.add_argument("--grid-radial", type=int, default=48)
    ap.add_argument("--grid-angular", type=int, default=96)
    ap.add_argument("--deep", action="store_true",
                    help="continue to 99.99%% of the limiting area "
                         "(several minutes; needed for the limit-shape fit)")
    args = ap.parse_args()

    lines = [
        "n = 2",
        "rho0 = 1.0",
        f"grid_radial = {args.grid_radial}",
        f"grid_angular = {args.grid_angular}",
        "initial = cap",
        "lambda_c = 2.0",
        "mode = imcf",
        "cfl_sigma = 0.25",
        "t_max = 10.0",
        "snapshot_every = 0.05",
    ]
    if args.deep:
        lines += ["h_min_stop = 0.015"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = out / "run.cfg"
    cfg.write_text("\n".join(lines) + "\n")

    rc = cli.main(["run", "--config", str(cfg), "--out", str(out)])
    if rc != 0:
        return rc
    report = json.loads((out / "report.json").read_text())
    bad = [c["name"] for c in report["checks"] if not c["pass"]]
    for c in report["checks"]:
        mark = "pass" if c["pass"] else "FAIL"
        print(f"[{mark}] {c['name']}: {c['residual']:.3e}")
    print(f"plane-fit proxy: {report['plane_fit']['hausdorff_proxy']:.4e}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
