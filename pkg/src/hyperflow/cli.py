"""Command line runner: config parsing, subcommands, artifact emission.

Subcommands:
  run       integrate a flow and write series.csv, snapshots, manifest.json
  verify    run a verification suite (kernel | static | flow), write report.json
  constants print the geometric constants as JSON
  inspect   print a snapshot summary

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import flow, monitors, shapes
from .flow import FlowConfig
from .geometry import build_graph_geometry
from .grid import PolarGrid
from .hyperbolic import BallConfig, DomainError

TOOL_VERSION = "hyperflow 0.1.0"

_CSV_HEADER = ("t,area,boundary_length,q,min_H,max_H,max_A,int_H2,"
               "zeta_max,stahl_res,fb_res,min_z1,min_kappa")


class ConfigError(ValueError):
    pass


_KEY_TYPES = {
    "n": int,
    "rho0": float,
    "grid_radial": int,
    "grid_angular": int,
    "initial": str,
    "lambda_c": float,
    "eps": float,
    "mode": str,
    "cfl_sigma": float,
    "h_min_stop": float,
    "t_max": float,
    "snapshot_every": float,
    "out_dir": str,
}


def parse_config(text: str) -> tuple[FlowConfig, str | None, dict]:
    """Parse `key = value` lines into a FlowConfig.

    Returns (config, out_dir, raw key/value dict).  Unknown keys, bad
    values and unknown modes raise ConfigError naming the line number.
    """
    raw: dict[str, str] = {}
    kwargs: dict = {}
    out_dir: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"malformed line {lineno}: {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"unknown key {key!r} at line {lineno}")
        try:
            typed = _KEY_TYPES[key](value)
        except ValueError:
            raise ConfigError(
                f"bad value for {key!r} at line {lineno}: {value!r}") from None
        raw[key] = value
        if key == "mode" and typed not in ("imcf", "mcf"):
            raise ConfigError(f"unknown mode at line {lineno}")
        if key == "initial" and typed not in ("cap", "perturbed", "disk"):
            raise ConfigError(f"unknown initial data at line {lineno}")
        if key == "out_dir":
            out_dir = typed
        else:
            kwargs[key] = typed
    try:
        cfg = FlowConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg, out_dir, raw


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_series(path: Path, records) -> None:
    lines = [_CSV_HEADER]
    for r in records:
        lines.append(",".join(
            _fmt(getattr(r, f)) for f in monitors.TimeSeriesRecord.CSV_FIELDS))
    path.write_text("\n".join(lines) + "\n")


def _json_dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def checks_report(suite: str, checks) -> dict:
    return {
        "suite": suite,
        "checks": [
            {"name": c.name, "paper_ref": c.identity, "residual": c.residual,
             "grid": c.grid, "pass": c.passed}
            for c in checks
        ],
    }


def cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text() if args.config else ""
        cfg, cfg_out, raw = parse_config(text)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out or cfg_out or "run_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": raw,
        "resolved": dataclasses.asdict(cfg),
        "out_dir": str(out_dir),
        "seed": 0,
        "version": TOOL_VERSION,
    }
    _json_dump(out_dir / "manifest.json", manifest)
    try:
        traj = flow.run(cfg)
    except (flow.FlowDegenerateError, flow.FlowAbortError) as exc:
        snap = getattr(exc, "snapshot", None)
        if snap is not None:
            _json_dump(out_dir / "snapshot_abort.json", snap)
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    write_series(out_dir / "series.csv", traj.records)
    for k, snap in enumerate(traj.snapshots):
        _json_dump(out_dir / f"snapshot_{k:04d}.json", snap)
    const = monitors.constants(cfg.n, cfg.rho0)
    if len(traj.records) >= 3:
        fchecks = monitors.flow_identity_suite(traj, const)
    else:
        fchecks = []
    report = checks_report("flow", fchecks)
    report["stop_reason"] = traj.stop_reason
    report["steps"] = traj.steps
    w, proxy = monitors.fit_totally_geodesic(traj.final)
    report["plane_fit"] = {"normal": w.tolist(), "hausdorff_proxy": proxy}
    _json_dump(out_dir / "report.json", report)
    print(f"stop: {traj.stop_reason} after {traj.steps} steps, "
          f"t = {traj.final.time:.6f}")
    return 0


def _kernel_checks() -> list:
    """Convergence spot-checks of the geometry kernel."""
    import math

    from .monitors import Check
    checks = []
    ball = BallConfig(2, 1.0)
    H_exact = 2.0 / np.tanh(0.5)
    errs = []
    for nr, nt in ((32, 48), (64, 96)):
        geo = shapes.geodesic_sphere_patch(0.5, PolarGrid(nr, nt), ball)
        errs.append(float(np.max(np.abs(geo.H - H_exact)) / H_exact))
    checks.append(Check("sphere_patch_H", "H = 2 coth(rho) on geodesic spheres",
                        errs[-1], "64x96", errs[-1] < 1e-3))
    order = math.log(errs[0] / errs[-1], 2.0)
    checks.append(Check("sphere_patch_order", "H error refines at order >= 1.8",
                        order, "32x48->64x96", order >= 1.8))
    grid = PolarGrid(48, 96)
    u = shapes.cap_graph(2.0, grid)
    geo = build_graph_geometry(grid, u, ball)
    from .geometry import mean_curvature_chart
    Hc = mean_curvature_chart(grid, u, ball)
    rel = float(np.max(np.abs(Hc - geo.H) / np.abs(geo.H)))
    checks.append(Check("chart_vs_embedding", "two independent H computations agree",
                        rel, "48x96", rel < 1e-3))
    umb = float(np.max((geo.kappa2 - geo.kappa1) / geo.H))
    checks.append(Check("cap_umbilic", "spherical caps are umbilic",
                        umb, "48x96", umb < 1e-2))
    return checks


def cmd_verify(args) -> int:
    suite = args.suite
    if suite == "kernel":
        checks = _kernel_checks()
    elif suite == "static":
        ball = BallConfig(2, 1.0)
        grid = PolarGrid(48, 96)
        checks = []
        for u in (shapes.cap_graph(2.0, grid), shapes.totally_geodesic_disk(grid)):
            geo = build_graph_geometry(grid, u, ball)
            checks.extend(monitors.static_identity_suite(geo))
    elif suite == "flow":
        try:
            if args.config:
                cfg, _, _ = parse_config(Path(args.config).read_text())
            else:
                cfg = FlowConfig(t_max=0.1)
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        try:
            traj = flow.run(cfg)
        except (flow.FlowDegenerateError, flow.FlowAbortError) as exc:
            print(f"numerical abort: {exc}", file=sys.stderr)
            return 3
        const = monitors.constants(cfg.n, cfg.rho0)
        checks = monitors.flow_identity_suite(traj, const)
    else:  # pragma: no cover - argparse restricts choices
        return 2
    report = checks_report(suite, checks)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        _json_dump(out / "report.json", report)
    for c in checks:
        status = "pass" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: residual {c.residual:.3e} ({c.grid})")
    return 0 if all(c.passed for c in checks) else 1


def cmd_constants(args) -> int:
    try:
        const = monitors.constants(args.n, args.rho0)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    ball = BallConfig(args.n, args.rho0)
    print(json.dumps({
        "n": const.n,
        "rho0": const.rho0,
        "omega": const.omega,
        "lambda": const.lam,
        "Lambda": const.Lam,
        "r0": ball.r0,
        "willmore_rhs": const.willmore_rhs,
    }, indent=2, sort_keys=True))
    return 0


def cmd_inspect(args) -> int:
    try:
        snap = json.loads(Path(args.snapshot).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: cannot read snapshot: {exc}", file=sys.stderr)
        return 2
    H = np.asarray(snap["derived"]["H"], dtype=float)
    kmin = np.asarray(snap["derived"]["kappa_min"], dtype=float)
    print(f"t = {snap['t']:.6f}  grid {snap['grid']['radial']}x"
          f"{snap['grid']['angular']}  rho0 = {snap['rho0']}")
    print(f"H in [{H.min():.6f}, {H.max():.6f}]  "
          f"min kappa = {kmin.min():.6f}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hyperflow",
        description="free-boundary inverse mean curvature flow in a "
                    "hyperbolic geodesic ball")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="integrate a flow and write artifacts")
    pr.add_argument("--config", help="key = value config file")
    pr.add_argument("--out", help="output directory")
    pr.set_defaults(func=cmd_run)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--suite", choices=("kernel", "static", "flow"),
                    required=True)
    pv.add_argument("--config", help="flow config for the flow suite")
    pv.add_argument("--out", help="directory for report.json")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("constants", help="print geometric constants")
    pc.add_argument("--n", type=int, default=2)
    pc.add_argument("--rho0", type=float, default=1.0)
    pc.set_defaults(func=cmd_constants)

    pi = sub.add_parser("inspect", help="summarize a snapshot file")
    pi.add_argument("--snapshot", required=True)
    pi.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    threads = os.environ.get("HYPERFLOW_THREADS")
    if threads:
        os.environ.setdefault("OMP_NUM_THREADS", threads)
        os.environ.setdefault("OPENBLAS_NUM_THREADS", threads)
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
