"""`plots <run_dir> [--out DIR]`: render all figures for a run directory."""

from __future__ import annotations

import argparse
import sys

from .artifacts import load_run
from .plots import plot_profiles, plot_series


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="render figures from a flow run directory")
    parser.add_argument("run_dir", help="directory containing series.csv")
    parser.add_argument("--out", help="output directory (default: run_dir)")
    args = parser.parse_args(argv)
    try:
        art = load_run(args.run_dir)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = args.out or args.run_dir
    written = plot_series(art, out) + plot_profiles(art, out)
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
