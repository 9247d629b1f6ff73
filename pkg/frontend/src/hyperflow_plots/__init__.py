"""Batch figure generation from flow-run output directories."""

from .artifacts import RunArtifacts, load_run
from .plots import plot_profiles, plot_series

__all__ = ["RunArtifacts", "load_run", "plot_series", "plot_profiles"]
